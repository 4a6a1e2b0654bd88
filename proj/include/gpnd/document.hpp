#pragma once
// Proof documents: definitions, axioms and lemmas whose proofs are explicit
// trees of inference steps. Every node states its own conclusion.

#include <optional>
#include <string>
#include <vector>

#include "gpnd/syntax.hpp"

namespace gpnd {

enum class Rule {
  Hyp,
  AndI,
  AndE1,
  AndE2,
  ImpI,
  ImpE,
  OrI1,
  OrI2,
  OrE,
  BotE,
  PEM,
  NNE,
  AllI,
  AllE,
  ExI,
  ExE,
  EqI,
  EqE,
  NatRec,
  Conv,
  Chain,
  LemmaRef,
};

inline const char* rule_name(Rule r) {
  switch (r) {
    case Rule::Hyp: return "Hyp";
    case Rule::AndI: return "AndI";
    case Rule::AndE1: return "AndE1";
    case Rule::AndE2: return "AndE2";
    case Rule::ImpI: return "ImpI";
    case Rule::ImpE: return "ImpE";
    case Rule::OrI1: return "OrI1";
    case Rule::OrI2: return "OrI2";
    case Rule::OrE: return "OrE";
    case Rule::BotE: return "BotE";
    case Rule::PEM: return "PEM";
    case Rule::NNE: return "NNE";
    case Rule::AllI: return "AllI";
    case Rule::AllE: return "AllE";
    case Rule::ExI: return "ExI";
    case Rule::ExE: return "ExE";
    case Rule::EqI: return "EqI";
    case Rule::EqE: return "EqE";
    case Rule::NatRec: return "NatRec";
    case Rule::Conv: return "Conv";
    case Rule::Chain: return "Chain";
    case Rule::LemmaRef: return "Lemma";
  }
  return "?";
}

inline std::optional<Rule> rule_from_name(const std::string& s) {
  static const std::pair<const char*, Rule> table[] = {
      {"Hyp", Rule::Hyp},       {"AndI", Rule::AndI},   {"AndE1", Rule::AndE1},
      {"AndE2", Rule::AndE2},   {"ImpI", Rule::ImpI},   {"ImpE", Rule::ImpE},
      {"OrI1", Rule::OrI1},     {"OrI2", Rule::OrI2},   {"OrE", Rule::OrE},
      {"BotE", Rule::BotE},     {"PEM", Rule::PEM},     {"NNE", Rule::NNE},
      {"AllI", Rule::AllI},     {"AllE", Rule::AllE},   {"ExI", Rule::ExI},
      {"ExE", Rule::ExE},       {"EqI", Rule::EqI},     {"EqE", Rule::EqE},
      {"NatRec", Rule::NatRec}, {"Conv", Rule::Conv},   {"Chain", Rule::Chain},
      {"Lemma", Rule::LemmaRef},
  };
  for (const auto& [n, r] : table)
    if (s == n) return r;
  return std::nullopt;
}

// Fixed child count per rule; -1 means "as declared" (lemma references).
inline int rule_child_count(Rule r) {
  switch (r) {
    case Rule::Hyp:
    case Rule::PEM:
    case Rule::EqI:
    case Rule::Chain:
      return 0;
    case Rule::AndE1:
    case Rule::AndE2:
    case Rule::ImpI:
    case Rule::OrI1:
    case Rule::OrI2:
    case Rule::BotE:
    case Rule::NNE:
    case Rule::AllI:
    case Rule::AllE:
    case Rule::ExI:
    case Rule::Conv:
      return 1;
    case Rule::AndI:
    case Rule::ImpE:
    case Rule::NatRec:
    case Rule::EqE:
    case Rule::ExE:
      return 2;
    case Rule::OrE:
      return 3;
    case Rule::LemmaRef:
      return -1;
  }
  return -1;
}

struct SourcePos {
  int line = 0;
  int col = 0;
};

struct Subst {
  std::string var;
  Term replacement;
};

inline bool operator==(const Subst& a, const Subst& b) {
  return a.var == b.var && a.replacement == b.replacement;
}

// One line of an equational block: lhs = rhs justified by a hypothesis
// label, an axiom/lemma name (with forall instantiations), or EqI.
struct ChainStep {
  Term lhs, rhs;
  std::string just;
  std::vector<Subst> just_substs;
  SourcePos pos;
};

struct ProofNode {
  Rule rule = Rule::Hyp;
  std::vector<std::string> labels;  // Hyp label or discharge labels
  std::vector<Subst> substs;        // {x := t} annotations
  std::string fresh;                // {x0} annotation of AllI/ExE
  std::string ref;                  // Conv / Lemma reference name
  FormulaRef conclusion;
  std::vector<ProofNode> children;
  std::vector<ChainStep> steps;  // Chain only
  SourcePos pos;
};

struct Hypothesis {
  std::string label;
  FormulaRef formula;
};

struct Lemma {
  std::string name;
  std::vector<Hypothesis> hypotheses;
  FormulaRef goal;
  ProofNode root;
  SourcePos pos;
};

struct Axiom {
  std::string name;
  FormulaRef formula;
  SourcePos pos;
};

struct ProofDocument {
  Signature signature;
  std::vector<Definition> definitions;
  std::vector<Axiom> axioms;
  std::vector<Lemma> lemmas;

  const Axiom* find_axiom(const std::string& name) const {
    for (const Axiom& a : axioms)
      if (a.name == name) return &a;
    return nullptr;
  }
  const Lemma* find_lemma(const std::string& name) const {
    for (const Lemma& l : lemmas)
      if (l.name == name) return &l;
    return nullptr;
  }
};

inline const ProofNode* node_at(const ProofNode& root, const std::vector<int>& path) {
  const ProofNode* n = &root;
  for (int i : path) {
    if (i < 0 || static_cast<std::size_t>(i) >= n->children.size()) return nullptr;
    n = &n->children[i];
  }
  return n;
}

// ---------------------------------------------------------------------------
// Structural equality (positions ignored) for round-trip tests

inline bool equal(const ChainStep& a, const ChainStep& b) {
  return a.lhs == b.lhs && a.rhs == b.rhs && a.just == b.just && a.just_substs == b.just_substs;
}

inline bool equal(const ProofNode& a, const ProofNode& b) {
  if (a.rule != b.rule || a.labels != b.labels || !(a.substs == b.substs) ||
      a.fresh != b.fresh || a.ref != b.ref)
    return false;
  if (!equal(a.conclusion, b.conclusion)) return false;
  if (a.children.size() != b.children.size() || a.steps.size() != b.steps.size()) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!equal(a.children[i], b.children[i])) return false;
  for (std::size_t i = 0; i < a.steps.size(); ++i)
    if (!equal(a.steps[i], b.steps[i])) return false;
  return true;
}

inline bool equal(const Lemma& a, const Lemma& b) {
  if (a.name != b.name || a.hypotheses.size() != b.hypotheses.size()) return false;
  for (std::size_t i = 0; i < a.hypotheses.size(); ++i) {
    if (a.hypotheses[i].label != b.hypotheses[i].label) return false;
    if (!equal(a.hypotheses[i].formula, b.hypotheses[i].formula)) return false;
  }
  return equal(a.goal, b.goal) && equal(a.root, b.root);
}

inline bool equal(const ProofDocument& a, const ProofDocument& b) {
  if (a.definitions.size() != b.definitions.size() || a.axioms.size() != b.axioms.size() ||
      a.lemmas.size() != b.lemmas.size())
    return false;
  for (std::size_t i = 0; i < a.definitions.size(); ++i) {
    if (a.definitions[i].name != b.definitions[i].name) return false;
    if (a.definitions[i].params != b.definitions[i].params) return false;
    if (!equal(a.definitions[i].body, b.definitions[i].body)) return false;
  }
  for (std::size_t i = 0; i < a.axioms.size(); ++i) {
    if (a.axioms[i].name != b.axioms[i].name) return false;
    if (!equal(a.axioms[i].formula, b.axioms[i].formula)) return false;
  }
  for (std::size_t i = 0; i < a.lemmas.size(); ++i)
    if (!equal(a.lemmas[i], b.lemmas[i])) return false;
  return a.signature.functions == b.signature.functions &&
         a.signature.predicates == b.signature.predicates;
}

}  // namespace gpnd
