#pragma once
// The trusted checker. Validates each proof node against the natural
// deduction rules, threads available hypotheses through discharges,
// enforces the eigenvariable side conditions, elaborates equational
// blocks into EqI/EqE trees, and links lemmas as derived rules.
//
// Checking never throws on a bad proof: every violation becomes a
// Diagnostic with the path of the offending node, and checking continues
// into independent subtrees so a report can list several errors.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "gpnd/document.hpp"
#include "gpnd/syntax.hpp"

namespace gpnd {

enum class Mode { Intuitionistic, Classical };

enum class DiagClass {
  WrongRuleApplication,
  ScopeViolation,
  FreshnessViolation,
  UnprovedPremise,
  UnknownHypothesis,
  DuplicateLabel,
  ConversionFailure,
  ModeViolation,
  ChainBreak,
};

inline const char* diag_class_name(DiagClass c) {
  switch (c) {
    case DiagClass::WrongRuleApplication: return "WrongRuleApplication";
    case DiagClass::ScopeViolation: return "ScopeViolation";
    case DiagClass::FreshnessViolation: return "FreshnessViolation";
    case DiagClass::UnprovedPremise: return "UnprovedPremise";
    case DiagClass::UnknownHypothesis: return "UnknownHypothesis";
    case DiagClass::DuplicateLabel: return "DuplicateLabel";
    case DiagClass::ConversionFailure: return "ConversionFailure";
    case DiagClass::ModeViolation: return "ModeViolation";
    case DiagClass::ChainBreak: return "ChainBreak";
  }
  return "?";
}

struct Diagnostic {
  DiagClass cls = DiagClass::WrongRuleApplication;
  std::string lemma;             // name of the enclosing lemma
  std::vector<int> path;         // child indices from the lemma root
  std::vector<std::string> labels;  // offending labels / variables
  std::string message;
};

inline std::string path_to_string(const std::vector<int>& path) {
  std::string s;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) s += '.';
    s += std::to_string(path[i]);
  }
  return s;
}

struct ContextEntry {
  std::string label;
  FormulaRef formula;
};

struct Context {
  std::vector<ContextEntry> entries;
  Mode mode = Mode::Intuitionistic;

  const FormulaRef* lookup(const std::string& label) const {
    for (std::size_t i = entries.size(); i-- > 0;)
      if (entries[i].label == label) return &entries[i].formula;
    return nullptr;
  }
  bool has(const std::string& label) const { return lookup(label) != nullptr; }

  // Extends the context; an existing binding of the same label is shadowed
  // in place so labels stay unique.
  void push(const std::string& label, FormulaRef f) {
    for (ContextEntry& e : entries)
      if (e.label == label) {
        e.formula = std::move(f);
        return;
      }
    entries.push_back({label, std::move(f)});
  }
};

struct CheckStats {
  int node_count = 0;
  int max_depth = 0;
  std::vector<std::string> lemma_deps;  // referenced lemma/axiom names, sorted
};

struct CheckReport {
  bool accepted = true;
  std::vector<Diagnostic> diagnostics;
  CheckStats stats;
};

struct InvalidPath : GpndError {
  using GpndError::GpndError;
};
struct UncheckedLemma : GpndError {
  using GpndError::GpndError;
};

// Replays the context transformations along a path: ImpI, OrE and ExE make
// their discharge hypotheses visible only inside the designated subtrees.
inline Context available_hypotheses(const ProofNode& root, const std::vector<int>& path,
                                    Context ctx) {
  const ProofNode* n = &root;
  for (int idx : path) {
    if (idx < 0 || static_cast<std::size_t>(idx) >= n->children.size())
      throw InvalidPath("path index " + std::to_string(idx) + " out of range");
    const FormulaRef& c = n->conclusion;
    switch (n->rule) {
      case Rule::ImpI:
        if (c->kind == Formula::Kind::Implies) ctx.push(n->labels[0], c->lhs);
        break;
      case Rule::OrE: {
        const FormulaRef& d = n->children[0].conclusion;
        if (d->kind == Formula::Kind::Or) {
          if (idx == 1) ctx.push(n->labels[0], d->lhs);
          if (idx == 2) ctx.push(n->labels[1], d->rhs);
        }
        break;
      }
      case Rule::ExE: {
        const FormulaRef& d = n->children[0].conclusion;
        if (idx == 1 && d->kind == Formula::Kind::Exists)
          ctx.push(n->labels[0], substitute(d->lhs, d->name, Term::var(n->fresh)));
        break;
      }
      default:
        break;
    }
    n = &n->children[idx];
  }
  return ctx;
}

// "C is obtainable from Pa by replacing a subset of the occurrences of a by
// b", checked by simultaneous recursion. Under a binder that captures a
// variable of a or b the replacement is disabled, only plain equality.
inline bool term_rewrites(const Term& u, const Term& v, const Term& a, const Term& b,
                          bool allow) {
  if (allow && u == a && v == b) return true;
  if (u.kind != v.kind || u.name != v.name || u.args.size() != v.args.size()) return false;
  for (std::size_t i = 0; i < u.args.size(); ++i)
    if (!term_rewrites(u.args[i], v.args[i], a, b, allow)) return false;
  return true;
}

inline bool formula_rewrites(const FormulaRef& f, const FormulaRef& g, const Term& a,
                             const Term& b, bool allow) {
  if (f->kind != g->kind) return false;
  switch (f->kind) {
    case Formula::Kind::Atom:
      if (f->name != g->name || f->args.size() != g->args.size()) return false;
      for (std::size_t i = 0; i < f->args.size(); ++i)
        if (!term_rewrites(f->args[i], g->args[i], a, b, allow)) return false;
      return true;
    case Formula::Kind::Bottom:
      return true;
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
      return formula_rewrites(f->lhs, g->lhs, a, b, allow) &&
             formula_rewrites(f->rhs, g->rhs, a, b, allow);
    case Formula::Kind::Forall:
    case Formula::Kind::Exists: {
      if (f->name != g->name) return false;
      bool captured = free_vars(a).count(f->name) || free_vars(b).count(f->name);
      return formula_rewrites(f->lhs, g->lhs, a, b, allow && !captured);
    }
    case Formula::Kind::Equal:
      return term_rewrites(f->tl, g->tl, a, b, allow) &&
             term_rewrites(f->tr, g->tr, a, b, allow);
  }
  return false;
}

class Checker {
 public:
  explicit Checker(const ProofDocument& doc, Mode mode = Mode::Intuitionistic)
      : doc_(doc), mode_(mode) {
    for (std::size_t i = 0; i < doc.lemmas.size(); ++i)
      states_[doc.lemmas[i].name] = {false, false, false, static_cast<int>(i)};
  }

  CheckReport check_document() {
    CheckReport report;
    for (auto& [name, st] : states_) st = {false, false, false, st.index};
    for (std::size_t i = 0; i < doc_.lemmas.size(); ++i) {
      const Lemma& lm = doc_.lemmas[i];
      Run run;
      run.lemma = &lm;
      run.lemma_limit = static_cast<int>(i);
      check_lemma(lm, run);
      LemmaState& st = states_[lm.name];
      st.checked = true;
      st.accepted = run.diags.empty();
      st.classical = run.classical_use;
      report.stats.node_count += run.node_count;
      report.stats.max_depth = std::max(report.stats.max_depth, run.max_depth);
      for (const std::string& d : run.deps) deps_.insert(d);
      report.diagnostics.insert(report.diagnostics.end(), run.diags.begin(), run.diags.end());
    }
    report.stats.lemma_deps.assign(deps_.begin(), deps_.end());
    report.accepted = report.diagnostics.empty();
    return report;
  }

  // Checks a single node (and its subtree) against a context. All lemmas
  // and axioms of the document count as available references.
  std::vector<Diagnostic> check_node(const ProofNode& node, const Context& ctx) const {
    Run run;
    run.lemma_limit = static_cast<int>(doc_.lemmas.size());
    run.assume_all_accepted = true;
    collect_labels(node, run.known_labels);
    for (const ContextEntry& e : ctx.entries) run.known_labels.insert(e.label);
    Context c = ctx;
    c.mode = mode_;
    check_node_rec(node, c, run);
    return run.diags;
  }

  // Elaborates an equational block into a tree of EqI/EqE/Hyp/Conv/AllE/
  // Lemma nodes concluding the chain's equation. Problems are reported in
  // `diags`; the returned tree is meaningful only if none were added.
  ProofNode elaborate_chain(const ProofNode& chain, const Context& ctx,
                            std::vector<Diagnostic>& diags) const {
    Run run;
    run.lemma_limit = static_cast<int>(doc_.lemmas.size());
    run.assume_all_accepted = true;
    ProofNode out = elaborate_chain_impl(chain, ctx, run);
    diags.insert(diags.end(), run.diags.begin(), run.diags.end());
    return out;
  }

  bool lemma_accepted(const std::string& name) const {
    auto it = states_.find(name);
    return it != states_.end() && it->second.checked && it->second.accepted;
  }
  bool lemma_classical(const std::string& name) const {
    auto it = states_.find(name);
    return it != states_.end() && it->second.classical;
  }

 private:
  struct LemmaState {
    bool checked = false;
    bool accepted = false;
    bool classical = false;
    int index = 0;
  };

  struct Run {
    const Lemma* lemma = nullptr;
    int lemma_limit = 0;              // references must have index < limit
    bool assume_all_accepted = false;  // standalone check_node mode
    std::vector<Diagnostic> diags;
    std::vector<int> path;
    std::set<std::string> known_labels;
    std::set<std::string> deps;
    bool classical_use = false;
    int node_count = 0;
    int max_depth = 0;
  };

  const ProofDocument& doc_;
  Mode mode_;
  std::map<std::string, LemmaState> states_;
  std::set<std::string> deps_;

  static void collect_labels(const ProofNode& n, std::set<std::string>& out) {
    if (n.rule == Rule::ImpI || n.rule == Rule::OrE || n.rule == Rule::ExE)
      for (const std::string& l : n.labels) out.insert(l);
    for (const ProofNode& c : n.children) collect_labels(c, out);
  }

  void check_lemma(const Lemma& lm, Run& run) {
    Context ctx;
    ctx.mode = mode_;
    std::set<std::string> seen;
    for (const Hypothesis& h : lm.hypotheses) {
      if (!seen.insert(h.label).second)
        run.diags.push_back({DiagClass::DuplicateLabel, lm.name, {}, {h.label},
                             "duplicate hypothesis label '" + h.label + "'"});
      ctx.push(h.label, h.formula);
      run.known_labels.insert(h.label);
    }
    collect_labels(lm.root, run.known_labels);
    if (!alpha_eq(lm.root.conclusion, lm.goal))
      run.diags.push_back({DiagClass::WrongRuleApplication, lm.name, {}, {},
                           "the root concludes " + to_string(lm.root.conclusion) +
                               " but the lemma states " + to_string(lm.goal)});
    check_node_rec(lm.root, ctx, run);
  }

  void diag(Run& run, DiagClass cls, std::vector<std::string> labels, std::string msg) const {
    run.diags.push_back({cls, run.lemma ? run.lemma->name : std::string(), run.path,
                         std::move(labels), std::move(msg)});
  }

  bool push_discharge(Context& ctx, const std::string& label, FormulaRef f, Run& run) const {
    bool dup = ctx.has(label);
    if (dup)
      diag(run, DiagClass::DuplicateLabel, {label},
           "discharge label '" + label + "' is already in scope");
    ctx.push(label, std::move(f));
    return !dup;
  }

  void check_node_rec(const ProofNode& n, const Context& ctx, Run& run) const {
    ++run.node_count;
    run.max_depth = std::max(run.max_depth, static_cast<int>(run.path.size()) + 1);
    const FormulaRef& C = n.conclusion;
    // contexts the children are checked under; default: unchanged
    std::vector<Context> child_ctx(n.children.size(), ctx);

    auto premise = [&](std::size_t i) -> const FormulaRef& { return n.children[i].conclusion; };
    auto wrong = [&](std::string msg) {
      diag(run, DiagClass::WrongRuleApplication, {}, std::move(msg));
    };

    switch (n.rule) {
      case Rule::Hyp: {
        const std::string& h = n.labels[0];
        if (const FormulaRef* f = ctx.lookup(h)) {
          if (!alpha_eq(C, *f))
            wrong("hypothesis '" + h + "' states " + to_string(*f) + ", not " + to_string(C));
        } else if (run.known_labels.count(h)) {
          diag(run, DiagClass::ScopeViolation, {h},
               "hypothesis '" + h + "' is not available here (outside its scope)");
        } else {
          diag(run, DiagClass::UnknownHypothesis, {h}, "unknown hypothesis '" + h + "'");
        }
        break;
      }
      case Rule::AndI:
        if (C->kind != Formula::Kind::And) {
          wrong("conclusion of AndI is not a conjunction");
        } else {
          if (!alpha_eq(premise(0), C->lhs))
            wrong("first premise must conclude " + to_string(C->lhs));
          if (!alpha_eq(premise(1), C->rhs))
            wrong("second premise must conclude " + to_string(C->rhs));
        }
        break;
      case Rule::AndE1:
      case Rule::AndE2: {
        const FormulaRef& p = premise(0);
        if (p->kind != Formula::Kind::And) {
          wrong("premise of " + std::string(rule_name(n.rule)) + " is not a conjunction");
        } else {
          const FormulaRef& side = n.rule == Rule::AndE1 ? p->lhs : p->rhs;
          if (!alpha_eq(C, side))
            wrong("conclusion must be " + to_string(side) + ", the " +
                  (n.rule == Rule::AndE1 ? "left" : "right") + " component of the premise");
        }
        break;
      }
      case Rule::ImpI: {
        if (C->kind != Formula::Kind::Implies) {
          wrong("conclusion of ImpI is not an implication");
        } else {
          push_discharge(child_ctx[0], n.labels[0], C->lhs, run);
          if (!alpha_eq(premise(0), C->rhs))
            wrong("premise must conclude the consequent " + to_string(C->rhs));
        }
        break;
      }
      case Rule::ImpE: {
        const FormulaRef& p = premise(0);
        if (p->kind != Formula::Kind::Implies) {
          wrong("first premise of ImpE is not an implication");
        } else {
          if (!alpha_eq(premise(1), p->lhs))
            wrong("second premise must prove the antecedent " + to_string(p->lhs));
          if (!alpha_eq(C, p->rhs))
            wrong("conclusion must be the consequent " + to_string(p->rhs));
        }
        break;
      }
      case Rule::OrI1:
      case Rule::OrI2: {
        if (C->kind != Formula::Kind::Or) {
          wrong("conclusion of " + std::string(rule_name(n.rule)) + " is not a disjunction");
        } else {
          const FormulaRef& side = n.rule == Rule::OrI1 ? C->lhs : C->rhs;
          if (!alpha_eq(premise(0), side)) wrong("premise must conclude " + to_string(side));
        }
        break;
      }
      case Rule::OrE: {
        const FormulaRef& d = premise(0);
        if (d->kind != Formula::Kind::Or) {
          wrong("first premise of OrE is not a disjunction");
        } else {
          push_discharge(child_ctx[1], n.labels[0], d->lhs, run);
          push_discharge(child_ctx[2], n.labels[1], d->rhs, run);
          if (!alpha_eq(premise(1), C)) wrong("the left case must conclude " + to_string(C));
          if (!alpha_eq(premise(2), C)) wrong("the right case must conclude " + to_string(C));
        }
        break;
      }
      case Rule::BotE:
        if (premise(0)->kind != Formula::Kind::Bottom)
          wrong("premise of BotE must be " + to_string(bottom()));
        break;
      case Rule::PEM: {
        if (mode_ != Mode::Classical)
          diag(run, DiagClass::ModeViolation, {},
               "PEM is a classical rule; rerun with --classical to allow it");
        run.classical_use = true;
        bool ok = C->kind == Formula::Kind::Or && alpha_eq(C->rhs, negation(C->lhs));
        if (!ok) wrong("conclusion of PEM must have the form A \\/ ~A");
        break;
      }
      case Rule::NNE: {
        if (mode_ != Mode::Classical)
          diag(run, DiagClass::ModeViolation, {},
               "NNE is a classical rule; rerun with --classical to allow it");
        run.classical_use = true;
        if (!alpha_eq(premise(0), negation(negation(C))))
          wrong("premise of NNE must be ~~" + to_string(C, false));
        break;
      }
      case Rule::AllI: {
        if (C->kind != Formula::Kind::Forall) {
          wrong("conclusion of AllI is not universally quantified");
          break;
        }
        FormulaRef expected = substitute(C->lhs, C->name, Term::var(n.fresh));
        if (!alpha_eq(premise(0), expected))
          wrong("premise must conclude " + to_string(expected));
        for (const ContextEntry& e : ctx.entries)
          if (free_vars(e.formula).count(n.fresh))
            diag(run, DiagClass::FreshnessViolation, {n.fresh, e.label},
                 "variable " + n.fresh + " is free in available hypothesis '" + e.label + "'");
        if (free_vars(C).count(n.fresh))
          diag(run, DiagClass::FreshnessViolation, {n.fresh},
               "variable " + n.fresh + " is free in the conclusion");
        break;
      }
      case Rule::AllE: {
        const FormulaRef& p = premise(0);
        const Subst& s = n.substs[0];
        if (p->kind != Formula::Kind::Forall) {
          wrong("premise of AllE is not universally quantified");
        } else if (p->name != s.var) {
          wrong("substitution names '" + s.var + "' but the quantifier binds '" + p->name + "'");
        } else if (!alpha_eq(C, substitute(p->lhs, s.var, s.replacement))) {
          wrong("conclusion must be " + to_string(substitute(p->lhs, s.var, s.replacement)));
        }
        break;
      }
      case Rule::ExI: {
        const Subst& s = n.substs[0];
        if (C->kind != Formula::Kind::Exists) {
          wrong("conclusion of ExI is not existentially quantified");
        } else if (C->name != s.var) {
          wrong("substitution names '" + s.var + "' but the quantifier binds '" + C->name + "'");
        } else if (!alpha_eq(premise(0), substitute(C->lhs, s.var, s.replacement))) {
          wrong("premise must conclude " + to_string(substitute(C->lhs, s.var, s.replacement)));
        }
        break;
      }
      case Rule::ExE: {
        const FormulaRef& p = premise(0);
        if (p->kind != Formula::Kind::Exists) {
          wrong("first premise of ExE is not existentially quantified");
          break;
        }
        FormulaRef witness = substitute(p->lhs, p->name, Term::var(n.fresh));
        push_discharge(child_ctx[1], n.labels[0], witness, run);
        if (!alpha_eq(premise(1), C)) wrong("second premise must conclude " + to_string(C));
        for (const ContextEntry& e : ctx.entries)
          if (free_vars(e.formula).count(n.fresh))
            diag(run, DiagClass::FreshnessViolation, {n.fresh, e.label},
                 "witness variable " + n.fresh + " is free in available hypothesis '" +
                     e.label + "'");
        if (free_vars(C).count(n.fresh))
          diag(run, DiagClass::FreshnessViolation, {n.fresh},
               "witness variable " + n.fresh + " is free in the conclusion");
        if (free_vars(p).count(n.fresh))
          diag(run, DiagClass::FreshnessViolation, {n.fresh},
               "witness variable " + n.fresh + " is free in the existential premise");
        break;
      }
      case Rule::EqI:
        if (C->kind != Formula::Kind::Equal || !(C->tl == C->tr))
          wrong("conclusion of EqI must be t = t");
        break;
      case Rule::EqE: {
        const FormulaRef& eq = premise(0);
        if (eq->kind != Formula::Kind::Equal) {
          wrong("first premise of EqE must be an equation");
        } else if (!formula_rewrites(premise(1), C, eq->tl, eq->tr, true)) {
          wrong("conclusion is not obtainable from " + to_string(premise(1)) +
                " by replacing occurrences of " + to_string(eq->tl) + " with " +
                to_string(eq->tr));
        }
        break;
      }
      case Rule::NatRec: {
        if (!doc_.signature.has_nat()) {
          wrong("NatRec needs the natural-number symbols 0 and S in the signature");
          break;
        }
        if (C->kind != Formula::Kind::Forall) {
          wrong("conclusion of NatRec is not universally quantified");
          break;
        }
        const std::string& v = C->name;
        const FormulaRef& motive = C->lhs;
        FormulaRef base = substitute(motive, v, Term::app("0"));
        FormulaRef step =
            forall(v, implies(motive, substitute(motive, v, Term::app("S", {Term::var(v)}))));
        if (!alpha_eq(premise(0), base)) wrong("base case must conclude " + to_string(base));
        if (!alpha_eq(premise(1), step)) wrong("inductive step must conclude " + to_string(step));
        break;
      }
      case Rule::Conv: {
        try {
          if (!defeq(C, premise(0), doc_.definitions))
            diag(run, DiagClass::ConversionFailure, {},
                 to_string(C) + " and " + to_string(premise(0)) +
                     " are not equal up to definitional unfolding");
        } catch (const CyclicDefinition& e) {
          diag(run, DiagClass::ConversionFailure, {}, e.what());
        }
        break;
      }
      case Rule::Chain:
        elaborate_chain_impl(n, ctx, run);
        break;
      case Rule::LemmaRef:
        check_lemma_ref(n, run);
        break;
    }

    for (std::size_t i = 0; i < n.children.size(); ++i) {
      run.path.push_back(static_cast<int>(i));
      check_node_rec(n.children[i], child_ctx[i], run);
      run.path.pop_back();
    }
  }

  void check_lemma_ref(const ProofNode& n, Run& run) const {
    const FormulaRef& C = n.conclusion;
    std::map<std::string, Term> theta;
    for (const Subst& s : n.substs) theta[s.var] = s.replacement;

    if (const Axiom* ax = doc_.find_axiom(n.ref)) {
      run.deps.insert(n.ref);
      if (!n.children.empty())
        diag(run, DiagClass::UnprovedPremise, {},
             "axiom '" + n.ref + "' takes no premises");
      FormulaRef want = substitute_many(ax->formula, theta);
      if (!alpha_eq(C, want))
        diag(run, DiagClass::WrongRuleApplication, {},
             "conclusion must be the instantiated axiom " + to_string(want));
      return;
    }
    const Lemma* lm = doc_.find_lemma(n.ref);
    if (!lm) {
      diag(run, DiagClass::WrongRuleApplication, {},
           "reference to unknown lemma or axiom '" + n.ref + "'");
      return;
    }
    run.deps.insert(n.ref);
    auto it = states_.find(n.ref);
    const LemmaState& st = it->second;
    if (st.index >= run.lemma_limit) {
      diag(run, DiagClass::WrongRuleApplication, {},
           "lemma '" + n.ref + "' may only be used after it is proved");
      return;
    }
    if (!run.assume_all_accepted) {
      if (!st.checked || !st.accepted) {
        if (st.classical && mode_ == Mode::Intuitionistic)
          diag(run, DiagClass::ModeViolation, {},
               "lemma '" + n.ref + "' needs classical mode");
        else
          diag(run, DiagClass::UnprovedPremise, {},
               "lemma '" + n.ref + "' was not accepted and cannot be used");
        return;
      }
      if (st.classical) {
        if (mode_ == Mode::Intuitionistic) {
          diag(run, DiagClass::ModeViolation, {}, "lemma '" + n.ref + "' needs classical mode");
          return;
        }
        run.classical_use = true;
      }
    }
    if (n.children.size() != lm->hypotheses.size()) {
      diag(run, DiagClass::UnprovedPremise, {},
           "lemma '" + n.ref + "' has " + std::to_string(lm->hypotheses.size()) +
               " hypotheses but " + std::to_string(n.children.size()) + " premises were given");
      return;
    }
    for (std::size_t i = 0; i < lm->hypotheses.size(); ++i) {
      FormulaRef want = substitute_many(lm->hypotheses[i].formula, theta);
      if (!alpha_eq(n.children[i].conclusion, want))
        diag(run, DiagClass::WrongRuleApplication, {lm->hypotheses[i].label},
             "premise " + std::to_string(i + 1) + " must conclude " + to_string(want));
    }
    FormulaRef want = substitute_many(lm->goal, theta);
    if (!alpha_eq(C, want))
      diag(run, DiagClass::WrongRuleApplication, {},
           "conclusion must be the instantiated statement " + to_string(want));
  }

  // --- equational blocks ----------------------------------------------------

  // Resolves a step justification to a proof of an equation: a hypothesis,
  // an axiom or a hypothesis-free lemma, then Conv unfolds and AllE
  // instantiations until an equation surfaces.
  bool resolve_justification(const ChainStep& st, const Context& ctx, Run& run,
                             ProofNode& out) const {
    ProofNode cur;
    if (const FormulaRef* f = ctx.lookup(st.just)) {
      cur.rule = Rule::Hyp;
      cur.labels.push_back(st.just);
      cur.conclusion = *f;
    } else if (const Axiom* ax = doc_.find_axiom(st.just)) {
      run.deps.insert(st.just);
      cur.rule = Rule::LemmaRef;
      cur.ref = st.just;
      cur.conclusion = ax->formula;
    } else if (const Lemma* lm = doc_.find_lemma(st.just)) {
      run.deps.insert(st.just);
      auto it = states_.find(st.just);
      if (it->second.index >= run.lemma_limit ||
          (!run.assume_all_accepted && !(it->second.checked && it->second.accepted))) {
        diag(run, DiagClass::UnprovedPremise, {},
             "justification '" + st.just + "' refers to a lemma that is not yet proved");
        return false;
      }
      if (!lm->hypotheses.empty()) {
        diag(run, DiagClass::WrongRuleApplication, {},
             "justification '" + st.just + "' has open hypotheses and cannot justify a step");
        return false;
      }
      cur.rule = Rule::LemmaRef;
      cur.ref = st.just;
      cur.conclusion = lm->goal;
    } else if (run.known_labels.count(st.just)) {
      diag(run, DiagClass::ScopeViolation, {st.just},
           "justification '" + st.just + "' is not available here (outside its scope)");
      return false;
    } else {
      diag(run, DiagClass::UnknownHypothesis, {st.just},
           "unknown justification '" + st.just + "'");
      return false;
    }
    cur.pos = st.pos;

    std::size_t si = 0;
    for (;;) {
      const FormulaRef& f = cur.conclusion;
      if (f->kind == Formula::Kind::Equal) break;
      if (f->kind == Formula::Kind::Forall && si < st.just_substs.size()) {
        const Subst& s = st.just_substs[si++];
        if (s.var != f->name) {
          diag(run, DiagClass::WrongRuleApplication, {},
               "substitution names '" + s.var + "' but the quantifier binds '" + f->name + "'");
          return false;
        }
        ProofNode alle;
        alle.rule = Rule::AllE;
        alle.substs.push_back(s);
        alle.conclusion = substitute(f->lhs, s.var, s.replacement);
        alle.pos = st.pos;
        alle.children.push_back(std::move(cur));
        cur = std::move(alle);
        continue;
      }
      if (f->kind == Formula::Kind::Atom) {
        if (const Definition* d = find_definition(doc_.definitions, f->name)) {
          ProofNode conv;
          conv.rule = Rule::Conv;
          conv.ref = f->name;
          conv.conclusion = unfold_once(f, *d);
          conv.pos = st.pos;
          conv.children.push_back(std::move(cur));
          cur = std::move(conv);
          continue;
        }
      }
      diag(run, DiagClass::WrongRuleApplication, {},
           "justification '" + st.just + "' does not yield an equation (it states " +
               to_string(f) + ")");
      return false;
    }
    if (si < st.just_substs.size()) {
      diag(run, DiagClass::WrongRuleApplication, {},
           "justification '" + st.just + "' has more substitutions than quantifiers");
      return false;
    }
    out = std::move(cur);
    return true;
  }

  ProofNode elaborate_chain_impl(const ProofNode& chain, const Context& ctx, Run& run) const {
    const FormulaRef& C = chain.conclusion;
    auto broke = [&](std::string msg) { diag(run, DiagClass::ChainBreak, {}, std::move(msg)); };
    if (C->kind != Formula::Kind::Equal) {
      broke("a chain must conclude an equation");
      return chain;
    }
    if (chain.steps.empty()) {
      broke("a chain needs at least one step");
      return chain;
    }
    std::size_t before = run.diags.size();
    if (!(chain.steps.front().lhs == C->tl))
      broke("the first step starts from " + to_string(chain.steps.front().lhs) +
            " but the conclusion starts from " + to_string(C->tl));
    for (std::size_t i = 1; i < chain.steps.size(); ++i)
      if (!(chain.steps[i].lhs == chain.steps[i - 1].rhs))
        broke("step " + std::to_string(i + 1) + " starts from " +
              to_string(chain.steps[i].lhs) + " but the previous step ended at " +
              to_string(chain.steps[i - 1].rhs));
    if (!(chain.steps.back().rhs == C->tr))
      broke("the last step ends at " + to_string(chain.steps.back().rhs) +
            " but the conclusion ends at " + to_string(C->tr));
    if (run.diags.size() != before) return chain;

    ProofNode acc;
    acc.rule = Rule::EqI;
    acc.conclusion = equals(C->tl, C->tl);
    acc.pos = chain.pos;

    for (const ChainStep& st : chain.steps) {
      if (st.just == "EqI") {
        if (!(st.lhs == st.rhs))
          diag(run, DiagClass::WrongRuleApplication, {},
               "EqI only justifies a reflexive step, but " + to_string(st.lhs) +
                   " and " + to_string(st.rhs) + " differ");
        continue;
      }
      ProofNode just;
      if (!resolve_justification(st, ctx, run, just)) continue;
      const FormulaRef& eq = just.conclusion;
      const Term& a = eq->tl;
      const Term& b = eq->tr;
      if (term_rewrites(st.lhs, st.rhs, a, b, true)) {
        ProofNode eqe;
        eqe.rule = Rule::EqE;
        eqe.conclusion = equals(C->tl, st.rhs);
        eqe.pos = st.pos;
        eqe.children.push_back(std::move(just));
        eqe.children.push_back(std::move(acc));
        acc = std::move(eqe);
      } else if (term_rewrites(st.lhs, st.rhs, b, a, true)) {
        // reversed orientation: derive b = a by rewriting inside a = a
        ProofNode refl;
        refl.rule = Rule::EqI;
        refl.conclusion = equals(a, a);
        refl.pos = st.pos;
        ProofNode sym;
        sym.rule = Rule::EqE;
        sym.conclusion = equals(b, a);
        sym.pos = st.pos;
        sym.children.push_back(std::move(just));
        sym.children.push_back(std::move(refl));
        ProofNode eqe;
        eqe.rule = Rule::EqE;
        eqe.conclusion = equals(C->tl, st.rhs);
        eqe.pos = st.pos;
        eqe.children.push_back(std::move(sym));
        eqe.children.push_back(std::move(acc));
        acc = std::move(eqe);
      } else {
        diag(run, DiagClass::WrongRuleApplication, {},
             "justification '" + st.just + "' proves " + to_string(eq) +
                 ", which does not rewrite " + to_string(st.lhs) + " to " + to_string(st.rhs));
      }
    }
    return acc;
  }
};

inline CheckReport check_document(const ProofDocument& doc, Mode mode = Mode::Intuitionistic) {
  return Checker(doc, mode).check_document();
}

// A checked lemma viewed as a derived inference rule: its hypotheses are the
// premises and its goal the conclusion. Registration never extends the
// trusted rule set; every use is justified by the stored proof.
struct DerivedRule {
  std::string name;
  std::vector<FormulaRef> premises;
  FormulaRef conclusion;
};

inline DerivedRule derive_rule(const Lemma& lm, const ProofDocument& doc,
                               Mode mode = Mode::Intuitionistic) {
  Checker checker(doc, mode);
  checker.check_document();
  if (!checker.lemma_accepted(lm.name))
    throw UncheckedLemma("lemma '" + lm.name + "' is not accepted by the checker");
  DerivedRule r;
  r.name = lm.name;
  for (const Hypothesis& h : lm.hypotheses) r.premises.push_back(h.formula);
  r.conclusion = lm.goal;
  return r;
}

}  // namespace gpnd
