#pragma once
// Serializer for proof documents. print_document(parse_document(s)) parses
// back to a structurally equal document; ~ and <-> sugar is restored from
// the representation (~ structurally, <-> from the parse-time hint).

#include <string>

#include "gpnd/document.hpp"
#include "gpnd/syntax.hpp"

namespace gpnd {

namespace detail {

inline void print_subst(const Subst& s, std::string& out) {
  out += '{';
  out += s.var;
  out += " := ";
  out += to_string(s.replacement);
  out += '}';
}

inline void print_node(const ProofNode& n, int indent, bool unicode, std::string& out) {
  out += '(';
  out += rule_name(n.rule);
  switch (n.rule) {
    case Rule::Hyp:
      out += ' ';
      out += n.labels[0];
      break;
    case Rule::ImpI:
      out += " [" + n.labels[0] + "]";
      break;
    case Rule::OrE:
      out += " [" + n.labels[0] + "] [" + n.labels[1] + "]";
      break;
    case Rule::ExE:
      out += " [" + n.labels[0] + "] {" + n.fresh + "}";
      break;
    case Rule::AllI:
      out += " {" + n.fresh + "}";
      break;
    case Rule::AllE:
    case Rule::ExI:
      out += ' ';
      print_subst(n.substs[0], out);
      break;
    case Rule::Conv:
      if (!n.ref.empty()) out += ' ' + n.ref;
      break;
    case Rule::LemmaRef:
      out += ' ' + n.ref;
      for (const Subst& s : n.substs) {
        out += ' ';
        print_subst(s, out);
      }
      break;
    default:
      break;
  }
  out += " : ";
  out += to_string(n.conclusion, unicode);
  std::string pad(static_cast<std::size_t>(indent) + 2, ' ');
  if (n.rule == Rule::Chain) {
    for (std::size_t i = 0; i < n.steps.size(); ++i) {
      const ChainStep& st = n.steps[i];
      out += '\n';
      out += pad;
      out += to_string(st.lhs);
      out += " = ";
      out += to_string(st.rhs);
      out += " by ";
      out += st.just;
      for (const Subst& s : st.just_substs) {
        out += ' ';
        print_subst(s, out);
      }
      if (i + 1 < n.steps.size()) out += " ;";
    }
  } else {
    for (const ProofNode& c : n.children) {
      out += '\n';
      out += pad;
      print_node(c, indent + 2, unicode, out);
    }
  }
  out += ')';
}

}  // namespace detail

inline std::string print_lemma(const Lemma& lm, bool unicode = false) {
  std::string out = "lemma " + lm.name;
  if (!lm.hypotheses.empty()) {
    out += " [";
    for (std::size_t i = 0; i < lm.hypotheses.size(); ++i) {
      if (i) out += ", ";
      out += lm.hypotheses[i].label + " : " + to_string(lm.hypotheses[i].formula, unicode);
    }
    out += ']';
  }
  out += " : " + to_string(lm.goal, unicode) + "\nproof ";
  detail::print_node(lm.root, 0, unicode, out);
  out += '\n';
  return out;
}

inline std::string print_document(const ProofDocument& doc, bool unicode = false) {
  std::string out;
  for (const Definition& d : doc.definitions) {
    out += "def " + d.name + "(";
    for (std::size_t i = 0; i < d.params.size(); ++i) {
      if (i) out += ", ";
      out += d.params[i];
    }
    out += ") := " + to_string(d.body, unicode) + "\n";
  }
  if (!doc.definitions.empty()) out += '\n';
  for (const Axiom& a : doc.axioms) out += "axiom " + a.name + " : " + to_string(a.formula, unicode) + "\n";
  if (!doc.axioms.empty()) out += '\n';
  for (const Lemma& lm : doc.lemmas) {
    out += print_lemma(lm, unicode);
    out += '\n';
  }
  return out;
}

}  // namespace gpnd
