#pragma once
// First-order terms and formulas with named binders, plus the syntactic
// operations everything else is built on: free variables, capture-avoiding
// substitution, alpha-equivalence and definitional unfolding.
//
// ~A is stored as A -> _|_ and A <-> B as (A -> B) /\ (B -> A); the iff
// case carries a display hint so the printer can restore the sugar.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gpnd {

struct GpndError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CyclicDefinition : GpndError {
  using GpndError::GpndError;
};

// ---------------------------------------------------------------------------
// Terms

struct Term {
  enum class Kind { Var, App };

  Kind kind = Kind::Var;
  std::string name;
  std::vector<Term> args;  // App only; a constant is an App with no arguments

  static Term var(std::string n) { return {Kind::Var, std::move(n), {}}; }
  static Term app(std::string f, std::vector<Term> a = {}) {
    return {Kind::App, std::move(f), std::move(a)};
  }
  bool is_var() const { return kind == Kind::Var; }
};

inline bool operator==(const Term& a, const Term& b) {
  return a.kind == b.kind && a.name == b.name && a.args == b.args;
}
inline bool operator!=(const Term& a, const Term& b) { return !(a == b); }

inline void free_vars_into(const Term& t, std::set<std::string>& out) {
  if (t.is_var()) {
    out.insert(t.name);
    return;
  }
  for (const Term& a : t.args) free_vars_into(a, out);
}

inline std::set<std::string> free_vars(const Term& t) {
  std::set<std::string> out;
  free_vars_into(t, out);
  return out;
}

inline Term substitute(const Term& t, const std::map<std::string, Term>& sub) {
  if (t.is_var()) {
    auto it = sub.find(t.name);
    return it == sub.end() ? t : it->second;
  }
  Term out = t;
  for (Term& a : out.args) a = substitute(a, sub);
  return out;
}

inline Term substitute(const Term& t, const std::string& x, const Term& r) {
  return substitute(t, std::map<std::string, Term>{{x, r}});
}

// ---------------------------------------------------------------------------
// Formulas

struct Formula;
using FormulaRef = std::shared_ptr<const Formula>;

struct Formula {
  enum class Kind { Atom, And, Or, Implies, Bottom, Forall, Exists, Equal };

  Kind kind = Kind::Bottom;
  std::string name;        // Atom: predicate; Forall/Exists: bound variable
  std::vector<Term> args;  // Atom only
  FormulaRef lhs, rhs;     // And/Or/Implies children; quantifier body in lhs
  Term tl, tr;             // Equal only
  bool iff_hint = false;   // And node that was written as <->
};

inline FormulaRef atom(std::string p, std::vector<Term> args = {}) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Atom;
  f->name = std::move(p);
  f->args = std::move(args);
  return f;
}

inline FormulaRef bottom() {
  static const FormulaRef b = [] {
    auto f = std::make_shared<Formula>();
    f->kind = Formula::Kind::Bottom;
    return FormulaRef(f);
  }();
  return b;
}

inline FormulaRef conj(FormulaRef a, FormulaRef b, bool iff_hint = false) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::And;
  f->lhs = std::move(a);
  f->rhs = std::move(b);
  f->iff_hint = iff_hint;
  return f;
}

inline FormulaRef disj(FormulaRef a, FormulaRef b) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Or;
  f->lhs = std::move(a);
  f->rhs = std::move(b);
  return f;
}

inline FormulaRef implies(FormulaRef a, FormulaRef b) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Implies;
  f->lhs = std::move(a);
  f->rhs = std::move(b);
  return f;
}

inline FormulaRef negation(FormulaRef a) { return implies(std::move(a), bottom()); }

inline FormulaRef iff(FormulaRef a, FormulaRef b) {
  return conj(implies(a, b), implies(b, a), true);
}

inline FormulaRef forall(std::string x, FormulaRef body) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Forall;
  f->name = std::move(x);
  f->lhs = std::move(body);
  return f;
}

inline FormulaRef exists(std::string x, FormulaRef body) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Exists;
  f->name = std::move(x);
  f->lhs = std::move(body);
  return f;
}

inline FormulaRef equals(Term a, Term b) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Equal;
  f->tl = std::move(a);
  f->tr = std::move(b);
  return f;
}

inline FormulaRef quantifier(Formula::Kind k, std::string x, FormulaRef body) {
  return k == Formula::Kind::Forall ? forall(std::move(x), std::move(body))
                                    : exists(std::move(x), std::move(body));
}

inline bool is_negation(const FormulaRef& f) {
  return f->kind == Formula::Kind::Implies && f->rhs->kind == Formula::Kind::Bottom;
}

// Structural equality on formulas, binder names included; display hints are
// ignored since they never change meaning.
inline bool equal(const FormulaRef& a, const FormulaRef& b) {
  if (a == b) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Formula::Kind::Atom:
      return a->name == b->name && a->args == b->args;
    case Formula::Kind::Bottom:
      return true;
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
      return equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
      return a->name == b->name && equal(a->lhs, b->lhs);
    case Formula::Kind::Equal:
      return a->tl == b->tl && a->tr == b->tr;
  }
  return false;
}

inline bool is_iff_sugar(const FormulaRef& f) {
  return f->iff_hint && f->kind == Formula::Kind::And &&
         f->lhs->kind == Formula::Kind::Implies &&
         f->rhs->kind == Formula::Kind::Implies &&
         equal(f->lhs->lhs, f->rhs->rhs) && equal(f->lhs->rhs, f->rhs->lhs);
}

// ---------------------------------------------------------------------------
// Free variables and substitution

inline void free_vars_rec(const FormulaRef& f, std::vector<std::string>& bound,
                          std::set<std::string>& out) {
  auto term_vars = [&](const Term& t) {
    std::set<std::string> vs;
    free_vars_into(t, vs);
    for (const std::string& v : vs) {
      bool is_bound = false;
      for (const std::string& b : bound)
        if (b == v) {
          is_bound = true;
          break;
        }
      if (!is_bound) out.insert(v);
    }
  };
  switch (f->kind) {
    case Formula::Kind::Atom:
      for (const Term& t : f->args) term_vars(t);
      break;
    case Formula::Kind::Bottom:
      break;
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
      free_vars_rec(f->lhs, bound, out);
      free_vars_rec(f->rhs, bound, out);
      break;
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
      bound.push_back(f->name);
      free_vars_rec(f->lhs, bound, out);
      bound.pop_back();
      break;
    case Formula::Kind::Equal:
      term_vars(f->tl);
      term_vars(f->tr);
      break;
  }
}

inline std::set<std::string> free_vars(const FormulaRef& f) {
  std::set<std::string> out;
  std::vector<std::string> bound;
  free_vars_rec(f, bound, out);
  return out;
}

// Smallest primed suffix not in `avoid`: y -> y' -> y'' -> ...
inline std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  std::string cand = base;
  do {
    cand += '\'';
  } while (avoid.count(cand));
  return cand;
}

// Simultaneous capture-avoiding substitution of free variables.
inline FormulaRef substitute_many(const FormulaRef& f, const std::map<std::string, Term>& sub) {
  if (sub.empty()) return f;
  switch (f->kind) {
    case Formula::Kind::Atom: {
      std::vector<Term> args;
      args.reserve(f->args.size());
      for (const Term& t : f->args) args.push_back(substitute(t, sub));
      return atom(f->name, std::move(args));
    }
    case Formula::Kind::Bottom:
      return f;
    case Formula::Kind::And:
      return conj(substitute_many(f->lhs, sub), substitute_many(f->rhs, sub), f->iff_hint);
    case Formula::Kind::Or:
      return disj(substitute_many(f->lhs, sub), substitute_many(f->rhs, sub));
    case Formula::Kind::Implies:
      return implies(substitute_many(f->lhs, sub), substitute_many(f->rhs, sub));
    case Formula::Kind::Equal:
      return equals(substitute(f->tl, sub), substitute(f->tr, sub));
    case Formula::Kind::Forall:
    case Formula::Kind::Exists: {
      std::map<std::string, Term> inner = sub;
      inner.erase(f->name);
      std::set<std::string> body_fv = free_vars(f->lhs);
      for (auto it = inner.begin(); it != inner.end();) {
        if (!body_fv.count(it->first))
          it = inner.erase(it);
        else
          ++it;
      }
      if (inner.empty()) return f;
      std::set<std::string> image;
      for (const auto& [k, t] : inner) free_vars_into(t, image);
      std::string binder = f->name;
      FormulaRef body = f->lhs;
      if (image.count(binder)) {
        std::set<std::string> avoid = body_fv;
        avoid.insert(image.begin(), image.end());
        for (const auto& [k, t] : inner) avoid.insert(k);
        std::string nb = fresh_name(binder, avoid);
        body = substitute_many(body, {{binder, Term::var(nb)}});
        binder = nb;
      }
      return quantifier(f->kind, std::move(binder), substitute_many(body, inner));
    }
  }
  return f;
}

inline FormulaRef substitute(const FormulaRef& f, const std::string& x, const Term& t) {
  return substitute_many(f, {{x, t}});
}

// ---------------------------------------------------------------------------
// Alpha-equivalence via a canonical nameless key

inline void alpha_key_term(const Term& t, const std::vector<std::string>& bound,
                           std::string& out) {
  if (t.is_var()) {
    for (std::size_t i = bound.size(); i-- > 0;) {
      if (bound[i] == t.name) {
        out += '#';
        out += std::to_string(bound.size() - 1 - i);
        return;
      }
    }
    out += 'v';
    out += t.name;
    return;
  }
  out += '(';
  out += t.name;
  for (const Term& a : t.args) {
    out += ' ';
    alpha_key_term(a, bound, out);
  }
  out += ')';
}

inline void alpha_key_rec(const FormulaRef& f, std::vector<std::string>& bound,
                          std::string& out) {
  switch (f->kind) {
    case Formula::Kind::Atom:
      out += "(P ";
      out += f->name;
      for (const Term& t : f->args) {
        out += ' ';
        alpha_key_term(t, bound, out);
      }
      out += ')';
      break;
    case Formula::Kind::Bottom:
      out += '_';
      break;
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies: {
      out += '(';
      out += f->kind == Formula::Kind::And ? '&' : f->kind == Formula::Kind::Or ? '|' : '>';
      out += ' ';
      alpha_key_rec(f->lhs, bound, out);
      out += ' ';
      alpha_key_rec(f->rhs, bound, out);
      out += ')';
      break;
    }
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
      out += f->kind == Formula::Kind::Forall ? "(A " : "(E ";
      bound.push_back(f->name);
      alpha_key_rec(f->lhs, bound, out);
      bound.pop_back();
      out += ')';
      break;
    case Formula::Kind::Equal:
      out += "(= ";
      alpha_key_term(f->tl, bound, out);
      out += ' ';
      alpha_key_term(f->tr, bound, out);
      out += ')';
      break;
  }
}

inline std::string alpha_key(const FormulaRef& f) {
  std::string out;
  std::vector<std::string> bound;
  alpha_key_rec(f, bound, out);
  return out;
}

inline bool alpha_eq(const FormulaRef& a, const FormulaRef& b) {
  if (a == b) return true;
  return alpha_key(a) == alpha_key(b);
}

// ---------------------------------------------------------------------------
// Signatures and definitions

struct Signature {
  std::map<std::string, int> functions;
  std::map<std::string, int> predicates;

  bool has_nat() const {
    auto z = functions.find("0");
    auto s = functions.find("S");
    return z != functions.end() && z->second == 0 && s != functions.end() && s->second == 1;
  }
};

struct Definition {
  std::string name;
  std::vector<std::string> params;
  FormulaRef body;  // free variables of body are a subset of params
};

inline const Definition* find_definition(const std::vector<Definition>& defs,
                                         const std::string& name) {
  for (const Definition& d : defs)
    if (d.name == name) return &d;
  return nullptr;
}

inline void collect_atom_names(const FormulaRef& f, std::set<std::string>& out) {
  switch (f->kind) {
    case Formula::Kind::Atom:
      out.insert(f->name);
      break;
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies:
      collect_atom_names(f->lhs, out);
      collect_atom_names(f->rhs, out);
      break;
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
      collect_atom_names(f->lhs, out);
      break;
    default:
      break;
  }
}

inline void check_definitions_acyclic(const std::vector<Definition>& defs) {
  std::map<std::string, int> color;  // 0 unvisited, 1 active, 2 done
  std::function<void(const Definition&)> visit = [&](const Definition& d) {
    int& c = color[d.name];
    if (c == 2) return;
    if (c == 1) throw CyclicDefinition("cyclic definition involving '" + d.name + "'");
    c = 1;
    std::set<std::string> names;
    collect_atom_names(d.body, names);
    for (const std::string& n : names)
      if (const Definition* e = find_definition(defs, n)) visit(*e);
    c = 2;
  };
  for (const Definition& d : defs) visit(d);
}

inline FormulaRef unfold_once(const FormulaRef& f, const Definition& d) {
  if (f->args.size() != d.params.size())
    throw GpndError("definition '" + d.name + "' applied with wrong arity");
  std::map<std::string, Term> sub;
  for (std::size_t i = 0; i < d.params.size(); ++i) sub[d.params[i]] = f->args[i];
  return substitute_many(d.body, sub);
}

inline FormulaRef unfold_all(const FormulaRef& f, const std::vector<Definition>& defs,
                             long& fuel) {
  if (--fuel <= 0) throw CyclicDefinition("definition unfolding did not terminate");
  switch (f->kind) {
    case Formula::Kind::Atom:
      if (const Definition* d = find_definition(defs, f->name))
        return unfold_all(unfold_once(f, *d), defs, fuel);
      return f;
    case Formula::Kind::Bottom:
    case Formula::Kind::Equal:
      return f;
    case Formula::Kind::And:
      return conj(unfold_all(f->lhs, defs, fuel), unfold_all(f->rhs, defs, fuel), f->iff_hint);
    case Formula::Kind::Or:
      return disj(unfold_all(f->lhs, defs, fuel), unfold_all(f->rhs, defs, fuel));
    case Formula::Kind::Implies:
      return implies(unfold_all(f->lhs, defs, fuel), unfold_all(f->rhs, defs, fuel));
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
      return quantifier(f->kind, f->name, unfold_all(f->lhs, defs, fuel));
  }
  return f;
}

inline FormulaRef unfold_all(const FormulaRef& f, const std::vector<Definition>& defs) {
  long fuel = 1000000;
  return unfold_all(f, defs, fuel);
}

// Definitional equality: unfold every defined predicate on both sides, then
// compare up to alpha. Terminates because definitions are acyclic; the fuel
// turns an accidental cycle into CyclicDefinition instead of a hang.
inline bool defeq(const FormulaRef& a, const FormulaRef& b,
                  const std::vector<Definition>& defs) {
  if (alpha_eq(a, b)) return true;
  return alpha_eq(unfold_all(a, defs), unfold_all(b, defs));
}

// ---------------------------------------------------------------------------
// Printing

namespace detail {
// term precedence: + is 1, * is 2, everything else atomic (3)
inline void term_str(const Term& t, int min_prec, std::string& out) {
  if (t.is_var()) {
    out += t.name;
    return;
  }
  if (t.name == "+" && t.args.size() == 2) {
    bool paren = min_prec > 1;
    if (paren) out += '(';
    term_str(t.args[0], 1, out);
    out += " + ";
    term_str(t.args[1], 2, out);
    if (paren) out += ')';
    return;
  }
  if (t.name == "*" && t.args.size() == 2) {
    bool paren = min_prec > 2;
    if (paren) out += '(';
    term_str(t.args[0], 2, out);
    out += " * ";
    term_str(t.args[1], 3, out);
    if (paren) out += ')';
    return;
  }
  out += t.name;
  if (t.name == "0" && t.args.empty()) return;  // numeral constant
  out += '(';
  for (std::size_t i = 0; i < t.args.size(); ++i) {
    if (i) out += ", ";
    term_str(t.args[i], 0, out);
  }
  out += ')';
}
}  // namespace detail

inline std::string to_string(const Term& t) {
  std::string out;
  detail::term_str(t, 0, out);
  return out;
}

namespace detail {
struct ConnectiveSyms {
  const char* neg;
  const char* conj;
  const char* disj;
  const char* impl;
  const char* iff;
  const char* bot;
  const char* all;
  const char* ex;
};
inline const ConnectiveSyms& syms(bool unicode) {
  static const ConnectiveSyms ascii{"~", " /\\ ", " \\/ ", " -> ", " <-> ", "_|_", "forall ", "exists "};
  static const ConnectiveSyms uni{"¬", " ∧ ", " ∨ ", " → ", " ↔ ", "⊥", "∀", "∃"};
  return unicode ? uni : ascii;
}

// formula precedence: quantifier 0, <-> 1, -> 2, \/ 3, /\ 4, ~ 5, = 6, atom 7
inline void formula_str(const FormulaRef& f, int min_prec, bool uni, std::string& out) {
  const ConnectiveSyms& s = syms(uni);
  auto wrap = [&](int prec, auto&& body) {
    bool paren = prec < min_prec;
    if (paren) out += '(';
    body();
    if (paren) out += ')';
  };
  switch (f->kind) {
    case Formula::Kind::Atom:
      out += f->name;
      if (!f->args.empty()) {
        out += '(';
        for (std::size_t i = 0; i < f->args.size(); ++i) {
          if (i) out += ", ";
          term_str(f->args[i], 0, out);
        }
        out += ')';
      }
      break;
    case Formula::Kind::Bottom:
      out += s.bot;
      break;
    case Formula::Kind::Equal:
      wrap(6, [&] {
        term_str(f->tl, 0, out);
        out += " = ";
        term_str(f->tr, 0, out);
      });
      break;
    case Formula::Kind::Implies:
      if (is_negation(f)) {
        wrap(5, [&] {
          out += s.neg;
          formula_str(f->lhs, 5, uni, out);
        });
      } else {
        wrap(2, [&] {
          formula_str(f->lhs, 3, uni, out);
          out += s.impl;
          formula_str(f->rhs, 2, uni, out);
        });
      }
      break;
    case Formula::Kind::And:
      if (is_iff_sugar(f)) {
        wrap(1, [&] {
          formula_str(f->lhs->lhs, 2, uni, out);
          out += s.iff;
          formula_str(f->lhs->rhs, 2, uni, out);
        });
      } else {
        wrap(4, [&] {
          formula_str(f->lhs, 5, uni, out);
          out += s.conj;
          formula_str(f->rhs, 4, uni, out);
        });
      }
      break;
    case Formula::Kind::Or:
      wrap(3, [&] {
        formula_str(f->lhs, 4, uni, out);
        out += s.disj;
        formula_str(f->rhs, 3, uni, out);
      });
      break;
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
      wrap(0, [&] {
        out += f->kind == Formula::Kind::Forall ? s.all : s.ex;
        out += f->name;
        out += ". ";
        formula_str(f->lhs, 0, uni, out);
      });
      break;
  }
}
}  // namespace detail

inline std::string to_string(const FormulaRef& f, bool unicode = false) {
  std::string out;
  detail::formula_str(f, 0, unicode, out);
  return out;
}

}  // namespace gpnd
