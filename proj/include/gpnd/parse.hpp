#pragma once
// Lexer and parser for the .gpnd document format.
//
//   document := (defn | axiom | lemma)*
//   defn     := "def" NAME "(" params? ")" ":=" formula
//   axiom    := "axiom" NAME ":" formula
//   lemma    := "lemma" NAME hyps? ":" formula "proof" node
//   hyps     := "[" label ":" formula ("," label ":" formula)* "]"
//   node     := "(" RULE annots ":" formula node* ")"
//
// The parser enforces structural validity only: fixed child counts, one
// arity per symbol, unique names. Logical validity is the kernel's job.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gpnd/document.hpp"
#include "gpnd/syntax.hpp"

namespace gpnd {

struct ParseError : GpndError {
  int line, col;
  ParseError(int l, int c, const std::string& msg)
      : GpndError(std::to_string(l) + ":" + std::to_string(c) + ": " + msg), line(l), col(c) {}
};

struct ArityConflict : ParseError {
  using ParseError::ParseError;
};

struct DuplicateName : ParseError {
  using ParseError::ParseError;
};

namespace detail {

enum class Tok {
  Ident,
  Number,
  LParen,
  RParen,
  LBrack,
  RBrack,
  LBrace,
  RBrace,
  Comma,
  Semi,
  Colon,
  Dot,
  Assign,  // :=
  Arrow,   // ->
  IffOp,   // <->
  AndOp,
  OrOp,
  NotOp,   // ~
  BotTok,  // _|_
  EqOp,    // =
  Plus,
  Star,
  KwDef,
  KwAxiom,
  KwLemma,
  KwProof,
  KwForall,
  KwExists,
  KwBy,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  int line, col;
};

inline bool ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
inline bool ident_char(char c) {
  return ident_start(c) || (c >= '0' && c <= '9') || c == '\'';
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : s_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_ws();
      int line = line_, col = col_;
      if (eof()) {
        out.push_back({Tok::End, "", line, col});
        return out;
      }
      out.push_back(scan(line, col));
    }
  }

 private:
  std::string_view s_;
  std::size_t i_ = 0;
  int line_ = 1, col_ = 1;

  bool eof() const { return i_ >= s_.size(); }
  char cur() const { return s_[i_]; }
  bool has(std::size_t n) const { return i_ + n <= s_.size(); }
  bool starts(std::string_view p) const { return s_.substr(i_).substr(0, p.size()) == p; }

  void advance(std::size_t n = 1) {
    for (std::size_t k = 0; k < n && i_ < s_.size(); ++k) {
      char c = s_[i_++];
      if (c == '\n') {
        ++line_;
        col_ = 1;
      } else if ((c & 0xC0) != 0x80) {  // do not count UTF-8 continuation bytes
        ++col_;
      }
    }
  }

  void skip_ws() {
    while (!eof()) {
      char c = cur();
      if (c == '#') {
        while (!eof() && cur() != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else {
        return;
      }
    }
  }

  Token tok(Tok k, std::string_view text, int line, int col) {
    advance(text.size());
    return {k, std::string(text), line, col};
  }

  Token scan(int line, int col) {
    char c = cur();
    // multi-character ASCII operators first
    if (starts(":=")) return tok(Tok::Assign, ":=", line, col);
    if (starts("<->")) return tok(Tok::IffOp, "<->", line, col);
    if (starts("->")) return tok(Tok::Arrow, "->", line, col);
    if (starts("/\\")) return tok(Tok::AndOp, "/\\", line, col);
    if (starts("\\/")) return tok(Tok::OrOp, "\\/", line, col);
    if (starts("_|_")) return tok(Tok::BotTok, "_|_", line, col);
    // UTF-8 aliases
    if (starts("∀")) return tok(Tok::KwForall, "∀", line, col);
    if (starts("∃")) return tok(Tok::KwExists, "∃", line, col);
    if (starts("¬")) return tok(Tok::NotOp, "¬", line, col);
    if (starts("∧")) return tok(Tok::AndOp, "∧", line, col);
    if (starts("∨")) return tok(Tok::OrOp, "∨", line, col);
    if (starts("→")) return tok(Tok::Arrow, "→", line, col);
    if (starts("↔")) return tok(Tok::IffOp, "↔", line, col);
    if (starts("≡")) return tok(Tok::IffOp, "≡", line, col);
    if (starts("⊥")) return tok(Tok::BotTok, "⊥", line, col);
    switch (c) {
      case '(': return tok(Tok::LParen, "(", line, col);
      case ')': return tok(Tok::RParen, ")", line, col);
      case '[': return tok(Tok::LBrack, "[", line, col);
      case ']': return tok(Tok::RBrack, "]", line, col);
      case '{': return tok(Tok::LBrace, "{", line, col);
      case '}': return tok(Tok::RBrace, "}", line, col);
      case ',': return tok(Tok::Comma, ",", line, col);
      case ';': return tok(Tok::Semi, ";", line, col);
      case ':': return tok(Tok::Colon, ":", line, col);
      case '.': return tok(Tok::Dot, ".", line, col);
      case '~': return tok(Tok::NotOp, "~", line, col);
      case '=': return tok(Tok::EqOp, "=", line, col);
      case '+': return tok(Tok::Plus, "+", line, col);
      case '*': return tok(Tok::Star, "*", line, col);
      default: break;
    }
    if (c >= '0' && c <= '9') {
      std::size_t j = i_;
      while (j < s_.size() && s_[j] >= '0' && s_[j] <= '9') ++j;
      return tok(Tok::Number, s_.substr(i_, j - i_), line, col);
    }
    if (ident_start(c)) {
      std::size_t j = i_;
      while (j < s_.size() && ident_char(s_[j])) ++j;
      std::string_view word = s_.substr(i_, j - i_);
      Tok k = Tok::Ident;
      if (word == "def") k = Tok::KwDef;
      else if (word == "axiom") k = Tok::KwAxiom;
      else if (word == "lemma") k = Tok::KwLemma;
      else if (word == "proof") k = Tok::KwProof;
      else if (word == "forall") k = Tok::KwForall;
      else if (word == "exists") k = Tok::KwExists;
      else if (word == "by") k = Tok::KwBy;
      return tok(k, word, line, col);
    }
    throw ParseError(line, col, std::string("unexpected character '") + c + "'");
  }
};

}  // namespace detail

class Parser {
 public:
  explicit Parser(std::string_view text) { toks_ = detail::Lexer(text).run(); }

  // Appends the parsed items to `doc`, sharing its signature and name space.
  void parse_into(ProofDocument& doc) {
    doc_ = &doc;
    names_.clear();
    for (const Definition& d : doc.definitions) names_.insert(d.name);
    for (const Axiom& a : doc.axioms) names_.insert(a.name);
    for (const Lemma& l : doc.lemmas) names_.insert(l.name);
    while (peek().kind != detail::Tok::End) {
      switch (peek().kind) {
        case detail::Tok::KwDef: parse_def(); break;
        case detail::Tok::KwAxiom: parse_axiom(); break;
        case detail::Tok::KwLemma: parse_lemma(); break;
        default:
          throw ParseError(peek().line, peek().col, "expected 'def', 'axiom' or 'lemma'");
      }
    }
    commit_uses();
    check_definitions_acyclic(doc.definitions);
  }

  // Parses a single formula; used for inline goals on the command line.
  FormulaRef parse_formula_only() {
    ProofDocument scratch;
    doc_ = &scratch;
    FormulaRef f = parse_formula();
    if (peek().kind != detail::Tok::End)
      throw ParseError(peek().line, peek().col, "trailing input after formula");
    commit_uses();
    return f;
  }

 private:
  using Tok = detail::Tok;
  using Token = detail::Token;

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  ProofDocument* doc_ = nullptr;
  std::set<std::string> names_;

  struct SymUse {
    bool is_pred;
    std::string name;
    int arity;
    int line, col;
  };
  std::vector<SymUse> uses_;

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  const Token& next() {
    const Token& t = peek();
    if (t.kind != Tok::End) ++pos_;
    return t;
  }
  bool accept(Tok k) {
    if (peek().kind == k) {
      ++pos_;
      return true;
    }
    return false;
  }
  const Token& expect(Tok k, const char* what) {
    if (peek().kind != k) throw ParseError(peek().line, peek().col, std::string("expected ") + what);
    return toks_[pos_++];
  }

  [[noreturn]] void fail(const Token& t, const std::string& msg) { throw ParseError(t.line, t.col, msg); }

  // '(' RULE followed by an annotation or ':' opens a proof node; this is
  // what keeps "P (Hyp h : A)" and "P(x)" apart in conclusion position.
  bool at_node_start() const {
    if (peek().kind != Tok::LParen) return false;
    const Token& r = peek(1);
    if (r.kind != Tok::Ident || !rule_from_name(r.text)) return false;
    Tok after = peek(2).kind;
    return after == Tok::Ident || after == Tok::LBrack || after == Tok::LBrace ||
           after == Tok::Colon;
  }

  void note_fn(const std::string& name, int arity, const Token& t) {
    uses_.push_back({false, name, arity, t.line, t.col});
  }
  void note_pred(const std::string& name, int arity, const Token& t) {
    uses_.push_back({true, name, arity, t.line, t.col});
  }

  void commit_uses() {
    for (const SymUse& u : uses_) {
      auto& table = u.is_pred ? doc_->signature.predicates : doc_->signature.functions;
      auto [it, inserted] = table.emplace(u.name, u.arity);
      if (!inserted && it->second != u.arity)
        throw ArityConflict(u.line, u.col,
                            (u.is_pred ? "predicate '" : "function '") + u.name +
                                "' used with arity " + std::to_string(u.arity) +
                                " but declared with arity " + std::to_string(it->second));
    }
    uses_.clear();
  }

  void declare_name(const Token& t) {
    if (!names_.insert(t.text).second)
      throw DuplicateName(t.line, t.col, "duplicate name '" + t.text + "'");
  }

  // --- items ---------------------------------------------------------------

  void parse_def() {
    next();  // def
    const Token& name = expect(Tok::Ident, "a definition name");
    declare_name(name);
    expect(Tok::LParen, "'('");
    std::vector<std::string> params;
    if (!accept(Tok::RParen)) {
      do {
        const Token& p = expect(Tok::Ident, "a parameter name");
        for (const std::string& q : params)
          if (q == p.text) fail(p, "duplicate parameter '" + p.text + "'");
        params.push_back(p.text);
      } while (accept(Tok::Comma));
      expect(Tok::RParen, "')'");
    }
    expect(Tok::Assign, "':='");
    FormulaRef body = parse_formula();
    std::set<std::string> fv = free_vars(body);
    for (const std::string& v : fv) {
      bool found = false;
      for (const std::string& p : params)
        if (p == v) found = true;
      if (!found)
        fail(name, "free variable '" + v + "' of the body of '" + name.text +
                       "' is not among its parameters");
    }
    note_pred(name.text, static_cast<int>(params.size()), name);
    doc_->definitions.push_back({name.text, std::move(params), std::move(body)});
  }

  void parse_axiom() {
    const Token& kw = next();  // axiom
    const Token& name = expect(Tok::Ident, "an axiom name");
    declare_name(name);
    expect(Tok::Colon, "':'");
    FormulaRef f = parse_formula();
    doc_->axioms.push_back({name.text, std::move(f), {kw.line, kw.col}});
  }

  void parse_lemma() {
    const Token& kw = next();  // lemma
    const Token& name = expect(Tok::Ident, "a lemma name");
    declare_name(name);
    Lemma lm;
    lm.name = name.text;
    lm.pos = {kw.line, kw.col};
    if (accept(Tok::LBrack)) {
      do {
        const Token& lab = expect(Tok::Ident, "a hypothesis label");
        for (const Hypothesis& h : lm.hypotheses)
          if (h.label == lab.text) fail(lab, "duplicate hypothesis label '" + lab.text + "'");
        expect(Tok::Colon, "':'");
        lm.hypotheses.push_back({lab.text, parse_formula()});
      } while (accept(Tok::Comma));
      expect(Tok::RBrack, "']'");
    }
    expect(Tok::Colon, "':'");
    lm.goal = parse_formula();
    expect(Tok::KwProof, "'proof'");
    lm.root = parse_node();
    doc_->lemmas.push_back(std::move(lm));
  }

  // --- proof nodes -----------------------------------------------------------

  ProofNode parse_node() {
    expect(Tok::LParen, "'(' starting a proof node");
    const Token& rt = expect(Tok::Ident, "a rule name");
    std::optional<Rule> rr = rule_from_name(rt.text);
    if (!rr) fail(rt, "unknown rule '" + rt.text + "'");
    ProofNode n;
    n.rule = *rr;
    n.pos = {rt.line, rt.col};
    parse_annotations(n, rt);
    expect(Tok::Colon, "':'");
    n.conclusion = parse_formula();
    if (n.rule == Rule::Chain) {
      do {
        n.steps.push_back(parse_chain_step());
      } while (accept(Tok::Semi));
    } else {
      while (at_node_start()) n.children.push_back(parse_node());
      int want = rule_child_count(n.rule);
      if (want >= 0 && static_cast<int>(n.children.size()) != want)
        fail(rt, std::string(rule_name(n.rule)) + " requires " + std::to_string(want) +
                     (want == 1 ? " child" : " children") + ", got " +
                     std::to_string(n.children.size()));
    }
    expect(Tok::RParen, "')'");
    return n;
  }

  void parse_annotations(ProofNode& n, const Token& rt) {
    switch (n.rule) {
      case Rule::Hyp:
        n.labels.push_back(expect(Tok::Ident, "a hypothesis label").text);
        break;
      case Rule::ImpI:
        n.labels.push_back(parse_bracket_label());
        break;
      case Rule::OrE:
        n.labels.push_back(parse_bracket_label());
        n.labels.push_back(parse_bracket_label());
        break;
      case Rule::ExE:
        n.labels.push_back(parse_bracket_label());
        n.fresh = parse_brace_fresh(rt);
        break;
      case Rule::AllI:
        n.fresh = parse_brace_fresh(rt);
        break;
      case Rule::AllE:
      case Rule::ExI:
        n.substs.push_back(parse_brace_subst(rt));
        break;
      case Rule::Conv:
        if (peek().kind == Tok::Ident) n.ref = next().text;
        break;
      case Rule::LemmaRef:
        n.ref = expect(Tok::Ident, "a lemma or axiom name").text;
        while (peek().kind == Tok::LBrace) n.substs.push_back(parse_brace_subst(rt));
        break;
      default:
        break;
    }
  }

  std::string parse_bracket_label() {
    expect(Tok::LBrack, "'['");
    std::string l = expect(Tok::Ident, "a label").text;
    expect(Tok::RBrack, "']'");
    return l;
  }

  std::string parse_brace_fresh(const Token& rt) {
    expect(Tok::LBrace, "'{'");
    const Token& v = expect(Tok::Ident, "a variable");
    if (peek().kind == Tok::Assign)
      fail(v, std::string(rule_name(rule_from_name(rt.text).value())) +
                  " takes a fresh variable {x0}, not a substitution");
    expect(Tok::RBrace, "'}'");
    return v.text;
  }

  Subst parse_brace_subst(const Token& rt) {
    expect(Tok::LBrace, "'{'");
    const Token& v = expect(Tok::Ident, "a variable");
    if (peek().kind == Tok::RBrace)
      fail(v, std::string(rt.text) + " takes a substitution {x := t}, not a fresh variable");
    expect(Tok::Assign, "':='");
    Term t = parse_term();
    expect(Tok::RBrace, "'}'");
    return {v.text, std::move(t)};
  }

  ChainStep parse_chain_step() {
    ChainStep st;
    const Token& at = peek();
    st.pos = {at.line, at.col};
    st.lhs = parse_term();
    expect(Tok::EqOp, "'=' in a chain step");
    st.rhs = parse_term();
    expect(Tok::KwBy, "'by'");
    st.just = expect(Tok::Ident, "a justification name").text;
    while (peek().kind == Tok::LBrace) st.just_substs.push_back(parse_brace_subst(at));
    return st;
  }

  // --- formulas --------------------------------------------------------------

  FormulaRef parse_formula() { return parse_iff(); }

  FormulaRef parse_iff() {
    FormulaRef a = parse_impl();
    if (accept(Tok::IffOp)) return iff(std::move(a), parse_iff());
    return a;
  }

  FormulaRef parse_impl() {
    FormulaRef a = parse_or();
    if (accept(Tok::Arrow)) return implies(std::move(a), parse_impl());
    return a;
  }

  FormulaRef parse_or() {
    FormulaRef a = parse_and();
    if (accept(Tok::OrOp)) return disj(std::move(a), parse_or());
    return a;
  }

  FormulaRef parse_and() {
    FormulaRef a = parse_unary();
    if (accept(Tok::AndOp)) return conj(std::move(a), parse_and());
    return a;
  }

  FormulaRef parse_unary() {
    if (accept(Tok::NotOp)) return negation(parse_unary());
    if (peek().kind == Tok::KwForall || peek().kind == Tok::KwExists) {
      bool all = next().kind == Tok::KwForall;
      const Token& v = expect(Tok::Ident, "a bound variable");
      expect(Tok::Dot, "'.'");
      FormulaRef body = parse_formula();
      return all ? forall(v.text, std::move(body)) : exists(v.text, std::move(body));
    }
    return parse_atomic();
  }

  FormulaRef parse_atomic() {
    const Token& t = peek();
    if (t.kind == Tok::BotTok) {
      next();
      return bottom();
    }
    if (at_node_start()) fail(t, "expected a formula, found a proof node");
    // An identifier, numeral or '(' may open either an equation between
    // terms or a plain formula. Try the term reading first and fall back.
    if (t.kind == Tok::Ident || t.kind == Tok::Number || t.kind == Tok::LParen) {
      std::size_t save_pos = pos_;
      std::size_t save_uses = uses_.size();
      bool is_term = true;
      Term lhs;
      try {
        lhs = parse_term();
      } catch (const ParseError&) {
        is_term = false;
      }
      if (is_term && peek().kind == Tok::EqOp) {
        next();
        Term rhs = parse_term();
        return equals(std::move(lhs), std::move(rhs));
      }
      pos_ = save_pos;
      uses_.resize(save_uses);
    }
    if (t.kind == Tok::LParen) {
      next();
      FormulaRef f = parse_formula();
      expect(Tok::RParen, "')'");
      return f;
    }
    if (t.kind == Tok::Ident) {
      const Token& name = next();
      std::vector<Term> args;
      if (accept(Tok::LParen)) {
        if (!accept(Tok::RParen)) {
          do {
            args.push_back(parse_term());
          } while (accept(Tok::Comma));
          expect(Tok::RParen, "')'");
        }
      }
      note_pred(name.text, static_cast<int>(args.size()), name);
      return atom(name.text, std::move(args));
    }
    throw ParseError(t.line, t.col, "expected a formula");
  }

  // --- terms -----------------------------------------------------------------

  Term parse_term() { return parse_term_add(); }

  Term parse_term_add() {
    Term t = parse_term_mul();
    while (peek().kind == Tok::Plus) {
      const Token& op = next();
      note_fn("+", 2, op);
      t = Term::app("+", {std::move(t), parse_term_mul()});
    }
    return t;
  }

  Term parse_term_mul() {
    Term t = parse_term_atom();
    while (peek().kind == Tok::Star) {
      const Token& op = next();
      note_fn("*", 2, op);
      t = Term::app("*", {std::move(t), parse_term_atom()});
    }
    return t;
  }

  Term parse_term_atom() {
    const Token& t = peek();
    if (t.kind == Tok::Number) {
      next();
      if (t.text != "0") fail(t, "only the numeral 0 is supported; write S(...) for successors");
      note_fn("0", 0, t);
      return Term::app("0");
    }
    if (t.kind == Tok::LParen) {
      next();
      Term inner = parse_term();
      expect(Tok::RParen, "')'");
      return inner;
    }
    if (t.kind == Tok::Ident) {
      const Token& name = next();
      if (accept(Tok::LParen)) {
        std::vector<Term> args;
        if (!accept(Tok::RParen)) {
          do {
            args.push_back(parse_term());
          } while (accept(Tok::Comma));
          expect(Tok::RParen, "')'");
        }
        note_fn(name.text, static_cast<int>(args.size()), name);
        return Term::app(name.text, std::move(args));
      }
      return Term::var(name.text);
    }
    throw ParseError(t.line, t.col, "expected a term");
  }
};

inline ProofDocument parse_document(std::string_view text) {
  ProofDocument doc;
  Parser(text).parse_into(doc);
  return doc;
}

inline FormulaRef parse_formula_text(std::string_view text) {
  return Parser(text).parse_formula_only();
}

}  // namespace gpnd
