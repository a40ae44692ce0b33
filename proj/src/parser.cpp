#include "slent/parser.hpp"

#include <cctype>
#include <optional>
#include <vector>

namespace slent {
namespace {

enum class Tok {
  Ident,
  Number,
  Semi,
  Comma,
  Dot,
  LParen,
  RParen,
  Star,
  Eq,
  Neq,
  Arrow,     // ->
  RuleArrow, // <=
  Or,        // \/
  Turnstile, // |-
  KwFields,
  KwEntail,
  KwExists,
  KwNil,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  int line;
  int col;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_cont(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '#' || c == '\'';
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) { advance(); }

  const Token& peek() const { return tok_; }

  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    skip_ws();
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= text_.size()) {
      tok_.kind = Tok::End;
      tok_.text.clear();
      return;
    }
    char c = text_[pos_];
    if (ident_start(c)) {
      size_t start = pos_;
      while (pos_ < text_.size() && ident_cont(text_[pos_])) bump();
      tok_.text = std::string(text_.substr(start, pos_ - start));
      if (tok_.text == "fields") tok_.kind = Tok::KwFields;
      else if (tok_.text == "entail") tok_.kind = Tok::KwEntail;
      else if (tok_.text == "exists") tok_.kind = Tok::KwExists;
      else if (tok_.text == "nil") tok_.kind = Tok::KwNil;
      else tok_.kind = Tok::Ident;
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) bump();
      tok_.kind = Tok::Number;
      tok_.text = std::string(text_.substr(start, pos_ - start));
      return;
    }
    auto two = [&](char a, char b) {
      return c == a && pos_ + 1 < text_.size() && text_[pos_ + 1] == b;
    };
    if (two('-', '>')) return emit(Tok::Arrow, 2);
    if (two('<', '=')) return emit(Tok::RuleArrow, 2);
    if (two('!', '=')) return emit(Tok::Neq, 2);
    if (two('\\', '/')) return emit(Tok::Or, 2);
    if (two('|', '-')) return emit(Tok::Turnstile, 2);
    switch (c) {
      case ';': return emit(Tok::Semi, 1);
      case ',': return emit(Tok::Comma, 1);
      case '.': return emit(Tok::Dot, 1);
      case '(': return emit(Tok::LParen, 1);
      case ')': return emit(Tok::RParen, 1);
      case '*': return emit(Tok::Star, 1);
      case '=': return emit(Tok::Eq, 1);
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
    }
  }

  void emit(Tok kind, int len) {
    tok_.kind = kind;
    tok_.text = std::string(text_.substr(pos_, len));
    for (int i = 0; i < len; ++i) bump();
  }

  void skip_ws() {
    for (;;) {
      while (pos_ < text_.size() &&
             std::isspace(static_cast<unsigned char>(text_[pos_]))) {
        bump();
      }
      if (pos_ < text_.size() && text_[pos_] == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') bump();
        continue;
      }
      break;
    }
  }

  void bump() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  std::string_view text_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token tok_;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lex_(text) {}

  EntailmentProblem problem() {
    expect(Tok::KwFields, "'fields'");
    Token n = expect(Tok::Number, "record width");
    EntailmentProblem p;
    p.sid.record_width = static_cast<uint32_t>(std::stoul(n.text));
    expect(Tok::Semi, "';'");
    while (lex_.peek().kind == Tok::Ident) {
      rule(p.sid);
    }
    expect(Tok::KwEntail, "'entail'");
    p.lhs = formula(p.sid);
    expect(Tok::Turnstile, "'|-'");
    p.rhs = formula(p.sid);
    if (lex_.peek().kind != Tok::End) {
      const Token& t = lex_.peek();
      throw ParseError("trailing input after entailment", t.line, t.col);
    }
    finish(p);
    return p;
  }

  Formula formula_only(uint32_t width) {
    Sid sid;
    sid.record_width = width;
    Formula f = formula(sid);
    if (lex_.peek().kind != Tok::End) {
      const Token& t = lex_.peek();
      throw ParseError("trailing input after formula", t.line, t.col);
    }
    return f;
  }

  Sid sid_only() {
    expect(Tok::KwFields, "'fields'");
    Token n = expect(Tok::Number, "record width");
    Sid sid;
    sid.record_width = static_cast<uint32_t>(std::stoul(n.text));
    expect(Tok::Semi, "';'");
    while (lex_.peek().kind == Tok::Ident) rule(sid);
    if (lex_.peek().kind != Tok::End) {
      const Token& t = lex_.peek();
      throw ParseError("trailing input after rules", t.line, t.col);
    }
    return sid;
  }

 private:
  Token expect(Tok kind, const char* what) {
    const Token& t = lex_.peek();
    if (t.kind != kind) {
      throw ParseError(std::string("expected ") + what +
                           (t.text.empty() ? "" : ", found '" + t.text + "'"),
                       t.line, t.col);
    }
    return lex_.next();
  }

  VarId var_token() {
    Token t = lex_.next();
    if (t.kind == Tok::KwNil) {
      throw NilInEqualityOrPredicate("nil cannot occur here (line " + std::to_string(t.line) +
                                     ", col " + std::to_string(t.col) + ")");
    }
    if (t.kind != Tok::Ident) {
      throw ParseError("expected a variable, found '" + t.text + "'", t.line, t.col);
    }
    return symbols::var(t.text);
  }

  void rule(Sid& sid) {
    Token name = expect(Tok::Ident, "rule head");
    expect(Tok::LParen, "'('");
    Rule r;
    r.head = symbols::pred(name.text);
    r.params.push_back(var_token());
    while (lex_.peek().kind == Tok::Comma) {
      lex_.next();
      r.params.push_back(var_token());
    }
    expect(Tok::RParen, "')'");
    {
      std::set<VarId> seen;
      for (VarId v : r.params) {
        if (!seen.insert(v).second) {
          throw RebindingError("rule head parameter " + symbols::name(v) + " repeated (line " +
                               std::to_string(name.line) + ")");
        }
      }
    }
    expect(Tok::RuleArrow, "'<='");
    r.body.push_back(atom(sid));
    while (lex_.peek().kind == Tok::Star) {
      lex_.next();
      r.body.push_back(atom(sid));
    }
    expect(Tok::Semi, "';'");
    declare(sid, r.head, static_cast<uint32_t>(r.params.size()), name);
    sid.defs.at(r.head).rules.push_back(std::move(r));
  }

  Formula formula(Sid& sid) {
    Formula f;
    f.disjuncts.push_back(sheap(sid));
    while (lex_.peek().kind == Tok::Or) {
      lex_.next();
      f.disjuncts.push_back(sheap(sid));
    }
    return f;
  }

  SymbolicHeap sheap(Sid& sid) {
    SymbolicHeap sh;
    if (lex_.peek().kind == Tok::KwExists) {
      Token kw = lex_.next();
      while (lex_.peek().kind == Tok::Ident || lex_.peek().kind == Tok::KwNil) {
        VarId v = var_token();
        for (VarId b : sh.bound) {
          if (b == v) {
            throw RebindingError("variable " + symbols::name(v) + " bound twice (line " +
                                 std::to_string(kw.line) + ")");
          }
        }
        sh.bound.push_back(v);
      }
      if (sh.bound.empty()) {
        throw ParseError("'exists' needs at least one variable", kw.line, kw.col);
      }
      expect(Tok::Dot, "'.'");
    }
    sh.atoms.push_back(atom(sid));
    while (lex_.peek().kind == Tok::Star) {
      lex_.next();
      sh.atoms.push_back(atom(sid));
    }
    return sh;
  }

  Atom atom(Sid& sid) {
    Token first = lex_.next();
    if (first.kind == Tok::KwNil) {
      throw NilInEqualityOrPredicate("nil cannot start an atom (line " +
                                     std::to_string(first.line) + ", col " +
                                     std::to_string(first.col) + ")");
    }
    if (first.kind != Tok::Ident) {
      throw ParseError("expected an atom, found '" + first.text + "'", first.line, first.col);
    }
    const Token& t = lex_.peek();
    switch (t.kind) {
      case Tok::Eq: {
        lex_.next();
        return EqAtom{symbols::var(first.text), var_token()};
      }
      case Tok::Neq: {
        lex_.next();
        return DiseqAtom{symbols::var(first.text), var_token()};
      }
      case Tok::Arrow: {
        lex_.next();
        expect(Tok::LParen, "'('");
        PointsToAtom pt{symbols::var(first.text), {}};
        pt.fields.push_back(term());
        while (lex_.peek().kind == Tok::Comma) {
          lex_.next();
          pt.fields.push_back(term());
        }
        expect(Tok::RParen, "')'");
        if (pt.fields.size() != sid.record_width) {
          throw ArityMismatch("points-to of width " + std::to_string(pt.fields.size()) +
                              ", 'fields' declares " + std::to_string(sid.record_width) +
                              " (line " + std::to_string(first.line) + ")");
        }
        return pt;
      }
      case Tok::LParen: {
        lex_.next();
        PredAtom call{symbols::pred(first.text), {}};
        call.args.push_back(var_token());
        while (lex_.peek().kind == Tok::Comma) {
          lex_.next();
          call.args.push_back(var_token());
        }
        expect(Tok::RParen, "')'");
        declare(sid, call.pred, static_cast<uint32_t>(call.args.size()), first);
        return call;
      }
      default:
        throw ParseError("expected '=', '!=', '->' or '(' after '" + first.text + "'", t.line,
                         t.col);
    }
  }

  Term term() {
    const Token& t = lex_.peek();
    if (t.kind == Tok::KwNil) {
      lex_.next();
      return Term::nil();
    }
    return Term::var(var_token());
  }

  void declare(Sid& sid, PredId p, uint32_t arity, const Token& at) {
    if (sid.declared(p) && sid.arity(p) != arity) {
      throw ArityMismatch("predicate " + symbols::name(p) + " used with arity " +
                          std::to_string(arity) + ", previously " +
                          std::to_string(sid.arity(p)) + " (line " + std::to_string(at.line) +
                          ")");
    }
    sid.declare(p, arity);
  }

  // Hoists lhs existentials into fresh free variables, checks the
  // bound-variable discipline, and computes the free-variable vector.
  void finish(EntailmentProblem& p) {
    FreshNames names;
    auto reserve_formula = [&](const Formula& f) {
      for (const SymbolicHeap& sh : f.disjuncts) {
        for (VarId v : sh.bound) names.reserve(v);
        for (VarId v : free_vars_of_atoms(sh.atoms)) names.reserve(v);
      }
    };
    reserve_formula(p.lhs);
    reserve_formula(p.rhs);

    for (SymbolicHeap& sh : p.lhs.disjuncts) {
      if (sh.bound.empty()) continue;
      Substitution hoist;
      for (VarId b : sh.bound) hoist.set(b, names.fresh_var(symbols::name(b)));
      sh.atoms = apply_substitution(sh.atoms, hoist);
      sh.bound.clear();
    }

    p.recompute_free_vars();
    std::set<VarId> frees(p.free_vars.begin(), p.free_vars.end());
    std::set<VarId> bound_seen;
    for (const SymbolicHeap& sh : p.rhs.disjuncts) {
      for (VarId v : sh.bound) {
        if (frees.count(v)) {
          throw RebindingError("variable " + symbols::name(v) +
                               " occurs both free and bound in the problem");
        }
        if (!bound_seen.insert(v).second) {
          throw RebindingError("variable " + symbols::name(v) +
                               " bound by two distinct quantifiers");
        }
      }
    }
    validate(p);
  }

  Lexer lex_;
};

}  // namespace

EntailmentProblem parse_problem(std::string_view text) { return Parser(text).problem(); }

Formula parse_formula(std::string_view text, uint32_t record_width) {
  return Parser(text).formula_only(record_width);
}

Sid parse_sid(std::string_view text) { return Parser(text).sid_only(); }

}  // namespace slent
