#include "slent/cfg.hpp"

#include <algorithm>
#include <sstream>

namespace slent {

Grammar parse_grammar(std::string_view text) {
  Grammar g;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<std::string> tokens;
    std::string tok;
    while (ls >> tok) tokens.push_back(tok);
    if (tokens.empty()) continue;
    if (tokens.size() < 2 || tokens[1] != "->") {
      throw ParseError("expected 'NONTERMINAL -> ...'", lineno, 1);
    }
    const std::string& head = tokens[0];
    if (head == "0" || head == "1") {
      throw NotGreibach("production head '" + head + "' is a terminal (line " +
                        std::to_string(lineno) + ")");
    }
    if (tokens.size() == 2) {
      throw EpsilonInLanguage("empty production for " + head + " (line " +
                              std::to_string(lineno) + ")");
    }
    const std::string& first = tokens[2];
    if (first != "0" && first != "1") {
      throw NotGreibach("production for " + head + " must start with a terminal (line " +
                        std::to_string(lineno) + ")");
    }
    Production prod;
    prod.head = head;
    prod.terminal = first[0];
    for (size_t i = 3; i < tokens.size(); ++i) {
      if (tokens[i] == "0" || tokens[i] == "1") {
        throw NotGreibach("terminal '" + tokens[i] + "' after the leading terminal (line " +
                          std::to_string(lineno) + ")");
      }
      prod.tail.push_back(tokens[i]);
    }
    if (seen.insert(head).second) g.nonterminals.push_back(head);
    for (const std::string& nt : prod.tail) {
      if (seen.insert(nt).second) g.nonterminals.push_back(nt);
    }
    g.productions.push_back(std::move(prod));
  }
  if (g.productions.empty()) throw ParseError("grammar has no productions", lineno, 1);
  g.start = g.productions.front().head;
  return g;
}

EntailmentProblem gen_cfg_instance(const Grammar& g) {
  EntailmentProblem p;
  p.sid.record_width = 2;

  FreshNames pred_names;
  for (const std::string& nt : g.nonterminals) pred_names.reserve(nt);
  std::string chain_name = pred_names.fresh_name("T");

  VarId x = symbols::var("x");
  VarId y = symbols::var("y");
  VarId hat0 = symbols::var("hat0");
  VarId hat1 = symbols::var("hat1");
  auto hat_of = [&](char t) { return t == '0' ? hat0 : hat1; };

  for (const std::string& nt : g.nonterminals) {
    p.sid.declare(symbols::pred(nt), 4);
  }
  for (const Production& prod : g.productions) {
    Rule r;
    r.head = symbols::pred(prod.head);
    r.params = {x, y, hat0, hat1};
    size_t n = prod.tail.size();
    std::vector<VarId> chain;  // x, x1, ..., xn, y
    chain.push_back(x);
    for (size_t i = 1; i <= n; ++i) chain.push_back(symbols::var("x" + std::to_string(i)));
    chain.push_back(y);
    // with n = 0 the cell points directly at y
    PointsToAtom cell{x, {Term::var(hat_of(prod.terminal)), Term::var(chain[1])}};
    r.body.push_back(std::move(cell));
    for (size_t i = 0; i < n; ++i) {
      r.body.push_back(PredAtom{symbols::pred(prod.tail[i]), {chain[i + 1], chain[i + 2], hat0, hat1}});
    }
    p.sid.add_rule(std::move(r));
  }

  PredId chain_pred = symbols::pred(chain_name);
  VarId z = symbols::var("z");
  for (char t : {'0', '1'}) {
    Rule step;
    step.head = chain_pred;
    step.params = {x, y, hat0, hat1};
    step.body.push_back(PointsToAtom{x, {Term::var(hat_of(t)), Term::var(z)}});
    step.body.push_back(PredAtom{chain_pred, {z, y, hat0, hat1}});
    p.sid.add_rule(std::move(step));
    Rule base;
    base.head = chain_pred;
    base.params = {x, y, hat0, hat1};
    base.body.push_back(PointsToAtom{x, {Term::var(hat_of(t)), Term::var(y)}});
    p.sid.add_rule(std::move(base));
  }

  SymbolicHeap lhs;
  lhs.atoms.push_back(DiseqAtom{hat0, hat1});
  lhs.atoms.push_back(PredAtom{chain_pred, {x, y, hat0, hat1}});
  p.lhs.disjuncts.push_back(std::move(lhs));
  SymbolicHeap rhs;
  rhs.atoms.push_back(PredAtom{symbols::pred(g.start), {x, y, hat0, hat1}});
  p.rhs.disjuncts.push_back(std::move(rhs));
  p.recompute_free_vars();
  validate(p);
  return p;
}

}  // namespace slent
