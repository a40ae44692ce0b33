#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "slent/ast.hpp"

namespace slent {

/// Context-free grammar in Greibach normal form over terminals {0,1}:
/// every production is head -> terminal nonterminal*.
struct Production {
  std::string head;
  char terminal;  // '0' or '1'
  std::vector<std::string> tail;
};

struct Grammar {
  std::vector<std::string> nonterminals;  // declaration order; first head is the start
  std::string start;
  std::vector<Production> productions;
};

/// One production per line (`S -> 0 S B`), `#` comments. Throws NotGreibach
/// for productions that do not start with a terminal or contain later
/// terminals, EpsilonInLanguage for empty right-hand sides.
Grammar parse_grammar(std::string_view text);

/// The universality encoding: one predicate per nonterminal plus a chain
/// predicate for arbitrary binary strings, record width 2, and the entailment
/// hat0 != hat1 * T(x,y,hat0,hat1) |- S(x,y,hat0,hat1), valid iff every
/// nonempty binary string is in the language.
EntailmentProblem gen_cfg_instance(const Grammar& g);

}  // namespace slent
