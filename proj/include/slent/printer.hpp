#pragma once

#include <string>

#include "slent/ast.hpp"

namespace slent {

std::string print(const Term& t);
std::string print(const Atom& a);
std::string print(const SymbolicHeap& sh);
std::string print(const Formula& f);
std::string print(const Rule& r);
/// Rules only, one per line, ending with ';'.
std::string print_rules(const Sid& sid);
/// Full problem in the input grammar: fields line, rules, entail line.
std::string print(const EntailmentProblem& p);

}  // namespace slent
