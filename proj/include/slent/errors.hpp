#pragma once

#include <stdexcept>
#include <string>

namespace slent {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : Error {
  int line;
  int col;
  ParseError(const std::string& msg, int line_, int col_)
      : Error(msg + " (line " + std::to_string(line_) + ", col " + std::to_string(col_) + ")"),
        line(line_), col(col_) {}
};

struct ArityMismatch : Error {
  using Error::Error;
};

struct NilInEqualityOrPredicate : Error {
  using Error::Error;
};

struct RebindingError : Error {
  using Error::Error;
};

struct NotAPredicateAtom : Error {
  using Error::Error;
};

struct RuleHeadMismatch : Error {
  using Error::Error;
};

struct NonProgressingSid : Error {
  using Error::Error;
};

struct WidthMismatch : Error {
  using Error::Error;
};

struct NonInjectiveOnDomain : Error {
  using Error::Error;
};

struct CombinatorialBudgetExceeded : Error {
  using Error::Error;
};

struct NotGreibach : Error {
  using Error::Error;
};

struct EpsilonInLanguage : Error {
  using Error::Error;
};

}  // namespace slent
