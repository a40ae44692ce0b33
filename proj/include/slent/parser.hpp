#pragma once

#include <string>
#include <string_view>

#include "slent/ast.hpp"

namespace slent {

/// Parses the concrete problem syntax:
///
///   problem   := "fields" NUM ";" rule* "entail" formula "|-" formula
///   rule      := ID "(" ID ("," ID)* ")" "<=" atom ("*" atom)* ";"
///   formula   := sheap ("\/" sheap)*
///   sheap     := ("exists" ID+ ".")? atom ("*" atom)*
///   atom      := ID "=" ID | ID "!=" ID | ID "->" "(" term ("," term)* ")"
///              | ID "(" ID ("," ID)* ")"
///   term      := ID | "nil"
///
/// `#` starts a comment when it would start a token; inside an identifier it
/// is an ordinary character (so generated names like `z#1` survive a
/// round-trip). Existentials on the left-hand side are hoisted to fresh free
/// variables.
EntailmentProblem parse_problem(std::string_view text);

Formula parse_formula(std::string_view text, uint32_t record_width);

/// Rules-only input (`fields NUM ";" rule*`), the format of emitted .sid
/// files.
Sid parse_sid(std::string_view text);

}  // namespace slent
