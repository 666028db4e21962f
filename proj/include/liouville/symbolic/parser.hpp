#pragma once

#include <string_view>

#include "liouville/symbolic/expression.hpp"

namespace liouville::symbolic {

/// Parses infix text: + - * / ( ), `^` with an integer exponent, the
/// functions exp log sqrt sin cos, the constant pi and coordinates x0..x{d-1}.
/// With dim >= 0, coordinates at or beyond dim are rejected. Errors are
/// ParseError carrying the 1-based column of the offending character.
Expression parse_expression(std::string_view text, int dim = -1);

}  // namespace liouville::symbolic
