#pragma once

#include <string_view>

#include "meda/expr.hpp"

namespace meda {

/// Parses the expression grammar. Identifiers must be in `declared`; `i` is
/// the imaginary unit and tan, cot, tanh, coth, sqrt are the known functions.
Expr parse_expr(std::string_view text, const SymbolSet& declared);

/// Same grammar, but any identifier is accepted as a symbol.
Expr parse_expr_free(std::string_view text);

}  // namespace meda
