#pragma once

#include <string_view>

#include "meda/expr.hpp"

namespace meda {

/// Exact derivative with respect to `var`. Symbols in `dependents` are
/// functions of `var`; their derivatives become derivative markers.
Expr differentiate(const Expr& e, std::string_view var, const SymbolSet& dependents = {});

/// Resolves every derivative marker by repeated differentiation. Markers
/// applied directly to a dependent symbol are kept.
Expr expand_derivatives(const Expr& e, const SymbolSet& dependents);

/// Simultaneous substitution of symbols, including inside derivative markers.
Expr substitute(const Expr& e, const Bindings& bindings);

/// Replaces whole subexpressions (e.g. a marker) by expressions.
Expr replace(const Expr& e, const std::map<Expr, Expr>& rules);

/// Distributes products over sums and expands positive integer powers of sums.
Expr expand(const Expr& e);

/// True when `e` depends on `var` directly or through a dependent symbol.
bool depends_on(const Expr& e, std::string_view var, const SymbolSet& dependents = {});

}  // namespace meda
