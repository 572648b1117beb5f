#pragma once

#include <complex>
#include <map>
#include <string>

#include "meda/expr.hpp"

namespace meda {

using Complex = std::complex<double>;
using NumericBindings = std::map<std::string, Complex, std::less<>>;

struct EvalOptions {
  /// Minimum |cos|, |sin|, |cosh|, |sinh| of a tan/cot/tanh/coth argument.
  double pole_guard = 1e-6;
  /// Minimum magnitude of a base raised to a negative power.
  double min_divisor = 1e-12;
};

/// Double-precision complex value of `e`. Throws UnboundSymbol, PoleError, or
/// UnsupportedOperation for unexpanded derivative markers.
Complex eval_complex(const Expr& e, const NumericBindings& bindings, const EvalOptions& opts = {});

}  // namespace meda
