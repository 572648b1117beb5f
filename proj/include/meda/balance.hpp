#pragma once

#include <optional>
#include <string>

#include "meda/pde.hpp"
#include "meda/rational_function.hpp"

namespace meda {

/// Balance order, an exact quotient that may depend on symbolic exponents.
class BalanceOrder {
 public:
  BalanceOrder() = default;
  explicit BalanceOrder(RationalFunction value) : value_(std::move(value)) {}

  const RationalFunction& value() const { return value_; }
  std::optional<long> integer_value() const;
  bool is_integer() const { return integer_value().has_value(); }
  bool is_positive_integer() const;
  Expr to_expr() const { return value_.to_expr(); }
  std::string str() const { return to_expr().str(); }

 private:
  RationalFunction value_;
};

/// Balances the highest-degree derivative term against the pure-power terms.
/// Throws DerivationError when no derivative term exists, no balance equation
/// is solvable, the choice is ambiguous, or M is a non-positive number.
BalanceOrder compute_balance(const TravelingWaveODE& ode);

/// Substitutes U = V^p, clears fractional powers of V and denominators, and
/// expands. The clearing multiplier is recorded in the result.
TravelingWaveODE power_transform(const TravelingWaveODE& ode, const Expr& p);

/// Exponent p = M / |k| for M = k / q with k a numeric constant, so the
/// transformed balance becomes the positive integer |k|.
Expr suggest_transform_exponent(const BalanceOrder& m);

}  // namespace meda
