#pragma once

#include <map>
#include <optional>
#include <vector>

#include "meda/poly.hpp"

namespace meda {

struct PolyLess {
  bool operator()(const Poly& a, const Poly& b) const { return a < b; }
};

/// Quotient of a Laurent polynomial by a product of non-monomial factors.
/// Denominator factors are kept unexpanded, normalized to leading
/// coefficient 1 with no monomial content, so common denominators are formed
/// by taking the largest multiplicity of each factor.
class RationalFunction {
 public:
  using Factors = std::map<Poly, int, PolyLess>;

  RationalFunction() = default;
  RationalFunction(Poly num) : num_(std::move(num)) {}  // NOLINT(google-explicit-constructor)
  RationalFunction(GaussianRational c) : num_(std::move(c)) {}  // NOLINT(google-explicit-constructor)
  RationalFunction(long c) : num_(c) {}  // NOLINT(google-explicit-constructor)
  static RationalFunction from_expr(const Expr& e);

  const Poly& numerator() const { return num_; }
  const Factors& denominator() const { return den_; }
  Poly expanded_denominator() const;
  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const { return den_.empty(); }
  /// Exact constant value when the quotient does not depend on any atom.
  std::optional<GaussianRational> as_constant() const;

  RationalFunction inverse() const;
  RationalFunction pow(int k) const;
  /// Rewrites sqrt(X)^k for |k| >= 2 as X^(k/2) * sqrt(X)^(k%2).
  RationalFunction reduce_radicals() const;
  Expr to_expr() const;

  RationalFunction& operator+=(const RationalFunction& o);
  RationalFunction& operator-=(const RationalFunction& o);
  RationalFunction& operator*=(const RationalFunction& o);
  RationalFunction& operator/=(const RationalFunction& o) { return *this *= o.inverse(); }
  RationalFunction operator-() const;

  friend RationalFunction operator+(RationalFunction a, const RationalFunction& b) { return a += b; }
  friend RationalFunction operator-(RationalFunction a, const RationalFunction& b) { return a -= b; }
  friend RationalFunction operator*(RationalFunction a, const RationalFunction& b) { return a *= b; }
  friend RationalFunction operator/(RationalFunction a, const RationalFunction& b) { return a /= b; }

 private:
  Poly num_;
  Factors den_;
};

/// Splits p = c * m * q with c a constant, m a monomial and q having leading
/// coefficient 1 and no monomial content.
struct FactorSplit {
  GaussianRational scale;
  Monomial monomial;
  Poly rest;
};
FactorSplit split_factor(const Poly& p);

/// Exact identity test: the numerator of `e` over a common denominator
/// expands to zero. Throws DivisionByZero for an identically-zero divisor.
bool poly_zero_check(const Expr& e);
/// As above; additionally requires polynomial dependence on `main`.
bool poly_zero_check(const Expr& e, const SymbolSet& main);

}  // namespace meda
