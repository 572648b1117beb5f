#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "meda/expr.hpp"

namespace meda {

/// Product of atoms raised to nonzero integer exponents, sorted by atom.
/// Atoms are symbols or opaque subexpressions (functions, markers,
/// non-integer powers).
class Monomial {
 public:
  Monomial() = default;
  static Monomial atom(const Expr& a, int exponent = 1);

  const std::vector<std::pair<Expr, int>>& factors() const { return factors_; }
  bool is_one() const { return factors_.empty(); }
  int degree() const;
  int exponent_of(const Expr& a) const;
  Monomial without(const Expr& a) const;
  Expr to_expr() const;

  friend Monomial operator*(const Monomial& a, const Monomial& b);
  Monomial inverse() const;
  Monomial pow(int k) const;
  /// Componentwise minimum exponent (the monomial content of two terms).
  static Monomial min(const Monomial& a, const Monomial& b);

  friend bool operator==(const Monomial&, const Monomial&) = default;

 private:
  std::vector<std::pair<Expr, int>> factors_;
};

/// Degree-lex order: higher total degree first, then lexicographic by atom.
struct DegLex {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

/// Sparse multivariate Laurent polynomial with Gaussian-rational coefficients.
class Poly {
 public:
  using Terms = std::map<Monomial, GaussianRational, DegLex>;

  Poly() = default;
  Poly(GaussianRational c);  // NOLINT(google-explicit-constructor)
  Poly(long c) : Poly(GaussianRational(c)) {}  // NOLINT(google-explicit-constructor)
  static Poly atom(const Expr& a);
  static Poly term(const GaussianRational& c, const Monomial& m);
  /// Expands `e`; non-polynomial parts become opaque atoms.
  static Poly from_expr(const Expr& e);

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  std::optional<GaussianRational> constant_value() const;
  GaussianRational constant_term() const;
  std::size_t size() const { return terms_.size(); }
  std::pair<Monomial, GaussianRational> leading() const;
  /// Greatest common monomial divisor of all terms.
  Monomial content() const;
  std::vector<Expr> atoms() const;
  bool contains_atom(const Expr& a) const;
  int max_degree_in(const Expr& a) const;
  int min_degree_in(const Expr& a) const;

  Poly derivative(const Expr& a) const;
  /// Coefficient of a^k, as a polynomial in the remaining atoms.
  Poly coefficient(const Expr& a, int k) const;
  Poly compose(const std::map<Expr, Poly>& images) const;
  Expr to_expr() const;
  std::string str() const { return to_expr().str(); }

  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Poly& o);
  Poly operator-() const;
  Poly pow(int k) const;
  Poly scaled(const GaussianRational& c) const;
  Poly shifted(const Monomial& m) const;

  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }
  friend bool operator<(const Poly& a, const Poly& b);

 private:
  void add_term(const Monomial& m, const GaussianRational& c);
  Terms terms_;
};

/// Polynomial in a list of main symbols whose coefficients are polynomials in
/// everything else. Exponents are shifted so the smallest occurring exponent
/// of each main symbol is recorded in `offset`.
class PolyForm {
 public:
  using Exponents = std::vector<int>;
  struct ExponentOrder {
    bool operator()(const Exponents& a, const Exponents& b) const;
  };
  using Terms = std::map<Exponents, Poly, ExponentOrder>;

  PolyForm() = default;
  PolyForm(std::vector<std::string> main, Terms terms);
  static PolyForm from_poly(const Poly& p, const std::vector<std::string>& main);

  const std::vector<std::string>& main() const { return main_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  /// Smallest exponent of each main symbol (0 when no negative powers).
  Exponents min_exponents() const;
  Exponents max_exponents() const;
  Poly coefficient(const Exponents& e) const;
  Poly to_poly() const;
  Expr to_expr() const { return to_poly().to_expr(); }

  friend bool operator==(const PolyForm&, const PolyForm&) = default;

 private:
  std::vector<std::string> main_;
  Terms terms_;
};

/// Fully expanded normal form of `e` over `main`. Throws NonPolynomial when a
/// main symbol occurs inside a function, a marker, or a non-integer power.
PolyForm expand_normalize(const Expr& e, const std::vector<std::string>& main);
PolyForm expand_normalize(const Expr& e, const SymbolSet& main);

}  // namespace meda
