#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "meda/gaussian_rational.hpp"

namespace meda {

enum class Kind : std::uint8_t { constant, symbol, derivative, function, power, product, sum };
enum class Func : std::uint8_t { tan, cot, tanh, coth, sqrt };

std::string_view func_name(Func f);
std::optional<Func> func_from_name(std::string_view name);

/// One variable of a derivative marker together with its multiplicity.
struct DerivOrder {
  std::string var;
  int order = 1;
  friend bool operator==(const DerivOrder&, const DerivOrder&) = default;
  friend auto operator<=>(const DerivOrder&, const DerivOrder&) = default;
};

namespace detail {
struct Node;
}

/// Immutable, canonical symbolic expression.
///
/// Every constructor canonicalizes: sums and products are flattened, numeric
/// parts folded, like terms and like bases merged, and operands sorted by the
/// structural order. Two expressions that canonicalize to the same tree
/// compare equal. Nodes are shared and never mutated, so values can be copied
/// freely and used from several threads.
class Expr {
 public:
  Expr();  // the constant 0
  Expr(long value);                     // NOLINT(google-explicit-constructor)
  Expr(int value) : Expr(static_cast<long>(value)) {}  // NOLINT(google-explicit-constructor)
  Expr(GaussianRational value);         // NOLINT(google-explicit-constructor)

  static Expr symbol(std::string_view name);
  static Expr imaginary_unit() { return Expr(GaussianRational::i()); }
  static Expr ratio(long num, long den) { return Expr(GaussianRational::ratio(num, den)); }

  static Expr sum(std::vector<Expr> terms);
  static Expr product(std::vector<Expr> factors);
  static Expr power(const Expr& base, const Expr& exponent);
  static Expr function(Func f, const Expr& argument);
  static Expr derivative(const Expr& inner, std::vector<DerivOrder> orders);

  Kind kind() const;
  bool is_constant() const { return kind() == Kind::constant; }
  bool is_symbol() const { return kind() == Kind::symbol; }
  bool is_sum() const { return kind() == Kind::sum; }
  bool is_product() const { return kind() == Kind::product; }
  bool is_power() const { return kind() == Kind::power; }
  bool is_function() const { return kind() == Kind::function; }
  bool is_derivative() const { return kind() == Kind::derivative; }
  bool is_zero() const;
  bool is_one() const;
  /// Exact real integer constant.
  std::optional<long> integer_value() const;

  const GaussianRational& value() const;
  const std::string& name() const;
  Func func() const;
  /// Terms of a sum, factors of a product, {base, exponent} of a power,
  /// {argument} of a function, {inner} of a derivative marker.
  std::span<const Expr> operands() const;
  const Expr& base() const;
  const Expr& exponent() const;
  const Expr& argument() const;
  const Expr& inner() const;
  const std::vector<DerivOrder>& orders() const;
  int total_order() const;

  /// Re-parseable rendering in the expression grammar.
  std::string str() const;

  friend std::strong_ordering operator<=>(const Expr& a, const Expr& b);
  friend bool operator==(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}
  friend struct ExprBuilder;
  std::shared_ptr<const detail::Node> node_;
};

namespace detail {
struct Node {
  Kind kind = Kind::constant;
  GaussianRational value;
  std::string name;
  Func func = Func::tan;
  std::vector<Expr> ops;
  std::vector<DerivOrder> orders;
};
}  // namespace detail

using SymbolSet = std::set<std::string, std::less<>>;
using Bindings = std::map<std::string, Expr, std::less<>>;

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, const Expr& exponent);
Expr apply(Func f, const Expr& argument);
Expr sym(std::string_view name);

/// Splits a term into its numeric coefficient and the remaining factor
/// (e.g. -3/2*x*y -> {-3/2, x*y}); constants split as {c, 1}.
std::pair<GaussianRational, Expr> split_coefficient(const Expr& term);

/// Symbols occurring anywhere in the tree (derivative-marker variable names
/// are not included).
SymbolSet free_symbols(const Expr& e);
bool contains_symbol(const Expr& e, std::string_view name);
bool contains_any(const Expr& e, const SymbolSet& names);
bool contains_derivative(const Expr& e);

inline std::ostream& operator<<(std::ostream& os, const Expr& e) { return os << e.str(); }

}  // namespace meda
