#include "meda/expr.hpp"

#include <algorithm>
#include <map>
#include <utility>

#include "meda/error.hpp"

namespace meda {

using detail::Node;

struct ExprBuilder {
  static Expr make(Node node) { return Expr(std::make_shared<const Node>(std::move(node))); }

  static Expr raw_product(std::vector<Expr> ops) {
    Node n;
    n.kind = Kind::product;
    n.ops = std::move(ops);
    return make(std::move(n));
  }

  static Expr raw_sum(std::vector<Expr> ops) {
    Node n;
    n.kind = Kind::sum;
    n.ops = std::move(ops);
    return make(std::move(n));
  }

  static Expr raw_power(const Expr& base, const Expr& exponent) {
    Node n;
    n.kind = Kind::power;
    n.ops = {base, exponent};
    return make(std::move(n));
  }

  // coefficient * rest, where rest carries no numeric factor
  static Expr scale(const GaussianRational& c, const Expr& rest) {
    if (c.is_zero()) return Expr();
    if (c.is_one()) return rest;
    if (rest.is_one()) return Expr(c);
    std::vector<Expr> ops{Expr(c)};
    if (rest.is_product()) {
      ops.insert(ops.end(), rest.operands().begin(), rest.operands().end());
    } else {
      ops.push_back(rest);
    }
    return raw_product(std::move(ops));
  }
};

namespace {


std::vector<DerivOrder> normalize_orders(std::vector<DerivOrder> orders) {
  std::map<std::string, int> acc;
  for (auto& o : orders) acc[o.var] += o.order;
  std::vector<DerivOrder> out;
  for (auto& [v, k] : acc) {
    if (k < 0) throw Error("negative derivative order for '" + v + "'");
    if (k > 0) out.push_back({v, k});
  }
  return out;
}

std::strong_ordering compare_ops(std::span<const Expr> a, std::span<const Expr> b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t k = 0; k < n; ++k) {
    auto c = a[k] <=> b[k];
    if (c != 0) return c;
  }
  return a.size() <=> b.size();
}

}  // namespace

std::string_view func_name(Func f) {
  switch (f) {
    case Func::tan: return "tan";
    case Func::cot: return "cot";
    case Func::tanh: return "tanh";
    case Func::coth: return "coth";
    case Func::sqrt: return "sqrt";
  }
  return "?";
}

std::optional<Func> func_from_name(std::string_view name) {
  if (name == "tan") return Func::tan;
  if (name == "cot") return Func::cot;
  if (name == "tanh") return Func::tanh;
  if (name == "coth") return Func::coth;
  if (name == "sqrt") return Func::sqrt;
  return std::nullopt;
}

Expr::Expr() : Expr(GaussianRational(0)) {}

Expr::Expr(long value) : Expr(GaussianRational(value)) {}

Expr::Expr(GaussianRational value) {
  Node n;
  n.kind = Kind::constant;
  n.value = std::move(value);
  node_ = std::make_shared<const Node>(std::move(n));
}

Expr Expr::symbol(std::string_view name) {
  Node n;
  n.kind = Kind::symbol;
  n.name = std::string(name);
  return ExprBuilder::make(std::move(n));
}

Kind Expr::kind() const { return node_->kind; }
bool Expr::is_zero() const { return is_constant() && node_->value.is_zero(); }
bool Expr::is_one() const { return is_constant() && node_->value.is_one(); }

std::optional<long> Expr::integer_value() const {
  if (!is_constant()) return std::nullopt;
  return node_->value.to_integer();
}

const GaussianRational& Expr::value() const {
  if (!is_constant()) throw Error("value() on a non-constant expression");
  return node_->value;
}
const std::string& Expr::name() const { return node_->name; }
Func Expr::func() const { return node_->func; }
std::span<const Expr> Expr::operands() const { return node_->ops; }
const Expr& Expr::base() const { return node_->ops.at(0); }
const Expr& Expr::exponent() const { return node_->ops.at(1); }
const Expr& Expr::argument() const { return node_->ops.at(0); }
const Expr& Expr::inner() const { return node_->ops.at(0); }
const std::vector<DerivOrder>& Expr::orders() const { return node_->orders; }

int Expr::total_order() const {
  int k = 0;
  for (const auto& o : node_->orders) k += o.order;
  return k;
}

std::strong_ordering operator<=>(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  const Node& x = *a.node_;
  const Node& y = *b.node_;
  if (x.kind != y.kind) return x.kind <=> y.kind;
  switch (x.kind) {
    case Kind::constant: return x.value <=> y.value;
    case Kind::symbol: return x.name.compare(y.name) <=> 0;
    case Kind::derivative: {
      if (auto c = x.orders <=> y.orders; c != 0) return c;
      return compare_ops(x.ops, y.ops);
    }
    case Kind::function:
      if (x.func != y.func) return x.func <=> y.func;
      return compare_ops(x.ops, y.ops);
    case Kind::power:
    case Kind::product:
    case Kind::sum: return compare_ops(x.ops, y.ops);
  }
  return std::strong_ordering::equal;
}

bool operator==(const Expr& a, const Expr& b) { return (a <=> b) == 0; }

std::pair<GaussianRational, Expr> split_coefficient(const Expr& term) {
  if (term.is_constant()) return {term.value(), Expr(1)};
  if (term.is_product() && term.operands().front().is_constant()) {
    auto ops = term.operands();
    if (ops.size() == 2) return {ops[0].value(), ops[1]};
    return {ops[0].value(), ExprBuilder::raw_product(std::vector<Expr>(ops.begin() + 1, ops.end()))};
  }
  return {GaussianRational(1), term};
}

Expr Expr::sum(std::vector<Expr> terms) {
  std::vector<Expr> flat;
  flat.reserve(terms.size());
  for (auto& t : terms) {
    if (t.is_sum()) {
      flat.insert(flat.end(), t.operands().begin(), t.operands().end());
    } else {
      flat.push_back(std::move(t));
    }
  }
  GaussianRational constant;
  std::map<Expr, GaussianRational> like;
  for (const auto& t : flat) {
    if (t.is_constant()) {
      constant += t.value();
      continue;
    }
    auto [c, rest] = split_coefficient(t);
    like[rest] += c;
  }
  std::vector<Expr> out;
  if (!constant.is_zero()) out.emplace_back(constant);
  for (const auto& [rest, c] : like) {
    if (!c.is_zero()) out.push_back(ExprBuilder::scale(c, rest));
  }
  if (out.empty()) return Expr();
  if (out.size() == 1) return out.front();
  return ExprBuilder::raw_sum(std::move(out));
}

Expr Expr::product(std::vector<Expr> factors) {
  std::vector<Expr> flat;
  flat.reserve(factors.size());
  for (auto& f : factors) {
    if (f.is_product()) {
      flat.insert(flat.end(), f.operands().begin(), f.operands().end());
    } else {
      flat.push_back(std::move(f));
    }
  }
  GaussianRational coef(1);
  std::map<Expr, std::vector<Expr>> exponents;
  for (const auto& f : flat) {
    if (f.is_constant()) {
      coef *= f.value();
    } else if (f.is_power()) {
      exponents[f.base()].push_back(f.exponent());
    } else {
      exponents[f].emplace_back(1);
    }
  }
  if (coef.is_zero()) return Expr();

  std::vector<Expr> out;
  bool again = false;
  for (auto& [base, list] : exponents) {
    Expr e = list.size() == 1 ? list.front() : Expr::sum(list);
    Expr p = Expr::power(base, e);
    if (p.is_constant()) {
      coef *= p.value();
      if (coef.is_zero()) return Expr();
      continue;
    }
    const Expr& pbase = p.is_power() ? p.base() : p;
    if (p.is_product() || pbase != base) again = true;
    out.push_back(std::move(p));
  }
  if (again) {
    out.emplace_back(coef);
    return Expr::product(std::move(out));
  }
  if (out.empty()) return Expr(coef);
  if (out.size() == 1 && coef.is_one()) return out.front();
  if (!coef.is_one()) out.insert(out.begin(), Expr(coef));
  return ExprBuilder::raw_product(std::move(out));
}

Expr Expr::power(const Expr& base, const Expr& exponent) {
  if (exponent.is_zero()) return Expr(1);
  if (exponent.is_one()) return base;
  const auto k = exponent.integer_value();
  if (base.is_constant()) {
    if (base.value().is_one()) return Expr(1);
    if (k) {
      if (base.is_zero() && *k < 0) throw DivisionByZero("zero raised to a negative power");
      return Expr(base.value().pow(*k));
    }
    return ExprBuilder::raw_power(base, exponent);
  }
  if (k) {
    if (base.is_power()) return Expr::power(base.base(), Expr::product({base.exponent(), exponent}));
    if (base.is_product()) {
      std::vector<Expr> fs;
      for (const auto& f : base.operands()) fs.push_back(Expr::power(f, exponent));
      return Expr::product(std::move(fs));
    }
    if (base.is_function() && base.func() == Func::sqrt && (*k >= 2 || *k <= -2)) {
      const long q = *k / 2;
      const long r = *k - 2 * q;
      return Expr::product({Expr::power(base.argument(), Expr(q)), Expr::power(base, Expr(r))});
    }
  }
  return ExprBuilder::raw_power(base, exponent);
}

Expr Expr::function(Func f, const Expr& argument) {
  if (argument.is_constant()) {
    if (f == Func::sqrt) {
      if (auto r = argument.value().exact_sqrt()) return Expr(*r);
    } else if ((f == Func::tan || f == Func::tanh) && argument.is_zero()) {
      return Expr();
    }
  }
  Node n;
  n.kind = Kind::function;
  n.func = f;
  n.ops = {argument};
  return ExprBuilder::make(std::move(n));
}

Expr Expr::derivative(const Expr& inner, std::vector<DerivOrder> orders) {
  auto norm = normalize_orders(std::move(orders));
  if (norm.empty()) return inner;
  if (inner.is_constant()) return Expr();
  if (inner.is_derivative()) {
    auto merged = inner.orders();
    merged.insert(merged.end(), norm.begin(), norm.end());
    return Expr::derivative(inner.inner(), std::move(merged));
  }
  Node n;
  n.kind = Kind::derivative;
  n.ops = {inner};
  n.orders = std::move(norm);
  return ExprBuilder::make(std::move(n));
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::sum({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::sum({a, -b}); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::product({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::product({a, Expr::power(b, Expr(-1))}); }
Expr operator-(const Expr& a) { return Expr::product({Expr(-1), a}); }
Expr pow(const Expr& base, const Expr& exponent) { return Expr::power(base, exponent); }
Expr apply(Func f, const Expr& argument) { return Expr::function(f, argument); }
Expr sym(std::string_view name) { return Expr::symbol(name); }

namespace {

void collect_symbols(const Expr& e, SymbolSet& out) {
  if (e.is_symbol()) {
    out.insert(e.name());
    return;
  }
  for (const auto& op : e.operands()) collect_symbols(op, out);
}

}  // namespace

SymbolSet free_symbols(const Expr& e) {
  SymbolSet out;
  collect_symbols(e, out);
  return out;
}

bool contains_symbol(const Expr& e, std::string_view name) {
  if (e.is_symbol()) return e.name() == name;
  for (const auto& op : e.operands()) {
    if (contains_symbol(op, name)) return true;
  }
  return false;
}

bool contains_any(const Expr& e, const SymbolSet& names) {
  if (e.is_symbol()) return names.contains(e.name());
  for (const auto& op : e.operands()) {
    if (contains_any(op, names)) return true;
  }
  return false;
}

bool contains_derivative(const Expr& e) {
  if (e.is_derivative()) return true;
  for (const auto& op : e.operands()) {
    if (contains_derivative(op)) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

constexpr int kPrecSum = 1;
constexpr int kPrecProduct = 2;
constexpr int kPrecPower = 3;

bool is_negative_coefficient(const GaussianRational& c) {
  return sgn(c.re()) < 0 || (sgn(c.re()) == 0 && sgn(c.im()) < 0);
}

std::string print(const Expr& e, int parent);

std::string print_constant(const GaussianRational& v, int parent) {
  std::string s = v.str();
  if (!v.is_real()) return (parent >= kPrecPower && s.front() != '(') ? "(" + s + ")" : s;
  const bool negative = sgn(v.re()) < 0;
  const bool fraction = v.re().get_den() != 1;
  if ((parent >= kPrecPower && (negative || fraction)) || (parent >= kPrecProduct && negative)) {
    return "(" + s + ")";
  }
  return s;
}

// Product body without sign handling; coefficient assumed "non-negative".
std::string print_product_body(const GaussianRational& coef, std::span<const Expr> factors) {
  std::vector<std::string> num;
  std::vector<std::string> den;
  if (coef.is_real()) {
    mpz_class p = coef.re().get_num();
    mpz_class q = coef.re().get_den();
    if (p != 1) num.push_back(p.get_str());
    if (q != 1) den.push_back(q.get_str());
  } else if (!coef.is_one()) {
    num.push_back(print_constant(coef, kPrecProduct));
  }
  for (const auto& f : factors) {
    if (f.is_power()) {
      if (auto k = f.exponent().integer_value(); k && *k < 0) {
        den.push_back(print(Expr::power(f.base(), Expr(-*k)), kPrecPower));
        continue;
      }
    }
    num.push_back(print(f, kPrecProduct));
  }
  std::string s;
  if (num.empty()) {
    s = "1";
  } else {
    for (std::size_t k = 0; k < num.size(); ++k) s += (k != 0 ? "*" : "") + num[k];
  }
  if (!den.empty()) {
    s += "/";
    if (den.size() == 1) {
      s += den.front();
    } else {
      s += "(";
      for (std::size_t k = 0; k < den.size(); ++k) s += (k != 0 ? "*" : "") + den[k];
      s += ")";
    }
  }
  return s;
}

std::string print_signed_term(const Expr& t, bool& negative) {
  auto [c, rest] = split_coefficient(t);
  negative = is_negative_coefficient(c);
  GaussianRational mag = negative ? -c : c;
  if (rest.is_one()) return print_constant(mag, kPrecSum);
  if (rest.is_product()) return print_product_body(mag, rest.operands());
  return print_product_body(mag, std::span<const Expr>(&rest, 1));
}

std::string print(const Expr& e, int parent) {
  switch (e.kind()) {
    case Kind::constant: return print_constant(e.value(), parent);
    case Kind::symbol: return e.name();
    case Kind::derivative: {
      std::string s = "D(" + print(e.inner(), 0);
      for (const auto& o : e.orders()) {
        for (int k = 0; k < o.order; ++k) s += ", " + o.var;
      }
      return s + ")";
    }
    case Kind::function: return std::string(func_name(e.func())) + "(" + print(e.argument(), 0) + ")";
    case Kind::power: {
      if (auto k = e.exponent().integer_value(); k && *k < 0) {
        std::string s = print_product_body(GaussianRational(1), std::span<const Expr>(&e, 1));
        return parent >= kPrecProduct ? "(" + s + ")" : s;
      }
      std::string b = print(e.base(), kPrecPower + 1);
      const Expr& x = e.exponent();
      std::string p;
      if (auto k = x.integer_value(); k && *k >= 0) {
        p = std::to_string(*k);
      } else if (x.is_symbol()) {
        p = x.name();
      } else {
        p = "(" + print(x, 0) + ")";
      }
      return b + "^" + p;
    }
    case Kind::product: {
      bool negative = false;
      std::string s = print_signed_term(e, negative);
      if (!negative) return parent > kPrecProduct ? "(" + s + ")" : s;
      s = "-" + s;
      return parent >= kPrecProduct ? "(" + s + ")" : s;
    }
    case Kind::sum: {
      std::string s;
      bool first = true;
      std::vector<Expr> ordered(e.operands().begin(), e.operands().end());
      if (ordered.front().is_constant()) std::rotate(ordered.begin(), ordered.begin() + 1, ordered.end());
      for (const auto& t : ordered) {
        bool negative = false;
        std::string body = print_signed_term(t, negative);
        if (first) {
          s = negative ? "-" + body : body;
          first = false;
        } else {
          s += negative ? " - " : " + ";
          s += body;
        }
      }
      return parent > kPrecSum ? "(" + s + ")" : s;
    }
  }
  return "?";
}

}  // namespace

std::string Expr::str() const { return print(*this, 0); }

}  // namespace meda
