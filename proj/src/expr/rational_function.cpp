#include "meda/rational_function.hpp"

#include "meda/error.hpp"

namespace meda {

FactorSplit split_factor(const Poly& p) {
  if (p.is_zero()) throw DivisionByZero("division by an identically zero expression");
  Monomial m = p.content();
  Poly q = p.shifted(m.inverse());
  GaussianRational c = q.leading().second;
  return {c, m, q.scaled(c.inverse())};
}

namespace {

Poly factor_power(const Poly& f, int k) { return f.pow(k); }

bool is_sqrt(const Expr& a) { return a.is_function() && a.func() == Func::sqrt; }

bool has_reducible_radical(const Poly& p) {
  for (const auto& [m, c] : p.terms()) {
    for (const auto& [a, k] : m.factors()) {
      if (is_sqrt(a) && (k >= 2 || k <= -2)) return true;
    }
  }
  return false;
}

RationalFunction reduce_poly(const Poly& p) {
  RationalFunction out;
  for (const auto& [m, c] : p.terms()) {
    RationalFunction t(Poly::term(c, Monomial()));
    Monomial rest;
    for (const auto& [a, k] : m.factors()) {
      if (is_sqrt(a) && (k >= 2 || k <= -2)) {
        const int q = k / 2;
        t *= RationalFunction::from_expr(a.argument()).pow(q);
        rest = rest * Monomial::atom(a, k - 2 * q);
      } else {
        rest = rest * Monomial::atom(a, k);
      }
    }
    out += t * RationalFunction(Poly::term(GaussianRational(1), rest));
  }
  return out;
}

}  // namespace

RationalFunction RationalFunction::from_expr(const Expr& e) {
  RationalFunction r;
  switch (e.kind()) {
    case Kind::constant: return {Poly(e.value())};
    case Kind::symbol: return {Poly::atom(e)};
    case Kind::sum:
      for (const auto& t : e.operands()) r += from_expr(t);
      return r.reduce_radicals();
    case Kind::product:
      r = RationalFunction(1);
      for (const auto& f : e.operands()) {
        r *= from_expr(f);
        if (r.is_zero()) break;
      }
      return r.reduce_radicals();
    case Kind::power:
      if (auto k = e.exponent().integer_value(); k && *k < 4096 && *k > -4096) {
        return from_expr(e.base()).pow(static_cast<int>(*k)).reduce_radicals();
      }
      return {Poly::from_expr(e)};
    case Kind::function:
    case Kind::derivative: return {Poly::from_expr(e)};
  }
  return r;
}

Poly RationalFunction::expanded_denominator() const {
  Poly d(1);
  for (const auto& [f, k] : den_) d *= factor_power(f, k);
  return d;
}

std::optional<GaussianRational> RationalFunction::as_constant() const {
  if (num_.is_zero()) return GaussianRational(0);
  if (den_.empty()) return num_.constant_value();
  Poly d = expanded_denominator();
  const GaussianRational c = num_.leading().second / d.leading().second;
  if (num_ == d.scaled(c)) return c;
  return std::nullopt;
}

RationalFunction RationalFunction::inverse() const {
  FactorSplit s = split_factor(num_);
  RationalFunction r;
  Poly n = Poly::term(s.scale.inverse(), s.monomial.inverse());
  for (const auto& [f, k] : den_) n *= factor_power(f, k);
  r.num_ = std::move(n);
  if (!s.rest.is_constant()) r.den_[s.rest] = 1;
  return r;
}

RationalFunction RationalFunction::pow(int k) const {
  if (k < 0) return inverse().pow(-k);
  RationalFunction r;
  r.num_ = num_.pow(k);
  if (k == 0) return r;
  for (const auto& [f, m] : den_) r.den_[f] = m * k;
  return r;
}

RationalFunction RationalFunction::reduce_radicals() const {
  bool dirty = has_reducible_radical(num_);
  for (const auto& f : den_) dirty = dirty || has_reducible_radical(f.first);
  if (!dirty) return *this;
  RationalFunction r = reduce_poly(num_);
  for (const auto& [f, k] : den_) r /= reduce_poly(f).pow(k);
  return r;
}

Expr RationalFunction::to_expr() const {
  std::vector<Expr> fs{num_.to_expr()};
  for (const auto& [f, k] : den_) fs.push_back(Expr::power(f.to_expr(), Expr(static_cast<long>(-k))));
  return Expr::product(std::move(fs));
}

RationalFunction& RationalFunction::operator+=(const RationalFunction& o) {
  if (o.num_.is_zero()) return *this;
  if (num_.is_zero()) return *this = o;
  if (den_ == o.den_) {
    num_ += o.num_;
    if (num_.is_zero()) den_.clear();
    return *this;
  }
  Factors lcm = den_;
  for (const auto& [f, k] : o.den_) {
    int& slot = lcm[f];
    slot = std::max(slot, k);
  }
  auto lift = [&](const Poly& n, const Factors& d) {
    Poly out = n;
    for (const auto& [f, k] : lcm) {
      auto it = d.find(f);
      const int have = it == d.end() ? 0 : it->second;
      if (k > have) out *= factor_power(f, k - have);
    }
    return out;
  };
  num_ = lift(num_, den_) + lift(o.num_, o.den_);
  den_ = num_.is_zero() ? Factors{} : std::move(lcm);
  return *this;
}

RationalFunction& RationalFunction::operator-=(const RationalFunction& o) { return *this += -o; }

RationalFunction& RationalFunction::operator*=(const RationalFunction& o) {
  num_ *= o.num_;
  if (num_.is_zero()) {
    den_.clear();
    return *this;
  }
  for (const auto& [f, k] : o.den_) den_[f] += k;
  return *this;
}

RationalFunction RationalFunction::operator-() const {
  RationalFunction r = *this;
  r.num_ = -r.num_;
  return r;
}

bool poly_zero_check(const Expr& e) { return RationalFunction::from_expr(e).is_zero(); }

bool poly_zero_check(const Expr& e, const SymbolSet& main) {
  RationalFunction r = RationalFunction::from_expr(e);
  const std::vector<std::string> names(main.begin(), main.end());
  PolyForm::from_poly(r.numerator(), names);
  for (const auto& f : r.denominator()) PolyForm::from_poly(f.first, names);
  return r.is_zero();
}

}  // namespace meda
