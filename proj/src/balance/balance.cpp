#include "meda/balance.hpp"

#include <algorithm>

#include "meda/calculus.hpp"
#include "meda/error.hpp"

namespace meda {

std::optional<long> BalanceOrder::integer_value() const {
  auto c = value_.as_constant();
  if (!c || !c->is_integer()) return std::nullopt;
  return c->to_integer();
}

bool BalanceOrder::is_positive_integer() const {
  auto k = integer_value();
  return k && *k > 0;
}

namespace {

std::vector<Expr> factors_of(const Expr& t) {
  if (t.is_product()) return {t.operands().begin(), t.operands().end()};
  return {t};
}

std::vector<Expr> terms_of(const Expr& e) {
  if (e.is_zero()) return {};
  if (e.is_sum()) return {e.operands().begin(), e.operands().end()};
  return {e};
}

/// Degree slope*M + offset of an expression in the profile.
struct Degree {
  RationalFunction slope;
  RationalFunction offset;
};

Degree degree_of(const Expr& e, const std::string& w) {
  switch (e.kind()) {
    case Kind::constant: return {RationalFunction(0), RationalFunction(0)};
    case Kind::symbol:
      if (e.name() == w) return {RationalFunction(1), RationalFunction(0)};
      return {RationalFunction(0), RationalFunction(0)};
    case Kind::derivative: {
      Degree d = degree_of(e.inner(), w);
      d.offset += RationalFunction(static_cast<long>(e.total_order()));
      return d;
    }
    case Kind::power: {
      if (!contains_symbol(e.base(), w)) return {RationalFunction(0), RationalFunction(0)};
      if (contains_symbol(e.exponent(), w)) throw DerivationError("profile inside an exponent");
      Degree d = degree_of(e.base(), w);
      RationalFunction k = RationalFunction::from_expr(e.exponent());
      return {d.slope * k, d.offset * k};
    }
    case Kind::product: {
      Degree d{RationalFunction(0), RationalFunction(0)};
      for (const auto& f : e.operands()) {
        Degree g = degree_of(f, w);
        d.slope += g.slope;
        d.offset += g.offset;
      }
      return d;
    }
    case Kind::sum: {
      std::optional<Degree> best;
      for (const auto& t : e.operands()) {
        Degree g = degree_of(t, w);
        if (!best) {
          best = g;
          continue;
        }
        auto ds = (g.slope - best->slope).as_constant();
        auto dof = (g.offset - best->offset).as_constant();
        if (!ds || !dof || !ds->is_real() || !dof->is_real()) {
          throw DerivationError("cannot compare the degrees of the terms in " + e.str());
        }
        if (sgn(ds->re()) > 0 || (sgn(ds->re()) == 0 && sgn(dof->re()) > 0)) best = g;
      }
      return best.value_or(Degree{RationalFunction(0), RationalFunction(0)});
    }
    case Kind::function:
      if (contains_symbol(e, w)) throw DerivationError("profile inside a function: " + e.str());
      return {RationalFunction(0), RationalFunction(0)};
  }
  return {RationalFunction(0), RationalFunction(0)};
}

int derivative_order(const Expr& t) {
  int k = 0;
  for (const auto& f : factors_of(t)) {
    const Expr& g = f.is_power() ? f.base() : f;
    if (g.is_derivative()) k = std::max(k, g.total_order());
  }
  return k;
}

bool same(const RationalFunction& a, const RationalFunction& b) { return (a - b).is_zero(); }

}  // namespace

BalanceOrder compute_balance(const TravelingWaveODE& ode) {
  if (ode.equations.size() != 1 || ode.profiles.size() != 1) {
    throw DerivationError("balancing needs a single equation in a single profile");
  }
  const std::string& w = ode.profiles.front();
  const auto terms = terms_of(expand(ode.equations.front()));

  struct Term {
    Expr term;
    Degree degree;
    int order;
  };
  std::vector<Term> derivative_terms;
  std::vector<Term> power_terms;
  for (const auto& t : terms) {
    if (!contains_symbol(t, w)) continue;
    Term x{t, degree_of(t, w), derivative_order(t)};
    (x.order > 0 ? derivative_terms : power_terms).push_back(x);
  }
  if (derivative_terms.empty()) throw DerivationError("the equation has no derivative term to balance");
  if (power_terms.empty()) throw DerivationError("the equation has no nonlinear term to balance against");

  const int top = std::max_element(derivative_terms.begin(), derivative_terms.end(),
                                   [](const Term& a, const Term& b) { return a.order < b.order; })->order;
  std::optional<Degree> high;
  for (const auto& t : derivative_terms) {
    if (t.order != top) continue;
    if (!high) {
      high = t.degree;
      continue;
    }
    if (same(high->slope, t.degree.slope) && same(high->offset, t.degree.offset)) continue;
    auto ds = (t.degree.slope - high->slope).as_constant();
    auto dof = (t.degree.offset - high->offset).as_constant();
    if (!ds || !dof || !ds->is_real() || !dof->is_real()) {
      throw DerivationError("ambiguous highest-degree derivative term " + t.term.str());
    }
    if (sgn(ds->re()) > 0 || (sgn(ds->re()) == 0 && sgn(dof->re()) > 0)) high = t.degree;
  }

  struct Solution {
    RationalFunction m;
    RationalFunction slope;
  };
  std::vector<Solution> solutions;
  for (const auto& t : power_terms) {
    RationalFunction den = t.degree.slope - high->slope;
    if (den.is_zero()) continue;
    solutions.push_back({(high->offset - t.degree.offset) / den, t.degree.slope});
  }
  if (solutions.empty()) throw DerivationError("no balance equation is solvable");

  // the nonlinear term of largest degree wins
  const Solution* pick = &solutions.front();
  for (const auto& s : solutions) {
    if (&s == pick || same(s.m, pick->m)) continue;
    auto d = (s.slope - pick->slope).as_constant();
    if (!d || !d->is_real()) throw DerivationError("ambiguous balance: several nonlinear terms give different orders");
    if (sgn(d->re()) > 0) pick = &s;
  }
  BalanceOrder m(pick->m);
  if (auto c = pick->m.as_constant()) {
    if (!c->is_real() || sgn(c->re()) <= 0) throw DerivationError("balance yields M = " + c->str() + ", which is not positive");
  }
  return m;
}

Expr suggest_transform_exponent(const BalanceOrder& m) {
  const RationalFunction& v = m.value();
  auto k = v.numerator().constant_value();
  if (!k || !k->is_real() || k->is_zero()) {
    throw DerivationError("no power transform suggestion for M = " + m.str());
  }
  GaussianRational mag = sgn(k->re()) < 0 ? -*k : *k;
  return expand((v * RationalFunction(mag.inverse())).to_expr());
}

// ---------------------------------------------------------------------------
// Power transform

namespace {

Expr flatten_powers(const Expr& e) {
  switch (e.kind()) {
    case Kind::constant:
    case Kind::symbol: return e;
    case Kind::derivative: return Expr::derivative(flatten_powers(e.inner()), e.orders());
    case Kind::function: return Expr::function(e.func(), flatten_powers(e.argument()));
    case Kind::sum:
    case Kind::product: {
      std::vector<Expr> ops;
      for (const auto& t : e.operands()) ops.push_back(flatten_powers(t));
      return e.is_sum() ? Expr::sum(std::move(ops)) : Expr::product(std::move(ops));
    }
    case Kind::power: {
      Expr b = flatten_powers(e.base());
      Expr x = flatten_powers(e.exponent());
      if (b.is_power()) return pow(b.base(), expand(b.exponent() * x));
      return pow(b, x);
    }
  }
  return e;
}

}  // namespace

TravelingWaveODE power_transform(const TravelingWaveODE& ode, const Expr& p) {
  if (ode.equations.size() != 1 || ode.profiles.size() != 1) {
    throw DerivationError("power transform needs a single equation in a single profile");
  }
  if (ode.transform) throw DerivationError("a power transform has already been applied");
  const std::string u = ode.profiles.front();
  SymbolSet taken = ode.declared();
  for (const auto& [unknown, prof] : ode.profile_of) taken.insert(prof);
  std::string v = "V";
  for (const char* name : {"V", "W", "Y"}) {
    if (!taken.contains(name)) {
      v = name;
      break;
    }
  }
  const Expr vs = sym(v);

  Expr e = substitute(ode.equations.front(), {{u, pow(vs, p)}});
  e = flatten_powers(e);
  e = flatten_powers(expand_derivatives(e, {v}));
  e = expand(e);

  struct Piece {
    RationalFunction exponent;
    Expr coefficient;
    Expr rest;
  };
  std::vector<Piece> pieces;
  for (const auto& t : terms_of(e)) {
    Expr vexp(0);
    std::vector<Expr> coef;
    std::vector<Expr> rest;
    for (const auto& f : factors_of(t)) {
      if (f == vs) {
        vexp = vexp + Expr(1);
      } else if (f.is_power() && f.base() == vs) {
        vexp = vexp + f.exponent();
      } else if (contains_symbol(f, v)) {
        if (f.is_power() && !f.exponent().integer_value()) {
          throw DerivationError("residual fractional power in term " + t.str());
        }
        rest.push_back(f);
      } else {
        coef.push_back(f);
      }
    }
    pieces.push_back({RationalFunction::from_expr(vexp), Expr::product(coef), Expr::product(rest)});
  }
  if (pieces.empty()) throw DerivationError("the transformed equation vanishes identically");

  std::vector<long> shifts;
  for (const auto& pc : pieces) {
    auto d = (pc.exponent - pieces.front().exponent).as_constant();
    if (!d || !d->is_integer()) {
      throw DerivationError("residual fractional power of " + v + " in term " +
                            (pc.coefficient * pc.rest * pow(vs, pc.exponent.to_expr())).str());
    }
    shifts.push_back(*d->to_integer());
  }
  const long lowest = *std::min_element(shifts.begin(), shifts.end());

  // group by the V-dependent monomial
  std::map<Expr, RationalFunction> grouped;
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    Expr mono = pieces[k].rest * pow(vs, Expr(shifts[k] - lowest));
    grouped[mono] += RationalFunction::from_expr(pieces[k].coefficient);
  }

  RationalFunction::Factors lcm;
  for (const auto& [mono, c] : grouped) {
    for (const auto& [f, k] : c.denominator()) lcm[f] = std::max(lcm[f], k);
  }
  RationalFunction common(1);
  for (const auto& [f, k] : lcm) common *= RationalFunction(f).pow(k);

  mpz_class den_lcm = 1;
  std::vector<std::pair<Expr, Poly>> cleared;
  for (const auto& [mono, c] : grouped) {
    Poly r = c.numerator();
    for (const auto& [f, k] : lcm) {
      auto it = c.denominator().find(f);
      const int have = it == c.denominator().end() ? 0 : it->second;
      if (k > have) r *= f.pow(k - have);
    }
    for (const auto& [m, q] : r.terms()) {
      mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), q.re().get_den_mpz_t());
      mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), q.im().get_den_mpz_t());
    }
    cleared.emplace_back(mono, r);
  }
  const GaussianRational scale{mpq_class(den_lcm)};

  std::vector<Expr> terms;
  for (const auto& [mono, q] : cleared) {
    if (q.is_zero()) continue;
    terms.push_back(q.scaled(scale).to_expr() * mono);
  }

  TravelingWaveODE out = ode;
  out.profiles = {v};
  out.equations = {expand(Expr::sum(std::move(terms)))};
  const Expr e_min = pieces.front().exponent.to_expr() + Expr(lowest);
  out.transform = PowerTransform{u, v, p, expand(Expr(scale) * common.to_expr()) * pow(vs, expand(-e_min))};
  return out;
}

}  // namespace meda
