#include "meda/engine.hpp"

#include <algorithm>

#include "meda/calculus.hpp"
#include "meda/error.hpp"

namespace meda {

std::vector<std::string> Ansatz::coefficients() const {
  std::vector<std::string> out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

Ansatz build_ansatz(int order) {
  if (order < 1) throw DerivationError("the expansion order must be at least 1, got " + std::to_string(order));
  Ansatz an;
  an.order = order;
  const Expr phi = sym(an.phi);
  std::vector<Expr> terms;
  for (int j = 0; j <= order; ++j) {
    an.a.push_back("a" + std::to_string(j));
    terms.push_back(sym(an.a.back()) * pow(phi, Expr(j)));
  }
  for (int j = 1; j <= order; ++j) {
    an.b.push_back("b" + std::to_string(j));
    terms.push_back(sym(an.b.back()) * pow(phi, Expr(-j)));
  }
  an.expansion = Expr::sum(std::move(terms));
  return an;
}

std::vector<Poly> ansatz_derivatives(const Ansatz& ansatz, int max_order) {
  const Expr phi = sym(ansatz.phi);
  const Poly rate = Poly::atom(sym(ansatz.aux)) + Poly::atom(phi).pow(2);
  std::vector<Poly> out{Poly::from_expr(ansatz.expansion)};
  for (int k = 1; k <= max_order; ++k) out.push_back(out.back().derivative(phi) * rate);
  return out;
}

namespace {

int max_marker_order(const Expr& e) {
  if (e.is_derivative()) return e.total_order();
  int k = 0;
  for (const auto& op : e.operands()) k = std::max(k, max_marker_order(op));
  return k;
}

}  // namespace

LaurentExpansion substitute_ansatz(const TravelingWaveODE& ode, const Ansatz& ansatz) {
  if (ode.equations.size() != 1 || ode.profiles.size() != 1) {
    throw DerivationError("the ansatz needs a single equation in a single profile");
  }
  const std::string& w = ode.profiles.front();
  const std::string& z = ode.variable();
  Expr eq = expand(expand_derivatives(ode.equations.front(), {w}));
  const int order = max_marker_order(eq);
  const auto derivs = ansatz_derivatives(ansatz, order);

  std::map<Expr, Poly> images{{sym(w), derivs[0]}};
  for (int k = 1; k <= order; ++k) images[Expr::derivative(sym(w), {{z, k}})] = derivs[static_cast<std::size_t>(k)];

  Poly p = Poly::from_expr(eq);
  for (const auto& a : p.atoms()) {
    if (!images.contains(a) && contains_symbol(a, w)) {
      throw NonPolynomial("the equation is not polynomial in " + w + " and its derivatives: " + a.str());
    }
  }
  Poly sub = p.compose(images);

  LaurentExpansion out;
  out.form = PolyForm::from_poly(sub, {ansatz.phi});
  if (out.form.is_zero()) return out;
  const int lo = out.form.min_exponents()[0];
  const int hi = out.form.max_exponents()[0];
  int lowest = hi;
  for (const auto& t : out.form.terms()) lowest = std::min(lowest, t.first[0]);
  out.clearing_shift = -std::min(lo, lowest);
  for (int k = lowest; k <= hi; ++k) {
    if (out.form.coefficient({k}).is_zero()) out.dropped_powers.push_back(k);
  }
  return out;
}

AlgebraicSystem extract_system(const LaurentExpansion& laurent, const Ansatz& ansatz, const std::string& speed) {
  AlgebraicSystem sys;
  sys.speed = speed;
  sys.clearing_shift = laurent.clearing_shift;
  sys.dropped_powers = laurent.dropped_powers;
  SymbolSet symbols;
  for (const auto& [key, poly] : laurent.form.terms()) {
    sys.equations.push_back({key[0], key[0] + laurent.clearing_shift, poly});
    for (const auto& a : poly.atoms()) {
      for (const auto& s : free_symbols(a)) symbols.insert(s);
    }
  }
  std::sort(sys.equations.begin(), sys.equations.end(),
            [](const AlgebraicEquation& x, const AlgebraicEquation& y) { return x.source_power > y.source_power; });
  sys.unknowns = ansatz.coefficients();
  sys.coefficients.assign(sys.unknowns.begin() + 1, sys.unknowns.end());
  sys.unknowns.push_back(ansatz.aux);
  if (!speed.empty() && symbols.contains(speed)) sys.unknowns.push_back(speed);
  for (const auto& s : symbols) {
    if (std::find(sys.unknowns.begin(), sys.unknowns.end(), s) == sys.unknowns.end()) sys.parameters.push_back(s);
  }
  return sys;
}

}  // namespace meda
