#include <algorithm>

#include "meda/algsolve.hpp"
#include "meda/calculus.hpp"
#include "meda/error.hpp"
#include "meda/rational_function.hpp"

namespace meda {

Bindings Candidate::resolved() const {
  Bindings abbrev;
  for (const auto& [name, value] : abbreviations) abbrev[name] = substitute(value, abbrev);
  Bindings out;
  for (const auto& [name, value] : bindings) out[name] = substitute(value, abbrev);
  return out;
}

namespace {

RationalFunction evaluate(const Poly& p, const std::map<Expr, RationalFunction>& images) {
  std::map<std::pair<Expr, int>, RationalFunction> cache;
  RationalFunction out;
  for (const auto& [m, c] : p.terms()) {
    RationalFunction t(Poly::term(c, Monomial()));
    Monomial rest;
    for (const auto& [a, e] : m.factors()) {
      auto it = images.find(a);
      if (it == images.end()) {
        rest = rest * Monomial::atom(a, e);
        continue;
      }
      auto key = std::make_pair(a, e);
      auto hit = cache.find(key);
      if (hit == cache.end()) hit = cache.emplace(key, it->second.pow(e)).first;
      t *= hit->second;
      if (t.is_zero()) break;
    }
    if (t.is_zero()) continue;
    out += t * RationalFunction(Poly::term(GaussianRational(1), rest));
  }
  return out.reduce_radicals();
}

}  // namespace

VerificationReport verify_candidate(const AlgebraicSystem& system, const Candidate& cand) {
  if (cand.is_numeric()) throw CandidateError("numeric candidates are checked with numeric_residual");
  const Bindings bound = cand.resolved();
  SymbolSet unknowns(system.unknowns.begin(), system.unknowns.end());
  SymbolSet known = unknowns;
  known.insert(system.parameters.begin(), system.parameters.end());

  SymbolSet allowed(system.parameters.begin(), system.parameters.end());
  allowed.insert(cand.arbitrary.begin(), cand.arbitrary.end());
  for (const auto& s : cand.arbitrary) {
    if (!known.contains(s)) throw CandidateError("arbitrary symbol '" + s + "' is not part of the system");
  }
  for (const auto& [name, value] : bound) {
    if (!known.contains(name)) throw CandidateError("binding for undeclared symbol '" + name + "'");
    for (const auto& s : free_symbols(value)) {
      if (!allowed.contains(s)) {
        throw CandidateError("binding of '" + name + "' references '" + s + "', which is neither a parameter nor arbitrary");
      }
    }
  }
  for (const auto& u : system.unknowns) {
    if (!bound.contains(u) && !cand.arbitrary.contains(u)) throw CandidateError("unknown '" + u + "' is neither bound nor arbitrary");
  }

  std::map<Expr, RationalFunction> images;
  for (const auto& [name, value] : bound) images.emplace(sym(name), RationalFunction::from_expr(value));

  VerificationReport report;
  report.pass = true;
  for (const auto& eq : system.equations) {
    RationalFunction r = evaluate(eq.poly, images);
    EquationCheck check{eq.source_power, r.is_zero(), {}};
    if (!check.zero) {
      check.residual = r.to_expr().str();
      report.pass = false;
    }
    report.equations.push_back(std::move(check));
  }
  if (!system.dropped_powers.empty()) {
    std::string note = "identically vanishing powers:";
    for (int k : system.dropped_powers) note += " " + std::to_string(k);
    report.notes.push_back(note);
  }
  return report;
}

double numeric_residual(const AlgebraicSystem& system, const NumericBindings& values) {
  double worst = 0.0;
  for (const auto& eq : system.equations) worst = std::max(worst, std::abs(eval_complex(eq.poly.to_expr(), values)));
  return worst;
}

}  // namespace meda
