#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <map>
#include <optional>
#include <cmath>
#include <random>

#include "meda/algsolve.hpp"
#include "meda/error.hpp"

namespace meda {

namespace {

using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

Complex ipow(Complex v, int e) {
  Complex r(1.0, 0.0);
  for (; e > 0; --e) r *= v;
  return r;
}

struct CompiledTerm {
  Complex coef;
  std::vector<std::pair<int, int>> powers;  // (unknown index, exponent)
};

struct CompiledSystem {
  std::vector<std::vector<CompiledTerm>> equations;
  int size = 0;

  CVector value(const CVector& x) const {
    CVector f(static_cast<Eigen::Index>(equations.size()));
    for (std::size_t k = 0; k < equations.size(); ++k) {
      Complex s(0.0, 0.0);
      for (const auto& t : equations[k]) {
        Complex v = t.coef;
        for (const auto& [j, e] : t.powers) v *= ipow(x[j], e);
        s += v;
      }
      f[static_cast<Eigen::Index>(k)] = s;
    }
    return f;
  }

  /// Nonzero coordinates the system does not depend on once the zero
  /// coordinates are held fixed.
  std::vector<bool> independent(const CVector& x) const {
    std::vector<bool> out(static_cast<std::size_t>(size), false);
    for (int j = 0; j < size; ++j) out[static_cast<std::size_t>(j)] = x[j] != Complex(0.0, 0.0);
    for (const auto& eq : equations) {
      for (const auto& t : eq) {
        const bool vanishes =
            std::any_of(t.powers.begin(), t.powers.end(), [&](const auto& p) { return x[p.first] == Complex(0.0, 0.0); });
        if (vanishes) continue;
        for (const auto& [j, e] : t.powers) out[static_cast<std::size_t>(j)] = false;
      }
    }
    return out;
  }

  CMatrix jacobian(const CVector& x) const {
    CMatrix jac = CMatrix::Zero(static_cast<Eigen::Index>(equations.size()), size);
    for (std::size_t k = 0; k < equations.size(); ++k) {
      for (const auto& t : equations[k]) {
        for (std::size_t d = 0; d < t.powers.size(); ++d) {
          Complex v = t.coef * static_cast<double>(t.powers[d].second);
          for (std::size_t q = 0; q < t.powers.size(); ++q) {
            const auto& [j, e] = t.powers[q];
            v *= ipow(x[j], q == d ? e - 1 : e);
          }
          jac(static_cast<Eigen::Index>(k), t.powers[d].first) += v;
        }
      }
    }
    return jac;
  }
};

CompiledSystem compile(const AlgebraicSystem& system, const std::vector<std::string>& free, const NumericBindings& fixed) {
  CompiledSystem cs;
  cs.size = static_cast<int>(free.size());
  std::map<Expr, int> index;
  for (std::size_t k = 0; k < free.size(); ++k) index[sym(free[k])] = static_cast<int>(k);
  for (const auto& eq : system.equations) {
    std::map<std::vector<std::pair<int, int>>, Complex> acc;
    for (const auto& [m, c] : eq.poly.terms()) {
      Complex coef = c.to_complex();
      std::vector<std::pair<int, int>> powers;
      for (const auto& [a, e] : m.factors()) {
        auto it = index.find(a);
        if (it != index.end()) {
          if (e < 0) throw Error("negative power of unknown " + a.str() + " in the algebraic system");
          powers.emplace_back(it->second, e);
        } else {
          coef *= std::pow(eval_complex(a, fixed), e);
        }
      }
      std::sort(powers.begin(), powers.end());
      acc[powers] += coef;
    }
    std::vector<CompiledTerm> terms;
    for (auto& [p, c] : acc) {
      if (c != Complex(0.0, 0.0)) terms.push_back({c, p});
    }
    cs.equations.push_back(std::move(terms));
  }
  return cs;
}

double inf_norm(const CVector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

long rounded(double v) { return std::lround(v * 1e8); }

Complex snap(Complex v) {
  const double re = std::abs(v.real()) < 1e-12 ? 0.0 : v.real();
  const double im = std::abs(v.imag()) < 1e-12 ? 0.0 : v.imag();
  return {re, im};
}


/// Rounds small real and imaginary parts to zero when the residual stays
/// below the tolerance, trying the coarsest threshold first.
void settle(const CompiledSystem& cs, CVector& x, double tol) {
  for (Eigen::Index j = 0; j < x.size(); ++j) x[j] = snap(x[j]);
  const double scale = 1.0 + inf_norm(x);
  auto rounded_parts = [&](const CVector& v, double small) {
    CVector out = v;
    for (Eigen::Index j = 0; j < v.size(); ++j) {
      out[j] = Complex(std::abs(v[j].real()) < small ? 0.0 : v[j].real(), std::abs(v[j].imag()) < small ? 0.0 : v[j].imag());
    }
    return out;
  };
  for (const double small : {1e-3, 1e-4, 1e-5, 1e-6}) {
    const CVector all = rounded_parts(x, small * scale);
    if (inf_norm(cs.value(all)) < tol) {
      x = all;
      return;
    }
  }
  const CVector all = rounded_parts(x, 1e-6 * scale);
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    CVector trial = x;
    trial[j] = all[j];
    if (trial[j] != x[j] && inf_norm(cs.value(trial)) < tol) x = trial;
  }
}

/// Nearest p/q with q <= 24 within 1e-5 of v, or v itself.
double nearby_fraction(double v) {
  for (int q = 1; q <= 24; ++q) {
    const double p = std::round(v * q);
    if (std::abs(v - p / q) < 1e-5 * (1.0 + std::abs(v))) return p / q;
  }
  return v;
}

/// Replaces parts by nearby simple fractions when that does not increase
/// the residual.
void rationalize(const CompiledSystem& cs, CVector& x, double tol) {
  CVector trial = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) trial[j] = Complex(nearby_fraction(x[j].real()), nearby_fraction(x[j].imag()));
  if (trial == x) return;
  const double now = inf_norm(cs.value(x));
  const double after = inf_norm(cs.value(trial));
  if (after < tol && after <= now) x = trial;
}

/// The system on the subspace where the frozen coordinates vanish, with
/// each equation divided by its largest monomial factor in the saturated
/// coordinates. Empty when some equation reduces to a nonzero constant.
std::optional<CompiledSystem> restrict_to(const CompiledSystem& cs, const std::vector<bool>& frozen,
                                          const std::vector<bool>& saturated) {
  CompiledSystem out;
  out.size = cs.size;
  for (const auto& eq : cs.equations) {
    std::vector<CompiledTerm> terms;
    for (const auto& t : eq) {
      const bool vanishes =
          std::any_of(t.powers.begin(), t.powers.end(), [&](const auto& p) { return frozen[static_cast<std::size_t>(p.first)]; });
      if (!vanishes) terms.push_back(t);
    }
    if (terms.empty()) continue;
    std::map<int, int> common;
    for (const auto& [j, e] : terms.front().powers) {
      if (saturated[static_cast<std::size_t>(j)]) common[j] = e;
    }
    for (const auto& t : terms) {
      std::map<int, int> here(t.powers.begin(), t.powers.end());
      for (auto it = common.begin(); it != common.end();) {
        auto h = here.find(it->first);
        if (h == here.end()) {
          it = common.erase(it);
        } else {
          it->second = std::min(it->second, h->second);
          ++it;
        }
      }
    }
    for (auto& t : terms) {
      std::vector<std::pair<int, int>> powers;
      for (const auto& [j, e] : t.powers) {
        auto c = common.find(j);
        const int left = c == common.end() ? e : e - c->second;
        if (left > 0) powers.emplace_back(j, left);
      }
      t.powers = std::move(powers);
    }
    if (terms.size() == 1 && terms.front().powers.empty()) return std::nullopt;
    out.equations.push_back(std::move(terms));
  }
  return out;
}

struct Outcome {
  bool converged = false;
  bool singular = false;
};

CMatrix frozen_jacobian(const CompiledSystem& cs, const CVector& x, const std::vector<bool>& frozen) {
  CMatrix jac = cs.jacobian(x);
  for (int j = 0; j < cs.size; ++j) {
    if (frozen[static_cast<std::size_t>(j)]) jac.col(j).setZero();
  }
  return jac;
}

/// Damped Gauss-Newton on the reduced system, then plain steps on the full
/// system until they stall.
Outcome newton(const CompiledSystem& reduced, const CompiledSystem& cs, CVector& x, const std::vector<bool>& frozen,
               const SolveConfig& config) {
  Outcome out;
  CVector f = reduced.value(x);
  int stagnant = 0;
  for (int it = 0; it < config.max_iterations && inf_norm(f) >= config.tol; ++it) {
    const CMatrix jac = frozen_jacobian(reduced, x, frozen);
    if (!jac.allFinite()) return out;
    Eigen::CompleteOrthogonalDecomposition<CMatrix> cod(jac);
    if (cod.rank() == 0) {
      out.singular = true;
      return out;
    }
    const CVector step = cod.solve(-f);
    if (!step.allFinite()) {
      out.singular = true;
      return out;
    }
    const double fn = f.norm();
    double alpha = 1.0;
    double accepted = -1.0;
    for (int ls = 0; ls < 12; ++ls) {
      const CVector trial = x + alpha * step;
      const CVector ft = reduced.value(trial);
      const double tn = ft.norm();
      if (std::isfinite(tn) && tn < fn) {
        x = trial;
        f = ft;
        accepted = tn;
        break;
      }
      alpha *= 0.5;
    }
    if (accepted < 0.0) return out;
    stagnant = accepted > (1.0 - 1e-6) * fn ? stagnant + 1 : 0;
    if (stagnant >= 5) return out;
  }
  if (inf_norm(f) >= config.tol) return out;

  f = cs.value(x);
  double fn = f.norm();
  for (int p = 0; p < 60 && fn > 0.0; ++p) {
    Eigen::CompleteOrthogonalDecomposition<CMatrix> cod(frozen_jacobian(cs, x, frozen));
    const CVector step = cod.solve(-f);
    if (!step.allFinite()) break;
    const CVector trial = x + step;
    const CVector ft = cs.value(trial);
    if (!(ft.norm() <= fn)) break;
    x = trial;
    f = ft;
    fn = ft.norm();
    if (inf_norm(step) <= 1e-14 * (1.0 + inf_norm(x))) break;
  }
  out.converged = inf_norm(f) < config.tol;
  return out;
}

}  // namespace

SolveResult solve_numeric(const AlgebraicSystem& system, const NumericBindings& params, const NumericBindings& pinned,
                          const SolveConfig& config) {
  if (config.starts <= 0 || config.radius <= 0 || config.tol <= 0 || config.dedup <= 0 || config.max_iterations <= 0) {
    throw Error("solver settings must be positive");
  }
  NumericBindings fixed = params;
  for (const auto& [k, v] : pinned) fixed[k] = v;
  for (const auto& p : system.parameters) {
    if (!fixed.contains(p)) throw UnboundSymbol(p);
  }
  SolveResult result;
  for (const auto& u : system.unknowns) {
    if (!fixed.contains(u)) result.free_unknowns.push_back(u);
  }
  if (result.free_unknowns.size() > 8) throw Error("more than 8 free unknowns; pin some of them");

  const CompiledSystem cs = compile(system, result.free_unknowns, fixed);
  const int m = cs.size;

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  struct Root {
    CVector x;
    std::vector<bool> arbitrary;
  };
  std::vector<Root> roots;
  int singular = 0;
  int attempts = 0;
  if (m == 0) {
    attempts = config.starts;
    if (inf_norm(cs.value(CVector(0))) < config.tol) {
      result.converged_starts = config.starts;
      roots.push_back({CVector(0), {}});
    }
  }

  // Every zero pattern of the expansion coefficients. Within a pattern the
  // remaining coefficients are taken nonzero and divided out.
  std::vector<int> coefficient_index;
  std::vector<bool> saturated(static_cast<std::size_t>(m), false);
  for (const auto& c : system.coefficients) {
    auto it = std::find(result.free_unknowns.begin(), result.free_unknowns.end(), c);
    if (it == result.free_unknowns.end()) continue;
    coefficient_index.push_back(static_cast<int>(it - result.free_unknowns.begin()));
    saturated[static_cast<std::size_t>(coefficient_index.back())] = true;
  }
  std::vector<unsigned> patterns;
  const unsigned count = m == 0 ? 0U : 1U << coefficient_index.size();
  for (unsigned p = 0; p < count; ++p) patterns.push_back(p);
  std::stable_sort(patterns.begin(), patterns.end(),
                   [](unsigned x, unsigned y) { return std::popcount(x) < std::popcount(y); });

  for (const unsigned pattern : patterns) {
    std::vector<bool> frozen(static_cast<std::size_t>(m), false);
    for (std::size_t k = 0; k < coefficient_index.size(); ++k) {
      if ((pattern >> k & 1U) != 0) frozen[static_cast<std::size_t>(coefficient_index[k])] = true;
    }
    std::vector<bool> divisible = saturated;
    for (int j = 0; j < m; ++j) divisible[static_cast<std::size_t>(j)] = saturated[static_cast<std::size_t>(j)] && !frozen[static_cast<std::size_t>(j)];
    const std::optional<CompiledSystem> reduced = restrict_to(cs, frozen, divisible);
    for (int s = 0; s < config.starts; ++s) {
      ++attempts;
      CVector x(m);
      std::vector<double> g(static_cast<std::size_t>(2 * m));
      double norm = 0.0;
      for (auto& v : g) {
        v = gauss(rng);
        norm += v * v;
      }
      norm = std::sqrt(norm);
      const double r = config.radius * std::pow(unit(rng), 1.0 / (2.0 * m));
      for (int j = 0; j < m; ++j) {
        const double scale = norm > 0 ? r / norm : 0.0;
        x[j] = frozen[static_cast<std::size_t>(j)]
                   ? Complex(0.0, 0.0)
                   : Complex(g[static_cast<std::size_t>(2 * j)] * scale, g[static_cast<std::size_t>(2 * j + 1)] * scale);
      }
      if (!reduced) continue;
      const Outcome out = newton(*reduced, cs, x, frozen, config);
      if (out.singular) ++singular;
      if (!out.converged || !x.allFinite()) continue;
      ++result.converged_starts;
      settle(cs, x, config.tol);
      rationalize(cs, x, config.tol);
      Root root{x, cs.independent(x)};
      for (int j = 0; j < m; ++j) {
        if (root.arbitrary[static_cast<std::size_t>(j)]) root.x[j] = Complex(0.0, 0.0);
      }
      auto on_family = [&](const Root& family, const Root& point) {
        for (int j = 0; j < m; ++j) {
          if (!family.arbitrary[static_cast<std::size_t>(j)] && std::abs(family.x[j] - point.x[j]) >= config.dedup) return false;
        }
        return true;
      };
      auto covers = [&](const Root& known) {
        for (int j = 0; j < m; ++j) {
          if (root.arbitrary[static_cast<std::size_t>(j)] && !known.arbitrary[static_cast<std::size_t>(j)]) return false;
        }
        return on_family(known, root);
      };
      if (std::any_of(roots.begin(), roots.end(), covers)) continue;
      std::erase_if(roots, [&](const Root& known) { return on_family(root, known); });
      roots.push_back(root);
    }
  }
  result.attempted_starts = attempts;
  result.all_singular = singular == attempts && attempts > 0 && m > 0;

  auto key = [&](const Root& r) {
    std::vector<long> k;
    for (int j = 0; j < m; ++j) {
      const bool arb = r.arbitrary[static_cast<std::size_t>(j)];
      k.push_back(arb ? 1 : 0);
      k.push_back(arb ? 0 : rounded(r.x[j].real()));
      k.push_back(arb ? 0 : rounded(r.x[j].imag()));
    }
    return k;
  };
  std::stable_sort(roots.begin(), roots.end(), [&](const Root& a, const Root& b) { return key(a) < key(b); });

  for (const auto& r : roots) {
    Candidate c;
    c.source = "solver";
    for (const auto& [k, v] : pinned) c.numeric[k] = v;
    for (int j = 0; j < m; ++j) {
      const std::string& name = result.free_unknowns[static_cast<std::size_t>(j)];
      c.numeric[name] = r.x[j];
      if (r.arbitrary[static_cast<std::size_t>(j)]) c.arbitrary.insert(name);
    }
    NumericBindings all = fixed;
    for (const auto& [k, v] : c.numeric) all[k] = v;
    if (numeric_residual(system, all) >= config.tol) continue;
    c.status = CandidateStatus::verified;
    result.candidates.push_back(std::move(c));
  }
  return result;
}

}  // namespace meda
