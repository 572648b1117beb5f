#include "meda/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "meda/calculus.hpp"
#include "meda/error.hpp"

namespace meda {

std::string GridSpec::str() const {
  std::ostringstream out;
  out << x0 << ":" << x1 << ":" << nx << "," << t0 << ":" << t1 << ":" << nt;
  return out.str();
}

GridSpec parse_grid(const std::string& text) {
  GridSpec g;
  char c1 = 0;
  char c2 = 0;
  char c3 = 0;
  char c4 = 0;
  char c5 = 0;
  std::istringstream in(text);
  in >> g.x0 >> c1 >> g.x1 >> c2 >> g.nx >> c3 >> g.t0 >> c4 >> g.t1 >> c5 >> g.nt;
  std::string rest;
  in >> rest;
  if (in.bad() || c1 != ':' || c2 != ':' || c3 != ',' || c4 != ':' || c5 != ':' || !rest.empty() || g.nx < 1 || g.nt < 1) {
    throw Error("grid must look like 'x0:x1:nx,t0:t1:nt', got '" + text + "'");
  }
  return g;
}

double ResidualReport::max() const {
  double m = 0.0;
  for (const auto& e : per_equation) m = std::max(m, e.max);
  return m;
}

nlohmann::json ResidualReport::to_json() const {
  nlohmann::json eqs = nlohmann::json::array();
  for (const auto& e : per_equation) {
    eqs.push_back({{"max", e.max}, {"mean", e.mean}, {"worst_point", e.worst_point}});
  }
  return {{"grid", grid}, {"evaluated", evaluated}, {"skipped", skipped}, {"per_equation", eqs}};
}

Bindings exact_parameters(const NumericBindings& params) {
  Bindings out;
  for (const auto& [k, v] : params) out[k] = Expr(GaussianRational::from_complex(v));
  return out;
}

std::vector<Complex> wave_samples(const GridSpec& grid, int sign, Complex speed) {
  std::vector<Complex> out;
  for (int a = 0; a < grid.nx; ++a) {
    for (int b = 0; b < grid.nt; ++b) {
      out.push_back(Complex(0.0, 1.0) * (grid.x(a) + static_cast<double>(sign) * speed * grid.t(b)));
    }
  }
  return out;
}

namespace {

struct Accumulator {
  std::vector<EquationResidual> eqs;
  std::vector<double> sums;

  explicit Accumulator(std::size_t n) : eqs(n), sums(n, 0.0) {}

  void add(std::size_t eq, std::size_t index, double value, std::vector<double> point) {
    sums[eq] += value;
    if (value > eqs[eq].max || eqs[eq].worst_point.empty()) {
      eqs[eq].max = value;
      eqs[eq].worst_point = std::move(point);
      eqs[eq].worst_index = index;
    }
  }

  void finish(ResidualReport& r) {
    for (std::size_t k = 0; k < eqs.size(); ++k) {
      eqs[k].mean = r.evaluated == 0 ? 0.0 : sums[k] / static_cast<double>(r.evaluated);
    }
    r.per_equation = std::move(eqs);
    if (r.evaluated == 0) throw PoleError("every sample point is singular");
  }
};

}  // namespace

ResidualReport ode_residual(const TravelingWaveODE& ode, const Bindings& profiles, const std::vector<Complex>& z_samples,
                            const NumericBindings& params, const EvalOptions& opts) {
  const Bindings exact = exact_parameters(params);
  Bindings prof;
  for (const auto& [k, v] : profiles) prof[k] = substitute(v, exact);
  std::vector<Expr> residuals;
  for (const auto& eq : ode.equations) residuals.push_back(substitute(instantiate_profiles(eq, prof), exact));

  ResidualReport r;
  r.grid = std::to_string(z_samples.size()) + " samples";
  r.total = z_samples.size();
  Accumulator acc(residuals.size());
  NumericBindings vals = params;
  for (std::size_t k = 0; k < z_samples.size(); ++k) {
    vals[ode.variable()] = z_samples[k];
    std::vector<double> values;
    try {
      for (const auto& e : residuals) values.push_back(std::abs(eval_complex(e, vals, opts)));
    } catch (const PoleError&) {
      ++r.skipped;
      continue;
    }
    ++r.evaluated;
    for (std::size_t q = 0; q < values.size(); ++q) acc.add(q, k, values[q], {z_samples[k].real(), z_samples[k].imag()});
  }
  acc.finish(r);
  return r;
}

namespace {

void collect_markers(const Expr& e, std::vector<Expr>& out) {
  if (e.is_derivative()) {
    if (std::find(out.begin(), out.end(), e) == out.end()) out.push_back(e);
    return;
  }
  for (const auto& op : e.operands()) collect_markers(op, out);
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

template <typename F>
Complex central(const F& f, double at, int order, double h) {
  if (order == 0) return f(at);
  Complex s(0.0, 0.0);
  for (int j = 0; j <= order; ++j) {
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    s += sign * binomial(order, j) * f(at + (order / 2.0 - j) * h);
  }
  return s / std::pow(h, order);
}

double step_for(int order) { return std::pow(1e-5, 3.0 / (order + 2)); }

}  // namespace

Complex central_difference(const std::function<Complex(double, double)>& f, double x, double t, int nx, int nt, double h) {
  auto along_t = [&](double xx) { return central([&](double tt) { return f(xx, tt); }, t, nt, h); };
  return central(along_t, x, nx, h);
}

ResidualReport pde_residual(const PDEProblem& problem, const Bindings& fields, const GridSpec& grid,
                            const NumericBindings& params, const ResidualOptions& opts) {
  const Bindings exact = exact_parameters(params);
  Bindings subs;
  for (const auto& [k, v] : fields) subs[k] = substitute(v, exact);
  for (const auto& u : problem.unknowns) {
    if (!subs.contains(u)) throw UnboundSymbol(u);
  }
  std::vector<Expr> residuals;
  for (const auto& eq : problem.equations) {
    residuals.push_back(substitute(expand_derivatives(substitute(eq, subs), {}), exact));
  }

  ResidualReport r;
  r.grid = grid.str();
  r.total = grid.size();
  Accumulator acc(residuals.size());
  NumericBindings vals = params;
  std::size_t index = 0;
  for (int a = 0; a < grid.nx; ++a) {
    for (int b = 0; b < grid.nt; ++b, ++index) {
      vals[problem.space] = grid.x(a);
      vals[problem.time] = grid.t(b);
      std::vector<double> values;
      try {
        for (const auto& e : residuals) values.push_back(std::abs(eval_complex(e, vals, opts.eval)));
      } catch (const PoleError&) {
        ++r.skipped;
        continue;
      }
      ++r.evaluated;
      for (std::size_t q = 0; q < values.size(); ++q) acc.add(q, index, values[q], {grid.x(a), grid.t(b)});
    }
  }
  acc.finish(r);

  // finite-difference cross-check of every derivative occurring in the PDEs
  std::vector<Expr> markers;
  for (const auto& eq : problem.equations) collect_markers(eq, markers);
  struct Check {
    Expr body;
    Expr symbolic;
    int nx;
    int nt;
  };
  std::vector<Check> checks;
  for (const auto& m : markers) {
    Check c{substitute(substitute(m.inner(), subs), exact), substitute(expand_derivatives(substitute(m, subs), {}), exact), 0, 0};
    for (const auto& o : m.orders()) (o.var == problem.space ? c.nx : c.nt) += o.order;
    checks.push_back(c);
  }
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> ux(grid.x0, grid.x1);
  std::uniform_real_distribution<double> ut(grid.t0, grid.t1);
  EvalOptions strict = opts.eval;
  strict.pole_guard = std::max(strict.pole_guard, 1e-2);
  int attempts = 0;
  while (r.crosschecked_points < opts.crosscheck_points && attempts < 50 * std::max(1, opts.crosscheck_points)) {
    ++attempts;
    const double x = ux(rng);
    const double t = ut(rng);
    std::vector<std::pair<Complex, Complex>> pairs;
    try {
      for (const auto& c : checks) {
        NumericBindings at = params;
        at[problem.space] = x;
        at[problem.time] = t;
        const Complex sym_value = eval_complex(c.symbolic, at, strict);
        auto body = [&](double xx, double tt) {
          NumericBindings p = params;
          p[problem.space] = xx;
          p[problem.time] = tt;
          return eval_complex(c.body, p, strict);
        };
        auto stencil = [&](double h) { return central_difference(body, x, t, c.nx, c.nt, h); };
        const double h = step_for(c.nx + c.nt);
        // one Richardson step on top of the second-order stencil
        const Complex fd = (4.0 * stencil(h / 2) - stencil(h)) / 3.0;
        pairs.emplace_back(sym_value, fd);
      }
    } catch (const PoleError&) {
      continue;
    }
    ++r.crosschecked_points;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const auto& [s, fd] = pairs[k];
      const double rel = std::abs(fd - s) / std::max(1.0, std::abs(s));
      r.crosscheck_max_relative = std::max(r.crosscheck_max_relative, rel);
      if (rel > opts.crosscheck_tol) {
        std::ostringstream msg;
        msg << "finite differences disagree with the symbolic derivative " << markers[k].str() << " at x=" << x << ", t=" << t
            << " (symbolic " << s << ", numeric " << fd << ")";
        throw CrossCheckError(msg.str());
      }
    }
  }
  return r;
}

ResidualReport pde_residual(const PDEProblem& problem, const ClosedFormSolution& sol, const GridSpec& grid,
                            const NumericBindings& params, const ResidualOptions& opts) {
  Bindings fields(sol.fields.begin(), sol.fields.end());
  return pde_residual(problem, fields, grid, params, opts);
}

}  // namespace meda
