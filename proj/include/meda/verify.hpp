#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "meda/closed_form.hpp"
#include "meda/eval.hpp"
#include "meda/pde.hpp"

namespace meda {

struct GridSpec {
  double x0 = -2.0;
  double x1 = 2.0;
  int nx = 21;
  double t0 = 0.0;
  double t1 = 1.0;
  int nt = 11;

  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(nt); }
  double x(int k) const { return nx == 1 ? x0 : x0 + (x1 - x0) * k / (nx - 1); }
  double t(int k) const { return nt == 1 ? t0 : t0 + (t1 - t0) * k / (nt - 1); }
  std::string str() const;
};

/// Parses "x0:x1:nx,t0:t1:nt".
GridSpec parse_grid(const std::string& text);

struct EquationResidual {
  double max = 0.0;
  double mean = 0.0;
  std::vector<double> worst_point;
  std::size_t worst_index = 0;
};

struct ResidualReport {
  std::string grid;
  std::size_t total = 0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
  std::vector<EquationResidual> per_equation;
  int crosschecked_points = 0;
  double crosscheck_max_relative = 0.0;

  double max() const;
  nlohmann::json to_json() const;
};

struct ResidualOptions {
  EvalOptions eval;
  int crosscheck_points = 5;
  double crosscheck_tol = 1e-4;
  std::uint64_t seed = 0;
};

/// Residual of each ODE equation with the profiles replaced by expressions in
/// the wave variable, at the given complex samples.
ResidualReport ode_residual(const TravelingWaveODE& ode, const Bindings& profiles, const std::vector<Complex>& z_samples,
                            const NumericBindings& params, const EvalOptions& opts = {});

/// Residual of the original PDEs on an (x, t) grid, with a central
/// finite-difference cross-check of every derivative at random points.
ResidualReport pde_residual(const PDEProblem& problem, const Bindings& fields, const GridSpec& grid,
                            const NumericBindings& params, const ResidualOptions& opts = {});
ResidualReport pde_residual(const PDEProblem& problem, const ClosedFormSolution& sol, const GridSpec& grid,
                            const NumericBindings& params, const ResidualOptions& opts = {});

/// Second-order central difference of f(x, t), nx times in x and nt times in t.
Complex central_difference(const std::function<Complex(double, double)>& f, double x, double t, int nx, int nt, double h);

/// Wave variable values i*(x + sign*speed*t) over the grid, row-major in x.
std::vector<Complex> wave_samples(const GridSpec& grid, int sign, Complex speed);

/// Binds each numeric parameter as an exact constant.
Bindings exact_parameters(const NumericBindings& params);

}  // namespace meda
