#include <cmath>
#include <random>

#include "doctest.h"
#include "meda/error.hpp"
#include "meda/parser.hpp"
#include "meda/rational_function.hpp"
#include "meda/verify.hpp"

using namespace meda;

namespace {

const std::string kFixtures = MEDA_FIXTURES_DIR;

Expr F(const char* text) { return parse_expr_free(text); }

TravelingWaveODE bq_single() {
  TravelingWaveODE ode;
  ode.equations = {F("D(U,z,z) + U^3/2 + 3*lambda*U^2/2 + lambda^2*U")};
  ode.profiles = {"U"};
  ode.profile_of = {{"u", "U"}};
  ode.cleared_factors = {Expr(1)};
  return ode;
}

std::vector<Complex> box_samples(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  std::vector<Complex> out;
  for (int k = 0; k < count; ++k) {
    const double re = d(rng);
    out.emplace_back(re, d(rng));
  }
  return out;
}

}  // namespace

TEST_CASE("ODE residuals") {
  const TravelingWaveODE ode = bq_single();
  const NumericBindings params{{"lambda", -1.0}};
  const auto zs = box_samples(100, 1);

  const ResidualReport good = ode_residual(ode, {{"U", F("1 + 2*i*(1/2)*tan(z/2)")}}, zs, params);
  CHECK(good.evaluated + good.skipped == 100);
  CHECK(good.evaluated >= 90);
  CHECK(good.max() < 1e-10);

  const ResidualReport zero = ode_residual(ode, {{"U", Expr(0)}}, zs, params);
  CHECK(zero.max() == 0.0);
  CHECK(zero.skipped == 0);

  const ResidualReport printed = ode_residual(ode, {{"U", F("1 + 2*i*(-(1/2)*coth(z/2))")}}, zs, {{"lambda", -1.0}});
  CHECK(printed.max() > 1e-2);

  CHECK_THROWS_AS(ode_residual(ode, {{"U", F("1/(z - z)")}}, zs, params), Error);
  CHECK_THROWS_AS(ode_residual(ode, {{"U", F("1/z")}}, {Complex(0.0, 0.0)}, params), PoleError);
}

TEST_CASE("PDE residuals on the default grid") {
  const PDEProblem bq = parse_problem(kFixtures + "/boussinesq.meda");
  const Expr u = F("1 - tanh((x - t)/2)");
  const Expr v = u - pow(u, Expr(2)) / Expr(2);
  const ResidualReport r = pde_residual(bq, {{"u", u}, {"v", v}}, GridSpec{}, {});
  CHECK(r.total == 231);
  CHECK(r.evaluated == 231);
  CHECK(r.skipped == 0);
  REQUIRE(r.per_equation.size() == 2);
  CHECK(r.per_equation[0].max < 1e-8);
  CHECK(r.per_equation[1].max < 1e-8);
  CHECK(r.crosschecked_points == 5);
  CHECK(r.crosscheck_max_relative < 1e-4);

  const ResidualReport zero = pde_residual(bq, {{"u", Expr(0)}, {"v", Expr(0)}}, GridSpec{}, {});
  CHECK(zero.max() == 0.0);

  const ResidualReport wrong = pde_residual(bq, {{"u", u}, {"v", u}}, GridSpec{}, {});
  CHECK(wrong.max() > 1e-3);

  CHECK_THROWS_AS(pde_residual(bq, {{"u", u}}, GridSpec{}, {}), UnboundSymbol);
}

TEST_CASE("poles are skipped and counted") {
  const PDEProblem bq = parse_problem(kFixtures + "/boussinesq.meda");
  const Expr u = F("1 - coth((x - t)/2)");
  const Expr v = u - pow(u, Expr(2)) / Expr(2);
  ResidualOptions opts;
  opts.eval.pole_guard = 1e-3;
  const ResidualReport r = pde_residual(bq, {{"u", u}, {"v", v}}, GridSpec{}, {}, opts);
  CHECK(r.skipped > 0);
  CHECK(r.skipped + r.evaluated == r.total);
  CHECK(r.max() < 1e-8);
  for (const auto& e : r.per_equation) {
    CHECK(e.max >= e.mean);
    CHECK(e.mean >= 0.0);
  }
  const auto j = r.to_json();
  CHECK(j.contains("grid"));
  CHECK(j.at("evaluated").get<std::size_t>() == r.evaluated);
  CHECK(j.at("skipped").get<std::size_t>() == r.skipped);
  REQUIRE(j.at("per_equation").size() == 2);
  CHECK(j.at("per_equation")[0].contains("worst_point"));
}

TEST_CASE("grids") {
  const GridSpec g = parse_grid("-1:1:5,0:2:3");
  CHECK(g.size() == 15);
  CHECK(g.x(0) == -1.0);
  CHECK(g.x(4) == 1.0);
  CHECK(g.t(1) == 1.0);
  CHECK(parse_grid(g.str()).size() == 15);
  CHECK_THROWS_AS(parse_grid("1:2"), Error);
  CHECK_THROWS_AS(parse_grid("a:b:c,0:1:2"), Error);

  const auto w = wave_samples(g, 1, Complex(-1.0, 0.0));
  REQUIRE(w.size() == 15);
  CHECK(std::abs(w[0] - Complex(0.0, -1.0)) < 1e-15);
  CHECK(std::abs(w[1] - Complex(0.0, -2.0)) < 1e-15);
}

TEST_CASE("property: halving the difference step refines at second order") {
  const std::vector<std::function<Complex(double, double)>> fs{
      [](double x, double t) { return Complex(std::sin(1.3 * x + 0.7 * t) * std::exp(0.4 * x * t)); },
      [](double x, double t) { return Complex(std::tanh(0.8 * x - 0.5 * t), std::cos(x * t)); },
      [](double x, double t) { return Complex(1.0 / (2.0 + x * x + t)); },
  };
  const std::vector<std::pair<int, int>> orders{{1, 0}, {0, 1}, {2, 0}, {1, 1}, {3, 0}, {2, 1}};
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> d(-0.8, 0.8);
  for (const auto& f : fs) {
    for (int trial = 0; trial < 5; ++trial) {
      const double x = d(rng);
      const double t = d(rng) + 1.0;
      for (const auto& [nx, nt] : orders) {
        const double h = 0.05;
        const Complex d1 = central_difference(f, x, t, nx, nt, h);
        const Complex d2 = central_difference(f, x, t, nx, nt, h / 2);
        const Complex d4 = central_difference(f, x, t, nx, nt, h / 4);
        const double coarse = std::abs(d1 - d2);
        const double fine = std::abs(d2 - d4);
        if (coarse < 1e-12) continue;
        CHECK(std::log2(coarse / fine) >= 1.8);
      }
    }
  }
}

TEST_CASE("exact parameter bindings") {
  const Bindings b = exact_parameters({{"a", 0.25}, {"c", Complex(1.0, -2.0)}});
  CHECK(poly_zero_check(b.at("a") - F("1/4")));
  CHECK(poly_zero_check(b.at("c") - F("1 - 2*i")));
}
