#include <cmath>
#include <random>

#include "doctest.h"
#include "meda/calculus.hpp"
#include "meda/error.hpp"
#include "meda/eval.hpp"
#include "meda/parser.hpp"
#include "meda/pde.hpp"
#include "meda/rational_function.hpp"

using namespace meda;

namespace {

const std::string kFixtures = MEDA_FIXTURES_DIR;

PDEProblem load(const std::string& name) { return parse_problem(kFixtures + "/" + name + ".meda"); }

Expr F(const char* text) { return parse_expr_free(text); }

bool same(const Expr& a, const Expr& b) { return poly_zero_check(a - b); }

bool same_up_to_sign(const Expr& a, const Expr& b) { return same(a, b) || same(a, -b); }

/// Smooth test profile in z with rational coefficients.
Expr test_profile(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(1, 5);
  const Expr k = Expr::ratio(d(rng), 7);
  const Expr th = apply(Func::tanh, k * sym("z"));
  return Expr::ratio(d(rng), 3) + Expr::ratio(d(rng), 4) * th + Expr::ratio(d(rng), 5) * pow(th, Expr(2));
}

}  // namespace

TEST_CASE("fixture problems parse to the stated equations") {
  const PDEProblem rlw = load("rlw");
  REQUIRE(rlw.equations.size() == 1);
  CHECK(same(rlw.equations[0], F("D(u,t) + alpha*D(u,x) - lambda*D(u^n,x) + beta*D(u^n,x,x,t)")));
  CHECK(rlw.positive.contains("n"));
  CHECK(rlw.wave.sign == -1);
  CHECK(rlw.wave.speed == "c");

  const PDEProblem phi4 = load("phi4");
  CHECK(same(phi4.equations[0], F("D(u,t,t) - alpha*D(u,x,x) - lambda*u + beta*u^n")));

  const PDEProblem bq = load("boussinesq");
  REQUIRE(bq.equations.size() == 2);
  CHECK(same(bq.equations[0], F("D(u,t) + D(v,x) + u*D(u,x)")));
  CHECK(same(bq.equations[1], F("D(v,t) + D(u*v,x) + D(u,x,x,x)")));
  CHECK(bq.wave.sign == 1);
  CHECK(bq.wave.speed == "lambda");
}

TEST_CASE("problem files report errors with line numbers") {
  const std::string head = "problem p\nvars x t\nunknowns u\nparams a\n";
  CHECK_THROWS_AS(parse_problem_text(head + "eq: D(u,t) + q*u = 0\nwave: z = i*(x - a*t)\n"), FileFormatError);
  CHECK_THROWS_AS(parse_problem_text(head + "eq: D(u,t) + a*u = 0\n"), FileFormatError);
  CHECK_THROWS_AS(parse_problem_text(head + "eq: D(u,t) + = 0\nwave: z = i*(x - a*t)\n"), FileFormatError);
  CHECK_THROWS_AS(parse_problem_text(head + "eq: a*u = 0\nwave: z = i*(x - a*t)\n"), FileFormatError);
  try {
    parse_problem_text(head + "bogus line\n");
    FAIL("expected a format error");
  } catch (const FileFormatError& err) {
    CHECK(err.line() == 5);
  }
}

TEST_CASE("traveling-wave reduction") {
  const TravelingWaveODE rlw = reduce_to_ode(load("rlw"));
  REQUIRE(rlw.equations.size() == 1);
  CHECK(same_up_to_sign(rlw.equations[0], F("(alpha - c)*D(U,z) - lambda*D(U^n,z) + beta*c*D(U^n,z,z,z)")));

  const TravelingWaveODE phi4 = reduce_to_ode(load("phi4"));
  CHECK(same_up_to_sign(phi4.equations[0], F("-lambda*U + beta*U^n - (c^2 - alpha)*D(U,z,z)")));

  const TravelingWaveODE bq = reduce_to_ode(load("boussinesq"));
  REQUIRE(bq.equations.size() == 2);
  CHECK(same_up_to_sign(bq.equations[0], F("lambda*D(U,z) + D(V,z) + U*D(U,z)")));
  CHECK(same_up_to_sign(bq.equations[1], F("lambda*D(V,z) + D(U*V,z) - D(U,z,z,z)")));
  CHECK(bq.profile_of.at("u") == "U");
  CHECK(bq.profile_of.at("v") == "V");

  CHECK_THROWS_AS(reduce_to_ode(parse_problem_text(
                      "problem p\nvars x t\nunknowns u\nparams a\neq: D(u,t) + x*u = 0\nwave: z = i*(x - a*t)\n")),
                  DerivationError);
}

TEST_CASE("integration once") {
  const TravelingWaveODE rlw = integrate_once(reduce_to_ode(load("rlw")));
  CHECK(same_up_to_sign(rlw.equations[0], F("(alpha - c)*U - lambda*U^n + beta*c*D(U^n,z,z)")));

  const TravelingWaveODE bq = reduce_to_ode(load("boussinesq"));
  const TravelingWaveODE with_constants = integrate_once(bq, {F("C1"), F("C2")});
  CHECK(same_up_to_sign(with_constants.equations[0], F("lambda*U + V + U^2/2 - C1")));
  CHECK(same_up_to_sign(with_constants.equations[1], F("lambda*V + U*V - D(U,z,z) - C2")));

  CHECK_FALSE(integrable(reduce_to_ode(load("phi4"))));
  CHECK_THROWS_AS(integrate_once(reduce_to_ode(load("phi4"))), DerivationError);
}

TEST_CASE("elimination") {
  const TravelingWaveODE bq = integrate_once(reduce_to_ode(load("boussinesq")));
  const TravelingWaveODE single = eliminate(bq, "V");
  REQUIRE(single.equations.size() == 1);
  CHECK(same_up_to_sign(single.equations[0], F("D(U,z,z) + U^3/2 + 3*lambda*U^2/2 + lambda^2*U")));
  REQUIRE(single.eliminated.has_value());
  CHECK(same(single.eliminated->relation, F("-lambda*U - U^2/2")));

  const TravelingWaveODE kept = eliminate(integrate_once(reduce_to_ode(load("boussinesq")), {F("C1")}), "V");
  CHECK(same_up_to_sign(kept.equations[0], F("D(U,z,z) + U^3/2 + 3*lambda*U^2/2 + (lambda^2 - C1)*U - lambda*C1")));

  CHECK_THROWS_AS(eliminate(single, "V"), DerivationError);
  CHECK_THROWS_AS(eliminate(integrate_once(reduce_to_ode(load("rlw"))), "V"), DerivationError);
}

TEST_CASE("property: PDE residual equals the cleared factor times the ODE residual") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  const NumericBindings params{{"alpha", 0.7}, {"lambda", 1.3}, {"beta", 0.4}, {"n", 3.0}, {"c", 0.9}};
  for (const char* name : {"rlw", "phi4", "boussinesq"}) {
    const PDEProblem problem = load(name);
    const TravelingWaveODE ode = reduce_to_ode(problem);
    for (int trial = 0; trial < 5; ++trial) {
      Bindings profiles;
      Bindings fields;
      const Expr speed = sym(problem.wave.speed);
      const Expr wave = Expr::imaginary_unit() * (sym("x") + Expr(static_cast<long>(problem.wave.sign)) * speed * sym("t"));
      for (const auto& [unknown, profile] : ode.profile_of) {
        const Expr p = test_profile(rng);
        profiles[profile] = p;
        fields[unknown] = substitute(p, {{"z", wave}});
      }
      const Complex x(coord(rng), 0.0);
      const Complex t(coord(rng), 0.0);
      NumericBindings at = params;
      at["x"] = x;
      at["t"] = t;
      NumericBindings at_z = params;
      at_z["z"] = Complex(0.0, 1.0) * (x + static_cast<double>(problem.wave.sign) * at.at(problem.wave.speed) * t);
      for (std::size_t k = 0; k < problem.equations.size(); ++k) {
        const Complex pde = eval_complex(instantiate_profiles(problem.equations[k], fields), at);
        const Complex odev = eval_complex(instantiate_profiles(ode.equations[k], profiles), at_z);
        const Complex factor = eval_complex(ode.cleared_factors[k], params);
        CHECK(std::abs(pde - factor * odev) <= 1e-9 * std::max(1.0, std::abs(pde)));
      }
    }
  }
}

TEST_CASE("property: differentiating the integrated equation recovers the input") {
  for (const char* name : {"rlw", "boussinesq"}) {
    const TravelingWaveODE ode = reduce_to_ode(load(name));
    const TravelingWaveODE once = integrate_once(ode, std::vector<Expr>(ode.equations.size(), F("K")));
    const SymbolSet profiles = ode.profile_set();
    for (std::size_t k = 0; k < ode.equations.size(); ++k) {
      const Expr back = expand_derivatives(differentiate(once.equations[k], "z", profiles), profiles);
      const Expr input = expand_derivatives(ode.equations[k], profiles);
      CHECK(same_up_to_sign(back, input));
    }
  }
}

TEST_CASE("property: the eliminated relation satisfies both integrated equations") {
  const TravelingWaveODE once = integrate_once(reduce_to_ode(load("boussinesq")), {F("C1"), F("C2")});
  const TravelingWaveODE single = eliminate(once, "V");
  const SymbolSet profiles = once.profile_set();
  const Bindings rel{{"V", single.eliminated->relation}};
  const Expr first = expand_derivatives(substitute(once.equations[0], rel), profiles);
  const Expr second = expand_derivatives(substitute(once.equations[1], rel), profiles);
  CHECK(poly_zero_check(first));
  CHECK(same_up_to_sign(second, expand_derivatives(single.equations[0], profiles)));
}
