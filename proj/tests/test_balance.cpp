#include <cmath>
#include <random>

#include "doctest.h"
#include "meda/balance.hpp"
#include "meda/calculus.hpp"
#include "meda/error.hpp"
#include "meda/eval.hpp"
#include "meda/parser.hpp"
#include "meda/pde.hpp"
#include "meda/rational_function.hpp"

using namespace meda;

namespace {

const std::string kFixtures = MEDA_FIXTURES_DIR;

Expr F(const char* text) { return parse_expr_free(text); }

TravelingWaveODE single(const Expr& e, const std::string& profile = "U") {
  TravelingWaveODE ode;
  ode.equations = {e};
  ode.profiles = {profile};
  ode.profile_of = {{"u", profile}};
  ode.cleared_factors = {Expr(1)};
  return ode;
}

TravelingWaveODE rlw_integrated() { return integrate_once(reduce_to_ode(parse_problem(kFixtures + "/rlw.meda"))); }

TravelingWaveODE phi4_reduced() { return reduce_to_ode(parse_problem(kFixtures + "/phi4.meda")); }

bool equals(const BalanceOrder& m, const char* text) { return poly_zero_check(m.to_expr() - F(text)); }

/// a = k*b for some nonzero constant k.
bool proportional(const Expr& a, const Expr& b) {
  const auto k = RationalFunction::from_expr(a / b).as_constant();
  return k.has_value() && !k->is_zero();
}

/// a = k*V^j*b for a nonzero constant k and an integer j.
bool proportional_up_to_v(const Expr& a, const Expr& b) {
  for (long j = -4; j <= 4; ++j) {
    if (proportional(a, pow(sym("V"), Expr(j)) * b)) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("balance values") {
  const Expr eq9 = F("(alpha - c)*U - lambda*U^n + beta*c*n*U^(n-1)*D(U,z,z) + beta*c*n*(n-1)*U^(n-2)*D(U,z)^2");
  CHECK(equals(compute_balance(single(eq9)), "-2/(n-1)"));
  CHECK(equals(compute_balance(rlw_integrated()), "-2/(n-1)"));
  CHECK(equals(compute_balance(phi4_reduced()), "2/(n-1)"));

  const BalanceOrder v = compute_balance(single(F("V^3 - V^2 + V*D(V,z,z) + D(V,z)^2"), "V"));
  CHECK(v.integer_value() == 2);
  CHECK(v.is_positive_integer());

  const BalanceOrder bq = compute_balance(single(F("D(U,z,z) + U^3/2 + 3*lambda*U^2/2 + lambda^2*U")));
  CHECK(bq.integer_value() == 1);

  CHECK_FALSE(compute_balance(rlw_integrated()).is_integer());
}

TEST_CASE("balance errors") {
  CHECK_THROWS_AS(compute_balance(single(F("U^3 - U"))), DerivationError);
  CHECK_THROWS_AS(compute_balance(single(F("D(U,z,z) + U"))), DerivationError);
  // U'' against U^0: M + 2 = 0 gives a negative order
  CHECK_THROWS_AS(compute_balance(single(F("D(U,z,z) + 1"))), DerivationError);
}

TEST_CASE("power transform identities") {
  const TravelingWaveODE eq10 = power_transform(rlw_integrated(), F("-1/(n-1)"));
  REQUIRE(eq10.transform.has_value());
  CHECK(proportional(eq10.equations[0], F("(alpha - c)*(n-1)^2*V^3 - lambda*(n-1)^2*V^2 - beta*c*n*(n-1)*V*D(V,z,z) + "
                                          "beta*c*n*(2*n-1)*D(V,z)^2")));
  CHECK(compute_balance(eq10).integer_value() == 2);

  const TravelingWaveODE eq17 = power_transform(phi4_reduced(), F("1/(n-1)"));
  CHECK(proportional(eq17.equations[0], F("-lambda*(n-1)^2*V^2 + beta*(n-1)^2*V^3 + (alpha - c^2)*(n-1)*V*D(V,z,z) + "
                                          "(alpha - c^2)*(2-n)*D(V,z)^2")));
  CHECK(compute_balance(eq17).integer_value() == 2);

  TravelingWaveODE n2 = rlw_integrated();
  n2.equations[0] = substitute(n2.equations[0], {{"n", Expr(2)}});
  const TravelingWaveODE oracle = power_transform(n2, Expr(-1));
  CHECK(proportional(oracle.equations[0], F("(alpha - c)*V^3 - lambda*V^2 - 2*beta*c*V*D(V,z,z) + 6*beta*c*D(V,z)^2")));
}

TEST_CASE("suggested exponents") {
  CHECK(poly_zero_check(suggest_transform_exponent(compute_balance(rlw_integrated())) - F("-1/(n-1)")));
  CHECK(poly_zero_check(suggest_transform_exponent(compute_balance(phi4_reduced())) - F("1/(n-1)")));
}

TEST_CASE("property: transforming then instantiating n matches instantiating then transforming") {
  for (const auto& [ode, p] : {std::pair{rlw_integrated(), F("-1/(n-1)")}, std::pair{phi4_reduced(), F("1/(n-1)")}}) {
    const TravelingWaveODE general = power_transform(ode, p);
    for (long n : {2L, 3L, 4L}) {
      const Bindings at{{"n", Expr(n)}};
      TravelingWaveODE fixed = ode;
      fixed.equations[0] = substitute(ode.equations[0], at);
      const TravelingWaveODE direct = power_transform(fixed, substitute(p, at));
      // the symbolic clearing power of V specializes to an integer power of V
      CHECK(proportional_up_to_v(substitute(general.equations[0], at), direct.equations[0]));
      CHECK(compute_balance(direct).is_positive_integer());
    }
  }
}

TEST_CASE("property: the transformed residual is the multiplier times the original residual") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> zs(-2.0, 2.0);
  const NumericBindings params{{"alpha", 0.6}, {"lambda", 1.7}, {"beta", 0.8}, {"c", 1.9}, {"n", 3.0}};
  const Expr vprofile = F("2 + tanh(z/3)/2 + tanh(z/5)^2/3");
  for (const auto& [ode, p] : {std::pair{rlw_integrated(), F("-1/(n-1)")}, std::pair{phi4_reduced(), F("1/(n-1)")}}) {
    const TravelingWaveODE t = power_transform(ode, p);
    const Expr transformed = instantiate_profiles(t.equations[0], {{"V", vprofile}});
    const Expr original = instantiate_profiles(ode.equations[0], {{"U", pow(vprofile, p)}});
    const Expr multiplier = substitute(t.transform->multiplier, {{"V", vprofile}});
    for (int k = 0; k < 20; ++k) {
      NumericBindings at = params;
      at["z"] = zs(rng);
      const Complex lhs = eval_complex(transformed, at);
      const Complex rhs = eval_complex(multiplier, at) * eval_complex(original, at);
      CHECK(std::abs(lhs - rhs) <= 1e-9 * std::max(1.0, std::abs(lhs)));
    }
  }
}
