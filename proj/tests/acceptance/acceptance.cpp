#include <chrono>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <iostream>
#include <regex>
#include <sstream>
#include <sys/wait.h>

#include "meda/calculus.hpp"
#include "meda/error.hpp"
#include "meda/parser.hpp"
#include "meda/pipeline.hpp"
#include "meda/rational_function.hpp"

using namespace meda;

namespace {

const std::string kFixtures = MEDA_FIXTURES_DIR;

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

Expr F(const char* text) { return parse_expr_free(text); }

PDEProblem load(const std::string& name) { return parse_problem(kFixtures + "/" + name + ".meda"); }

bool same_up_to_sign(const Expr& a, const Expr& b) { return poly_zero_check(a - b) || poly_zero_check(a + b); }

bool proportional(const Expr& a, const Expr& b) {
  const auto k = RationalFunction::from_expr(a / b).as_constant();
  return k.has_value() && !k->is_zero();
}

bool equals(const BalanceOrder& m, const char* text) { return poly_zero_check(m.to_expr() - F(text)); }

double seconds_since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

int run(const std::string& cmd, std::string* output = nullptr) {
  FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
  if (pipe == nullptr) return -1;
  char buf[4096];
  std::size_t n = 0;
  std::string out;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  const int raw = pclose(pipe);
  if (output != nullptr) *output = out;
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

Outcome reduction_identities() {
  Outcome o;
  auto timed = [&](const std::string& name, const std::function<bool()>& check) {
    const auto start = Clock::now();
    const bool ok = check();
    const double t = seconds_since(start);
    o.require(ok, name + " differs");
    o.require(t < 1.0, name + " took " + std::to_string(t) + " s");
  };
  timed("rlw", [] {
    const TravelingWaveODE ode = integrate_once(reduce_to_ode(load("rlw")));
    return same_up_to_sign(ode.equations[0], F("(alpha - c)*U - lambda*U^n + beta*c*D(U^n,z,z)"));
  });
  timed("phi4", [] {
    const TravelingWaveODE ode = reduce_to_ode(load("phi4"));
    return same_up_to_sign(ode.equations[0], F("-lambda*U + beta*U^n - (c^2 - alpha)*D(U,z,z)"));
  });
  timed("boussinesq", [] {
    const TravelingWaveODE once = integrate_once(reduce_to_ode(load("boussinesq")), {F("C1"), F("C2")});
    const TravelingWaveODE single = eliminate(integrate_once(reduce_to_ode(load("boussinesq"))), "V");
    return same_up_to_sign(once.equations[0], F("lambda*U + V + U^2/2 - C1")) &&
           same_up_to_sign(once.equations[1], F("lambda*V + U*V - D(U,z,z) - C2")) &&
           same_up_to_sign(single.equations[0], F("D(U,z,z) + U^3/2 + 3*lambda*U^2/2 + lambda^2*U")) &&
           poly_zero_check(single.eliminated->relation - F("-lambda*U - U^2/2"));
  });
  return o;
}

Outcome balance_values() {
  Outcome o;
  const TravelingWaveODE rlw = integrate_once(reduce_to_ode(load("rlw")));
  const TravelingWaveODE phi4 = reduce_to_ode(load("phi4"));
  const TravelingWaveODE bq = eliminate(integrate_once(reduce_to_ode(load("boussinesq"))), "V");
  o.require(equals(compute_balance(rlw), "-2/(n-1)"), "rlw M");
  o.require(compute_balance(power_transform(rlw, F("-1/(n-1)"))).integer_value() == 2, "rlw transformed M");
  o.require(equals(compute_balance(phi4), "2/(n-1)"), "phi4 M");
  o.require(compute_balance(power_transform(phi4, F("1/(n-1)"))).integer_value() == 2, "phi4 transformed M");
  o.require(compute_balance(bq).integer_value() == 1, "boussinesq M");
  return o;
}

Outcome transform_identities() {
  Outcome o;
  const TravelingWaveODE rlw = integrate_once(reduce_to_ode(load("rlw")));
  const TravelingWaveODE phi4 = reduce_to_ode(load("phi4"));
  o.require(proportional(power_transform(rlw, F("-1/(n-1)")).equations[0],
                         F("(alpha - c)*(n-1)^2*V^3 - lambda*(n-1)^2*V^2 - beta*c*n*(n-1)*V*D(V,z,z) + "
                           "beta*c*n*(2*n-1)*D(V,z)^2")),
            "rlw transformed form");
  o.require(proportional(power_transform(phi4, F("1/(n-1)")).equations[0],
                         F("-lambda*(n-1)^2*V^2 + beta*(n-1)^2*V^3 + (alpha - c^2)*(n-1)*V*D(V,z,z) + "
                           "(alpha - c^2)*(2-n)*D(V,z)^2")),
            "phi4 transformed form");
  TravelingWaveODE n2 = rlw;
  n2.equations[0] = substitute(rlw.equations[0], {{"n", Expr(2)}});
  o.require(proportional(power_transform(n2, Expr(-1)).equations[0],
                         F("(alpha - c)*V^3 - lambda*V^2 - 2*beta*c*V*D(V,z,z) + 6*beta*c*D(V,z)^2")),
            "n = 2 form");
  return o;
}

Outcome boussinesq_end_to_end() {
  Outcome o;
  const auto start = Clock::now();
  const Derivation d = derive(load("boussinesq"), {});
  const SolveResult roots = solve_numeric(d.system, {}, {{"a0", 1.0}}, SolveConfig{});
  bool plus = false;
  bool minus = false;
  for (const auto& c : roots.candidates) {
    auto near = [&](const char* k, Complex v) { return std::abs(c.numeric.at(k) - v) < 1e-6; };
    if (!near("b", 0.25) || !near("lambda", -1.0) || !near("b1", 0.0)) continue;
    plus = plus || near("a1", Complex(0, 2));
    minus = minus || near("a1", Complex(0, -2));
  }
  o.require(plus && minus, "solver misses a1 = +-2i");

  Candidate cand;
  cand.arbitrary = {"a0"};
  for (const char* a1 : {"-2*i", "2*i"}) {
    cand.bindings = {{"a1", F(a1)}, {"b1", Expr(0)}, {"lambda", F("-a0")}, {"b", F("a0^2/4")}};
    o.require(verify_candidate(d.system, cand).pass, std::string("a1 = ") + a1 + " does not verify");
  }
  cand.status = CandidateStatus::verified;

  double worst = 0.0;
  std::size_t skipped = 0;
  std::size_t total = 0;
  for (Branch br : {Branch::tan, Branch::tanh}) {
    const ClosedFormSolution sol = assemble_solution(cand, d.ansatz, br, d.working);
    const NumericBindings a0{{"a0", 1.0}};
    for (double x : {-1.5, 0.3, 1.9}) {
      NumericBindings p = a0;
      p["x"] = x;
      p["t"] = 0.4;
      const Complex u = eval_complex(sol.fields.at("u"), p);
      const Complex kink = eval_complex(F("a0*(1 - tanh(a0/2*(x - a0*t)))"), p);
      const Complex v = eval_complex(sol.fields.at("v"), p);
      o.require(std::abs(u - kink) < 1e-12, "u differs from the kink");
      o.require(std::abs(v - (u - u * u / 2.0)) < 1e-12, "v differs from a0*u - u^2/2");
    }
    const ResidualReport r = pde_residual(d.problem, sol, GridSpec{}, a0);
    worst = std::max(worst, r.max());
    skipped += r.skipped;
    total += r.total;
  }
  const double t = seconds_since(start);
  std::ostringstream s;
  s << "max PDE residual " << std::setprecision(3) << worst << ", skipped " << skipped << "/" << total << ", " << t << " s";
  o.require(worst < 1e-8, "residual too large");
  o.require(skipped * 10 < total, "too many pole-skipped points");
  o.require(t < 5.0, "too slow");
  o.detail = o.detail.empty() ? s.str() : o.detail + "; " + s.str();
  return o;
}

Outcome compatibility_report() {
  Outcome o;
  const auto start = Clock::now();
  const CompatReport report = run_compat(kFixtures, {});
  const double t = seconds_since(start);
  std::size_t paper_cases = 0;
  int passes = 0;
  for (const auto& row : report.rows) {
    if (row.id.find("corrected") == std::string::npos) ++paper_cases;
    if (row.pass) {
      ++passes;
      o.require(row.residuals_ok(1e-8), row.id + " ODE residual");
    }
    if (row.problem == "rlw" || row.problem == "phi4") {
      bool n2 = false;
      bool n3 = false;
      for (const auto& inst : row.instantiations) {
        const auto it = inst.values.find("n");
        if (it == inst.values.end()) continue;
        n2 = n2 || it->second == Complex(2.0);
        n3 = n3 || it->second == Complex(3.0);
      }
      o.require(n2 && n3, row.id + " lacks n = 2 and n = 3 instantiations");
    }
  }
  o.require(paper_cases == 11, "expected 11 printed cases, found " + std::to_string(paper_cases));
  bool printed_fails = false;
  bool corrected_passes = false;
  for (const auto& row : report.rows) {
    if (row.id == "boussinesq-case-I") printed_fails = !row.pass;
    if (row.id == "boussinesq-case-I-corrected") corrected_passes = row.pass;
  }
  o.require(printed_fails && corrected_passes, "boussinesq-case-I fail/pass pair missing");
  o.require(t < 30.0, "too slow");
  std::ostringstream s;
  s << report.rows.size() << " rows, " << passes << " symbolic passes, " << std::setprecision(3) << t << " s";
  o.detail = o.detail.empty() ? s.str() : o.detail + "; " + s.str();
  return o;
}

Outcome property_suites() {
  Outcome o;
  const std::vector<std::pair<std::string, std::string>> suites{
      {MEDA_TEST_EXPR_PROPERTIES, "property: symbolic derivatives match central differences"},
      {MEDA_TEST_ENGINE, "property: rewritten derivatives agree with derivatives along integrated trajectories"},
      {MEDA_TEST_PIPELINE, "solver JSON is byte-stable"},
      {MEDA_TEST_ALGSOLVE, "property: fixed seed gives identical output"},
      {MEDA_TEST_EXPR_PROPERTIES, "property: zero checks are sound"},
  };
  std::ostringstream s;
  for (const auto& [binary, name] : suites) {
    const auto start = Clock::now();
    std::string out;
    const int status = run("'" + binary + "' --test-case='" + name + "'", &out);
    const double t = seconds_since(start);
    o.require(status == 0, "'" + name + "' failed");
    o.require(std::regex_search(out, std::regex(R"(test cases:\s+1 \|\s+1 passed)")), "'" + name + "' did not run");
    o.require(t < 10.0, "'" + name + "' took " + std::to_string(t) + " s");
    s << (s.tellp() > 0 ? ", " : "") << std::setprecision(2) << t << " s";
  }
  o.detail = o.detail.empty() ? s.str() : o.detail + "; " + s.str();
  return o;
}

Outcome oracle_independence() {
  Outcome o;
  o.require(run("'" + std::string(MEDA_ORACLE) + "' '" + kFixtures + "'") == 0, "text-supplied solution fails the residual check");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 reduction identities", reduction_identities},
      {"2 balance values", balance_values},
      {"3 power-transform identities", transform_identities},
      {"4 Boussinesq end to end", boussinesq_end_to_end},
      {"5 compatibility report", compatibility_report},
      {"6 property suites", property_suites},
      {"7 oracle independence", oracle_independence},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& err) {
      o.pass = false;
      o.detail = std::string("exception: ") + err.what();
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << (o.detail.empty() ? "" : " (" + o.detail + ")") << "\n";
  }
  return failed == 0 ? 0 : 1;
}
