#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sys/wait.h>

#include "doctest.h"
#include "meda/error.hpp"
#include "meda/parser.hpp"
#include "meda/pipeline.hpp"

using namespace meda;

namespace {

const std::string kFixtures = MEDA_FIXTURES_DIR;
const std::string kCli = MEDA_CLI;

PDEProblem load(const std::string& name) { return parse_problem(kFixtures + "/" + name + ".meda"); }

struct Run {
  int status = -1;
  std::string out;
};

/// Runs the command-line tool and captures stdout and stderr.
Run cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "'" + kCli + "' " + args + " 2>&1";
  Run r;
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  REQUIRE(pipe);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe.get())) > 0) r.out.append(buf.data(), n);
  const int raw = pclose(pipe.release());
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

bool has(const std::string& text, const std::string& part) { return text.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("derivations of the shipped problems") {
  const Derivation bq = derive(load("boussinesq"), {});
  CHECK(bq.order == 1);
  CHECK(bq.system.equations.size() == 7);
  CHECK(bq.system.clearing_shift == 3);

  DeriveOptions t;
  t.transform = parse_expr_free("-1/(n-1)");
  const Derivation rlw = derive(load("rlw"), t);
  CHECK(rlw.order == 2);
  CHECK(SymbolSet(rlw.system.unknowns.begin(), rlw.system.unknowns.end()) == SymbolSet{"a0", "a1", "a2", "b1", "b2", "b", "c"});

  try {
    derive(load("rlw"), {});
    FAIL("expected a derivation error");
  } catch (const DerivationError& err) {
    CHECK(has(err.what(), "-2/(n - 1)"));
    CHECK(has(err.what(), "not a positive integer"));
  }

  DeriveOptions automatic;
  automatic.auto_transform = true;
  const Derivation phi4 = derive(load("phi4"), automatic);
  CHECK(phi4.order == 2);
  REQUIRE(phi4.working.transform.has_value());
  CHECK(poly_zero_check(phi4.working.transform->exponent - parse_expr_free("1/(n-1)")));

  DeriveOptions forced;
  forced.order = 2;
  CHECK(derive(load("boussinesq"), forced).order == 2);
}

TEST_CASE("compatibility report over the case fixtures") {
  const CompatReport report = run_compat(kFixtures, {});
  CHECK(report.rows.size() == 15);
  for (const auto& row : report.rows) {
    REQUIRE_MESSAGE(row.expected.has_value(), row.id);
    CHECK_MESSAGE((row.pass ? "pass" : "fail") == *row.expected, row.id);
    if (row.pass) CHECK_MESSAGE(row.residuals_ok(1e-8), row.id);
    if (!row.pass) CHECK_MESSAGE(!row.failing.empty(), row.id);
  }
  auto find = [&](const std::string& id) -> const CompatRow& {
    for (const auto& row : report.rows) {
      if (row.id == id) return row;
    }
    FAIL("missing row " << id);
    return report.rows.front();
  };
  CHECK_FALSE(find("boussinesq-case-I").pass);
  CHECK(find("boussinesq-case-I-corrected").pass);
  CHECK(find("phi4-case-I").pass);

  const nlohmann::json j = report.to_json();
  CHECK(j.at("cases").size() == 15);
  CHECK(nlohmann::json::parse(j.dump()) == j);
  CHECK(has(report.to_markdown(), "| boussinesq-case-I | boussinesq | fail |"));

  CompatOptions single;
  single.case_id = "boussinesq-case-I";
  CHECK(run_compat(kFixtures, single).rows.size() == 1);
  single.case_id = "no-such-case";
  CHECK_THROWS_AS(run_compat(kFixtures, single), Error);
}

TEST_CASE("presentation text") {
  CHECK(present(parse_expr_free("sqrt(a)*x")) == "x*\u221a(a)");
  CHECK(present(parse_expr_free("tan(sqrt(b)*z)")) == "tan(z*\u221a(b))");
  const Expr e = parse_expr_free("sqrt(a + 1)/2");
  CHECK(present(e).find("sqrt") == std::string::npos);
  CHECK(parse_expr_free(e.str()) == e);
}

TEST_CASE("solver JSON is byte-stable") {
  const Derivation bq = derive(load("boussinesq"), {});
  const std::string a = solve_json(solve_numeric(bq.system, {}, {{"a0", 1.0}})).dump();
  const std::string b = solve_json(solve_numeric(bq.system, {}, {{"a0", 1.0}})).dump();
  CHECK(a == b);
}

TEST_CASE("command line") {
  const Run reduce = cli("reduce '" + kFixtures + "/boussinesq.meda' --integrate --eliminate v");
  CHECK(reduce.status == 0);
  CHECK(has(reduce.out, "D(U, z, z) + U^3/2 + 3*U^2*lambda/2 + U*lambda^2 = 0"));

  const Run rlw = cli("reduce '" + kFixtures + "/rlw.meda' --integrate");
  CHECK(rlw.status == 0);
  CHECK(has(rlw.out, "beta*c*D(U^n, z, z) + (alpha - c)*U - U^n*lambda = 0"));

  const std::string bad = "/tmp/meda_test_bad.meda";
  std::ofstream(bad) << "problem p\nvars x t\nbogus line\n";
  const Run malformed = cli("reduce " + bad);
  CHECK(malformed.status != 0);
  CHECK(has(malformed.out, ":3:"));

  const Run derive_bq = cli("derive '" + kFixtures + "/boussinesq.meda'");
  CHECK(derive_bq.status == 0);
  CHECK(has(derive_bq.out, "7 equations"));
  CHECK(has(derive_bq.out, "M = 1"));

  const Run derive_rlw = cli("derive '" + kFixtures + "/rlw.meda'");
  CHECK(derive_rlw.status != 0);
  CHECK(has(derive_rlw.out, "-2/(n - 1)"));
  CHECK(cli("derive '" + kFixtures + "/rlw.meda' --transform '-1/(n-1)'").status == 0);

  const Run verify_ok = cli("verify '" + kFixtures + "/boussinesq.meda' '" + kFixtures + "/cases/boussinesq-case-I-corrected.case'");
  CHECK(verify_ok.status == 0);
  CHECK(has(verify_ok.out, "pass"));
  const Run verify_phi4 = cli("verify '" + kFixtures + "/phi4.meda' '" + kFixtures + "/cases/phi4-case-I.case'");
  CHECK(verify_phi4.status == 0);
  CHECK(has(verify_phi4.out, "\u221a("));
  const Run verify_bad = cli("verify '" + kFixtures + "/boussinesq.meda' '" + kFixtures + "/cases/boussinesq-case-I.case'");
  CHECK(verify_bad.status == 0);
  CHECK(has(verify_bad.out, "fail"));
  CHECK(has(verify_bad.out, "a0^2"));

  const Run solve = cli("solve '" + kFixtures + "/boussinesq.meda' --pin a0=1 --seed 0");
  CHECK(solve.status == 0);
  CHECK(has(solve.out, "a1=2i, b=0.25, b1=0, lambda=-1"));
  CHECK(has(solve.out, "a1=-2i, b=0.25, b1=0, lambda=-1"));
  const Run none = cli("solve '" + kFixtures + "/boussinesq.meda' --pin a0=1,a1=5,b1=0");
  CHECK(none.status == 0);
  CHECK(has(none.out, "no roots found"));

  const std::string solve_phi4 = "--json solve '" + kFixtures + "/phi4.meda' --params n=3,lambda=2,beta=1,alpha=1 --pin c=2";
  const Run first = cli(solve_phi4);
  const Run second = cli(solve_phi4);
  CHECK(first.status == 0);
  CHECK(first.out == second.out);
  const nlohmann::json parsed = nlohmann::json::parse(first.out);
  CHECK(parsed.contains("candidates"));
  CHECK(parsed.dump(2) + "\n" == first.out);

  const Run one_case = cli("--json compat --case boussinesq-case-I");
  CHECK(one_case.status == 0);
  CHECK(nlohmann::json::parse(one_case.out).at("cases").size() == 1);

  const Run empty = cli("compat", "MEDA_FIXTURES=/nonexistent-fixture-dir");
  CHECK(empty.status != 0);
  CHECK(has(empty.out, "no case fixtures"));

  CHECK(cli("--grid nonsense compat").status != 0);
  CHECK(cli("frobnicate").status != 0);
}
