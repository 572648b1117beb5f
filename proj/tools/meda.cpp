#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "meda/calculus.hpp"
#include "meda/error.hpp"
#include "meda/parser.hpp"
#include "meda/pipeline.hpp"

using namespace meda;

namespace {

struct Globals {
  bool json = false;
  std::uint64_t seed = 0;
  std::optional<double> tol;
  std::string grid;
};

NumericBindings parse_values(const std::string& text, const std::string& flag) {
  NumericBindings out;
  std::stringstream in(text);
  for (std::string part; std::getline(in, part, ',');) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw Error(flag + ": expected name=value, got '" + part + "'");
    std::string name = part.substr(0, eq);
    name.erase(0, name.find_first_not_of(" \t"));
    name.erase(name.find_last_not_of(" \t") + 1);
    out[name] = eval_complex(parse_expr_free(part.substr(eq + 1)), {});
  }
  return out;
}

NumericBindings parse_value_list(const std::vector<std::string>& items, const std::string& flag) {
  NumericBindings out;
  for (const auto& s : items) {
    for (const auto& [k, v] : parse_values(s, flag)) out[k] = v;
  }
  return out;
}

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string complex_text(Complex z) {
  char buf[64];
  if (z.imag() == 0.0) {
    std::snprintf(buf, sizeof buf, "%.10g", z.real());
  } else if (z.real() == 0.0) {
    std::snprintf(buf, sizeof buf, "%.10gi", z.imag());
  } else {
    std::snprintf(buf, sizeof buf, "%.10g%+.10gi", z.real(), z.imag());
  }
  return buf;
}

std::string values_text(const NumericBindings& values) {
  std::string out;
  for (const auto& [k, v] : values) out += (out.empty() ? "" : ", ") + k + "=" + complex_text(v);
  return out;
}

GridSpec grid_of(const Globals& g) { return g.grid.empty() ? GridSpec{} : parse_grid(g.grid); }

void print_ode(const TravelingWaveODE& ode) {
  for (const auto& e : ode.equations) std::cout << "  " << format_equation(e, ode.profile_set()) << " = 0\n";
  if (ode.eliminated) std::cout << "  with " << ode.eliminated->profile << " = " << ode.eliminated->relation.str() << "\n";
}

int cmd_reduce(const Globals& g, const std::string& file, bool integrate, const std::string& elim,
               const std::vector<std::string>& constants) {
  const PDEProblem problem = parse_problem(file);
  TravelingWaveODE ode = reduce_to_ode(problem);
  if (integrate) {
    std::vector<Expr> cs;
    for (const auto& c : constants) cs.push_back(parse_expr_free(c));
    ode = integrate_once(ode, cs);
  }
  if (!elim.empty()) {
    std::string profile = elim;
    auto it = ode.profile_of.find(elim);
    if (it != ode.profile_of.end()) profile = it->second;
    ode = eliminate(ode, profile);
  }
  if (g.json) {
    std::cout << ode_json(ode).dump(2) << "\n";
    return 0;
  }
  std::cout << "problem " << problem.name << "\n";
  std::cout << "wave " << ode.variable() << " = i*(" << problem.space << (ode.wave.sign > 0 ? " + " : " - ") << ode.wave.speed
            << "*" << problem.time << ")\n";
  for (std::size_t k = 0; k < ode.cleared_factors.size(); ++k) {
    std::cout << "cleared factor " << k + 1 << ": " << ode.cleared_factors[k].str() << "\n";
  }
  std::cout << "ODE:\n";
  print_ode(ode);
  return 0;
}

DeriveOptions derive_options(const std::string& transform, const std::optional<int>& order) {
  DeriveOptions opts;
  if (!transform.empty()) opts.transform = parse_expr_free(transform);
  opts.order = order;
  return opts;
}

void print_derivation(const Derivation& d) {
  std::cout << "problem " << d.problem.name << "\n";
  std::cout << "ODE:\n";
  print_ode(d.ode);
  if (d.balance) std::cout << "balance M = " << d.balance->str() << "\n";
  if (d.working.transform) {
    const auto& t = *d.working.transform;
    std::cout << "transform " << t.from << " = " << t.to << "^(" << t.exponent.str() << ")\n";
    print_ode(d.working);
    if (d.working_balance) std::cout << "balance M = " << d.working_balance->str() << "\n";
  }
  std::cout << "M = " << d.order << "\n";
  std::cout << "ansatz " << d.working.profiles.front() << " = " << d.ansatz.expansion.str() << "\n";
  std::cout << "unknowns:";
  for (const auto& u : d.system.unknowns) std::cout << " " << u;
  std::cout << "\nparameters:";
  for (const auto& p : d.system.parameters) std::cout << " " << p;
  std::cout << "\n" << d.system.equations.size() << " equations (multiplied by phi^" << d.system.clearing_shift << "):\n";
  std::cout << format_system(d.system);
}

int cmd_derive(const Globals& g, const std::string& file, const std::string& transform, const std::optional<int>& order) {
  const Derivation d = derive(parse_problem(file), derive_options(transform, order));
  if (g.json) {
    std::cout << derivation_json(d).dump(2) << "\n";
  } else {
    print_derivation(d);
  }
  return 0;
}

int cmd_verify(const Globals& g, const std::string& file, const std::string& cand_file, const std::string& transform,
               const std::vector<std::string>& params, const std::vector<std::string>& branches) {
  const PDEProblem problem = parse_problem(file);
  const CandidateFile cf = parse_candidate_file(cand_file);
  DeriveOptions opts = case_options(cf);
  if (!transform.empty()) {
    opts.transform = parse_expr_free(transform);
    opts.auto_transform = false;
  }
  const Derivation d = derive(problem, opts);
  Candidate cand = cf.candidate;
  const VerificationReport report = verify_candidate(d.system, cand);
  cand.status = report.pass ? CandidateStatus::verified : CandidateStatus::failed;

  std::vector<NumericBindings> insts = cf.instantiations;
  if (!params.empty()) insts = {parse_value_list(params, "--params")};
  std::vector<std::string> names = branches.empty() ? cf.branches : branches;
  if (names.empty()) names = {"tan", "cot"};

  const GridSpec grid = grid_of(g);
  ResidualOptions ropts;
  ropts.seed = g.seed;
  const double tol = g.tol.value_or(1e-8);

  nlohmann::json out = {{"candidate", candidate_json(cand)}, {"verification", verification_json(report)}};
  nlohmann::json sols = nlohmann::json::array();
  nlohmann::json residuals = nlohmann::json::array();
  std::ostringstream text;
  text << "candidate " << (cf.source.empty() ? cand_file : cf.source) << ": " << (report.pass ? "pass" : "fail") << "\n";
  for (const auto& e : report.equations) {
    text << "  phi^" << e.power << ": " << (e.zero ? "0" : e.residual) << "\n";
  }
  for (const auto& n : report.notes) text << "  note: " << n << "\n";
  if (report.pass) {
    for (const auto& name : names) {
      const auto branch = parse_branch(name);
      if (!branch) throw Error("unknown branch '" + name + "'");
      ClosedFormSolution sol;
      try {
        sol = assemble_solution(cand, d.ansatz, *branch, d.working, problem.space, problem.time);
      } catch (const Error& err) {
        text << "[" << name << "] " << err.what() << "\n";
        continue;
      }
      sols.push_back(solution_json(sol));
      text << "[" << name << "]\n";
      for (const auto& [k, v] : sol.fields) text << "  " << k << "(x, t) = " << present(v) << "\n";
      for (const auto& values : insts) {
        nlohmann::json row = {{"branch", name}, {"values", nlohmann::json::object()}};
        for (const auto& [k, v] : values) row["values"][k] = complex_json(v);
        try {
          const ResidualReport r = pde_residual(problem, sol, grid, values, ropts);
          row["report"] = r.to_json();
          row["within_tolerance"] = r.max() < tol;
          text << "  residual at " << values_text(values) << ": max " << number(r.max()) << " over " << r.evaluated
               << " points, " << r.skipped << " skipped (" << (r.max() < tol ? "ok" : "above tolerance") << ")\n";
        } catch (const Error& err) {
          row["error"] = err.what();
          text << "  residual at " << values_text(values) << ": " << err.what() << "\n";
        }
        residuals.push_back(row);
      }
    }
  }
  out["solutions"] = sols;
  out["residuals"] = residuals;
  if (g.json) {
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << text.str();
  }
  return 0;
}

int cmd_solve(const Globals& g, const std::string& file, const std::vector<std::string>& params,
              const std::vector<std::string>& pins, int starts, const std::string& transform, const std::optional<int>& order) {
  DeriveOptions opts = derive_options(transform, order);
  opts.auto_transform = true;
  const NumericBindings values = parse_value_list(params, "--params");
  const NumericBindings pinned = parse_value_list(pins, "--pin");
  const Derivation d = derive(parse_problem(file), opts);
  SolveConfig config;
  config.starts = starts;
  config.seed = g.seed;
  if (g.tol) config.tol = *g.tol;
  const SolveResult result = solve_numeric(d.system, values, pinned, config);
  if (g.json) {
    nlohmann::json out = solve_json(result);
    out["system"] = system_json(d.system);
    std::cout << out.dump(2) << "\n";
    return 0;
  }
  std::cout << "problem " << d.problem.name << ", M = " << d.order << ", " << d.system.equations.size() << " equations\n";
  std::cout << "free unknowns:";
  for (const auto& u : result.free_unknowns) std::cout << " " << u;
  std::cout << "\n" << result.converged_starts << " of " << result.attempted_starts << " starts converged\n";
  if (result.candidates.empty()) {
    std::cout << (result.all_singular ? "no roots found (jacobian singular at every start)" : "no roots found") << "\n";
    return 0;
  }
  std::cout << result.candidates.size() << " roots:\n";
  if (result.candidates.size() > 50) std::cout << "  (many roots: the solution set may contain curves; pin more unknowns)\n";
  for (std::size_t k = 0; k < result.candidates.size(); ++k) {
    const Candidate& c = result.candidates[k];
    NumericBindings shown = c.numeric;
    for (const auto& a : c.arbitrary) shown.erase(a);
    std::cout << "  " << k + 1 << ": " << values_text(shown);
    for (const auto& a : c.arbitrary) std::cout << ", " << a << " arbitrary";
    std::cout << "\n";
  }
  return 0;
}

int cmd_compat(const Globals& g, const std::string& case_id, const std::string& out_dir) {
  CompatOptions opts;
  opts.grid = grid_of(g);
  if (!case_id.empty()) opts.case_id = case_id;
  if (g.tol) opts.tol = *g.tol;
  const CompatReport report = run_compat(fixtures_dir(), opts);
  const std::string md = report.to_markdown();
  const std::string js = report.to_json().dump(2) + "\n";
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream(std::filesystem::path(out_dir) / "compat.md") << md;
    std::ofstream(std::filesystem::path(out_dir) / "compat.json") << js;
  }
  std::cout << (g.json ? js : md);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Traveling-wave solutions by the extended direct algebraic method"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_flag("--json", g.json, "Print JSON instead of text");
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--tol", g.tol, "Tolerance (solver convergence, residual acceptance)");
  app.add_option("--grid", g.grid, "Sampling grid x0:x1:nx,t0:t1:nt");

  std::string file;
  std::string cand_file;
  std::string transform;
  std::string elim;
  std::string case_id;
  std::string out_dir;
  std::optional<int> order;
  bool integrate = false;
  int starts = 200;
  std::vector<std::string> params;
  std::vector<std::string> pins;
  std::vector<std::string> constants;
  std::vector<std::string> branches;

  auto* reduce = app.add_subcommand("reduce", "Reduce a problem to traveling-wave ODEs");
  reduce->add_option("problem", file, "Problem file")->required();
  reduce->add_flag("--integrate", integrate, "Integrate every equation once");
  reduce->add_option("--constant", constants, "Integration constant per equation");
  reduce->add_option("--eliminate", elim, "Unknown to eliminate");

  auto* der = app.add_subcommand("derive", "Derive the algebraic system");
  der->add_option("problem", file, "Problem file")->required();
  der->add_option("--transform", transform, "Exponent p of the power transform U = V^p");
  der->add_option("--M", order, "Override the balance order");

  auto* ver = app.add_subcommand("verify", "Check a candidate exactly and its solutions numerically");
  ver->add_option("problem", file, "Problem file")->required();
  ver->add_option("candidate", cand_file, "Candidate file")->required();
  ver->add_option("--transform", transform, "Exponent p of the power transform U = V^p");
  ver->add_option("--params", params, "Numeric values name=value,... for the residual check");
  ver->add_option("--branch", branches, "Branches to assemble (tanh, coth, tan, cot, rational)");

  auto* sol = app.add_subcommand("solve", "Find numeric roots of the algebraic system");
  sol->add_option("problem", file, "Problem file")->required();
  sol->add_option("--params", params, "Parameter values name=value,...");
  sol->add_option("--pin", pins, "Fixed unknowns name=value,...");
  sol->add_option("--starts", starts, "Number of random starts")->check(CLI::PositiveNumber);
  sol->add_option("--transform", transform, "Exponent p of the power transform U = V^p");
  sol->add_option("--M", order, "Override the balance order");

  auto* compat = app.add_subcommand("compat", "Run every case fixture and report");
  compat->add_option("--case", case_id, "Run a single case");
  compat->add_option("--out", out_dir, "Also write compat.md and compat.json here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*reduce) return cmd_reduce(g, file, integrate, elim, constants);
    if (*der) return cmd_derive(g, file, transform, order);
    if (*ver) return cmd_verify(g, file, cand_file, transform, params, branches);
    if (*sol) return cmd_solve(g, file, params, pins, starts, transform, order);
    if (*compat) return cmd_compat(g, case_id, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
