#include <algorithm>
#include <cstdio>
#include <fstream>
#include <regex>
#include <sstream>

#include "meda/calculus.hpp"
#include "meda/error.hpp"
#include "meda/parser.hpp"
#include "meda/pipeline.hpp"
#include "meda/rational_function.hpp"

namespace meda {

namespace {

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string number(const std::optional<double>& v) { return v ? number(*v) : "-"; }

std::string value_text(Complex z) {
  if (z.imag() == 0.0) return number(z.real());
  return "(" + number(z.real()) + (z.imag() < 0 ? "-" : "+") + number(std::abs(z.imag())) + "i)";
}

std::string label_of(const NumericBindings& values) {
  std::string out;
  for (const auto& [k, v] : values) {
    if (!out.empty()) out += ", ";
    out += k + "=" + value_text(v);
  }
  return out;
}

Bindings abbreviation_map(const Candidate& cand) {
  Bindings abbrev;
  for (const auto& [name, value] : cand.abbreviations) abbrev[name] = substitute(value, abbrev);
  return abbrev;
}

/// Largest relative difference between two fields over the grid, skipping poles.
std::optional<double> field_difference(const Expr& a, const Expr& b, const PDEProblem& problem, const GridSpec& grid,
                                       const NumericBindings& values, const EvalOptions& eval) {
  const Bindings exact = exact_parameters(values);
  const Expr ea = substitute(a, exact);
  const Expr eb = substitute(b, exact);
  std::optional<double> worst;
  NumericBindings at;
  for (int i = 0; i < grid.nx; ++i) {
    for (int j = 0; j < grid.nt; ++j) {
      at[problem.space] = grid.x(i);
      at[problem.time] = grid.t(j);
      try {
        const Complex va = eval_complex(ea, at, eval);
        const Complex vb = eval_complex(eb, at, eval);
        const double d = std::abs(va - vb) / std::max(1.0, std::abs(vb));
        worst = std::max(worst.value_or(0.0), d);
      } catch (const PoleError&) {
      }
    }
  }
  return worst;
}

std::string clip(const std::string& s, std::size_t n) { return s.size() <= n ? s : s.substr(0, n) + "..."; }

}  // namespace

bool CompatRow::residuals_ok(double tol) const {
  if (!pass) return false;
  for (const auto& inst : instantiations) {
    if (!inst.ode_residual || *inst.ode_residual >= tol) return false;
  }
  return true;
}

CompatRow run_case(const std::filesystem::path& fixtures, const std::filesystem::path& case_file, const CompatOptions& opts) {
  const CandidateFile file = parse_candidate_file(case_file);
  CompatRow row;
  row.id = file.source.empty() ? case_file.stem().string() : file.source;
  row.problem = file.problem;
  row.expected = file.expected;
  row.notes = file.notes;
  row.branches = file.branches.empty() ? std::vector<std::string>{"tan", "cot"} : file.branches;

  const PDEProblem problem = parse_problem(problem_path(fixtures, file.problem));
  const Derivation d = derive(problem, case_options(file));

  Candidate cand = file.candidate;
  try {
    const VerificationReport report = verify_candidate(d.system, cand);
    row.pass = report.pass;
    for (const auto& e : report.equations) {
      if (!e.zero) row.failing.push_back("phi^" + std::to_string(e.power) + ": " + e.residual);
    }
    for (const auto& n : report.notes) row.notes.push_back(n);
  } catch (const Error& err) {
    row.pass = false;
    row.failing.push_back(err.what());
  }
  cand.status = row.pass ? CandidateStatus::verified : CandidateStatus::failed;

  std::vector<ClosedFormSolution> solutions;
  if (row.pass) {
    for (const auto& name : row.branches) {
      auto branch = parse_branch(name);
      if (!branch) throw FileFormatError(case_file.string(), 0, "unknown branch '" + name + "'");
      try {
        solutions.push_back(assemble_solution(cand, d.ansatz, *branch, d.working, problem.space, problem.time));
      } catch (const Error& err) {
        row.notes.push_back(name + " branch: " + err.what());
      }
    }
  }

  const Bindings abbrev = abbreviation_map(cand);
  auto printed = [&](const std::string& text) { return substitute(parse_expr_free(text), abbrev); };
  const std::string working_profile = d.working.profiles.front();
  EvalOptions eval;
  eval.pole_guard = opts.pole_guard;
  eval.min_divisor = opts.pole_guard;
  ResidualOptions ropts;
  ropts.eval = eval;

  for (const auto& inst : file.instantiations) {
    InstantiationResult r;
    r.label = label_of(inst);
    r.values = inst;
    NumericBindings all = inst;
    try {
      for (const auto& [k, v] : cand.resolved()) all[k] = eval_complex(v, inst);
    } catch (const Error& err) {
      r.notes.push_back(std::string("cannot instantiate the candidate: ") + err.what());
      row.instantiations.push_back(r);
      continue;
    }
    r.values = all;
    const Complex speed = all.contains(problem.wave.speed) ? all.at(problem.wave.speed) : Complex(0.0, 0.0);
    const auto z = wave_samples(opts.grid, problem.wave.sign, speed);

    for (const auto& sol : solutions) {
      const std::string tag = branch_name(sol.branch) + " branch: ";
      try {
        const auto ode = ode_residual(d.working, {{working_profile, sol.profiles.at(working_profile)}}, z, all, eval);
        r.ode_residual = std::max(r.ode_residual.value_or(0.0), ode.max());
      } catch (const Error& err) {
        r.notes.push_back(tag + "ODE residual: " + err.what());
      }
      try {
        const auto pde = pde_residual(problem, sol, opts.grid, all, ropts);
        r.pde_residual = std::max(r.pde_residual.value_or(0.0), pde.max());
        r.pde_skipped = std::max(r.pde_skipped, pde.skipped);
        r.pde_total = pde.total;
      } catch (const Error& err) {
        r.notes.push_back(tag + "PDE residual: " + err.what());
      }
    }

    if (file.printed_u) {
      Bindings fields{{problem.unknowns.front(), printed(*file.printed_u)}};
      if (problem.unknowns.size() > 1 && file.printed_v) fields[problem.unknowns[1]] = printed(*file.printed_v);
      if (fields.size() == problem.unknowns.size()) {
        try {
          r.printed_residual = pde_residual(problem, fields, opts.grid, all, ropts).max();
        } catch (const Error& err) {
          r.notes.push_back(std::string("printed form: ") + err.what());
        }
      }
      for (const auto& sol : solutions) {
        try {
          auto diff = field_difference(fields.at(problem.unknowns.front()), sol.fields.at(problem.unknowns.front()), problem,
                                       opts.grid, all, eval);
          if (diff) r.printed_diff = std::min(r.printed_diff.value_or(*diff), *diff);
        } catch (const Error& err) {
          r.notes.push_back(std::string("printed difference: ") + err.what());
        }
      }
    }
    if (file.printed_transformed && d.working.transform) {
      const Expr u = pow(printed(*file.printed_transformed), d.working.transform->exponent);
      try {
        r.printed_transformed_residual = pde_residual(problem, Bindings{{problem.unknowns.front(), u}}, opts.grid, all, ropts).max();
      } catch (const Error& err) {
        r.notes.push_back(std::string("printed transformed form: ") + err.what());
      }
    }
    row.instantiations.push_back(r);
  }
  return row;
}

std::vector<ReductionCheck> run_reduction_checks(const std::filesystem::path& fixtures, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileFormatError(path.string(), 0, "cannot open file");
  static const std::regex entry(R"(^(reduced|integrated|eliminated|transformed)\s+(\d+)\s*:\s*(.+)$)");
  std::string problem_name;
  std::optional<Expr> transform;
  std::vector<Expr> constants;
  struct Pending {
    std::string stage;
    std::size_t index;
    std::string text;
    Expr printed;
    std::vector<std::string> notes;
  };
  std::vector<Pending> pending;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw.substr(0, raw.find('#'));
    s.erase(0, s.find_first_not_of(" \t"));
    s.erase(s.find_last_not_of(" \t\r") + 1);
    if (s.empty()) continue;
    std::smatch m;
    try {
      if (std::regex_match(s, m, entry)) {
        const std::size_t index = std::stoul(m[2]);
        if (index < 1) throw FileFormatError(path.string(), line, "equation indices start at 1");
        pending.push_back({m[1].str(), index, m[3].str(), parse_expr_free(m[3].str()), {}});
      } else if (s.rfind("problem:", 0) == 0) {
        problem_name = s.substr(8);
        problem_name.erase(0, problem_name.find_first_not_of(" \t"));
      } else if (s.rfind("transform:", 0) == 0) {
        transform = parse_expr_free(s.substr(10));
      } else if (s.rfind("constant:", 0) == 0) {
        constants.push_back(parse_expr_free(s.substr(9)));
      } else if (s.rfind("note:", 0) == 0) {
        if (pending.empty()) throw FileFormatError(path.string(), line, "note before any entry");
        std::string n = s.substr(5);
        n.erase(0, n.find_first_not_of(" \t"));
        pending.back().notes.push_back(n);
      } else {
        throw FileFormatError(path.string(), line, "unrecognized line '" + s + "'");
      }
    } catch (const ParseError& err) {
      throw FileFormatError(path.string(), line, err.what());
    }
  }
  if (problem_name.empty()) throw FileFormatError(path.string(), line, "missing 'problem:'");

  const PDEProblem problem = parse_problem(problem_path(fixtures, problem_name));
  const TravelingWaveODE reduced = reduce_to_ode(problem);
  std::optional<TravelingWaveODE> integrated;
  std::optional<TravelingWaveODE> eliminated;
  std::optional<TravelingWaveODE> transformed;
  auto stage_ode = [&](const std::string& stage) -> const TravelingWaveODE& {
    if (stage == "reduced") return reduced;
    if (stage == "integrated") {
      if (!integrated) integrated = integrate_once(reduced, constants);
      return *integrated;
    }
    if (!eliminated) {
      DeriveOptions o;
      o.constants = constants;
      eliminated = prepare_ode(problem, o);
    }
    if (stage == "eliminated") return *eliminated;
    if (!transform) throw FileFormatError(path.string(), 0, "'transformed' entries need 'transform:'");
    if (!transformed) transformed = power_transform(*eliminated, *transform);
    return *transformed;
  };

  std::vector<ReductionCheck> out;
  for (const auto& p : pending) {
    const TravelingWaveODE& ode = stage_ode(p.stage);
    if (p.index > ode.equations.size()) {
      throw FileFormatError(path.string(), 0, p.stage + " stage has only " + std::to_string(ode.equations.size()) + " equation(s)");
    }
    const Expr derived = ode.equations[p.index - 1];
    const SymbolSet profiles = ode.profile_set();
    const Expr a = expand_derivatives(p.printed, profiles);
    const Expr b = expand_derivatives(derived, profiles);
    ReductionCheck c;
    c.problem = problem_name;
    c.stage = p.stage;
    c.index = p.index;
    c.printed = p.printed.str();
    c.derived = format_equation(derived, profiles);
    c.notes = p.notes;
    if (poly_zero_check(a - b)) {
      c.status = "identical";
    } else if (poly_zero_check(a + b)) {
      c.status = "identical up to sign";
    } else {
      c.status = "differs";
      c.difference = expand(a - b).str();
    }
    out.push_back(c);
  }
  return out;
}

CompatReport run_compat(const std::filesystem::path& fixtures, const CompatOptions& opts) {
  const std::filesystem::path cases = fixtures / "cases";
  std::vector<std::filesystem::path> files;
  if (std::filesystem::is_directory(cases)) {
    for (const auto& e : std::filesystem::directory_iterator(cases)) {
      if (e.path().extension() == ".case") files.push_back(e.path());
    }
  }
  if (files.empty()) throw Error("no case fixtures (*.case) under " + cases.string());
  std::sort(files.begin(), files.end());

  CompatReport report;
  report.tol = opts.tol;
  for (const auto& f : files) {
    if (opts.case_id) {
      const CandidateFile head = parse_candidate_file(f);
      const std::string id = head.source.empty() ? f.stem().string() : head.source;
      if (id != *opts.case_id && f.stem().string() != *opts.case_id) continue;
    }
    report.rows.push_back(run_case(fixtures, f, opts));
  }
  if (opts.case_id) {
    if (report.rows.empty()) throw Error("no case fixture named '" + *opts.case_id + "'");
    return report;
  }
  const std::filesystem::path printed = fixtures / "printed";
  if (std::filesystem::is_directory(printed)) {
    std::vector<std::filesystem::path> odes;
    for (const auto& e : std::filesystem::directory_iterator(printed)) {
      if (e.path().extension() == ".ode") odes.push_back(e.path());
    }
    std::sort(odes.begin(), odes.end());
    for (const auto& f : odes) {
      for (auto& c : run_reduction_checks(fixtures, f)) report.reductions.push_back(std::move(c));
    }
  }
  return report;
}

namespace {

nlohmann::json optional_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

}  // namespace

nlohmann::json CompatReport::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json insts = nlohmann::json::array();
    for (const auto& inst : row.instantiations) {
      nlohmann::json values = nlohmann::json::object();
      for (const auto& [k, v] : inst.values) values[k] = complex_json(v);
      insts.push_back({{"label", inst.label},
                       {"values", values},
                       {"ode_residual", optional_json(inst.ode_residual)},
                       {"pde_residual", optional_json(inst.pde_residual)},
                       {"pde_skipped", inst.pde_skipped},
                       {"pde_total", inst.pde_total},
                       {"printed_residual", optional_json(inst.printed_residual)},
                       {"printed_transformed_residual", optional_json(inst.printed_transformed_residual)},
                       {"printed_diff", optional_json(inst.printed_diff)},
                       {"notes", inst.notes}});
    }
    rows_json.push_back({{"case", row.id},
                         {"problem", row.problem},
                         {"symbolic", row.pass ? "pass" : "fail"},
                         {"expected", row.expected ? nlohmann::json(*row.expected) : nlohmann::json(nullptr)},
                         {"residuals_ok", row.residuals_ok(tol)},
                         {"failing", row.failing},
                         {"branches", row.branches},
                         {"instantiations", insts},
                         {"notes", row.notes}});
  }
  nlohmann::json red = nlohmann::json::array();
  for (const auto& c : reductions) {
    nlohmann::json r = {{"problem", c.problem},
                        {"stage", c.stage},
                        {"equation", c.index},
                        {"printed", c.printed},
                        {"derived", c.derived},
                        {"status", c.status},
                        {"notes", c.notes}};
    if (!c.difference.empty()) r["difference"] = c.difference;
    red.push_back(r);
  }
  return {{"tolerance", tol}, {"cases", rows_json}, {"reductions", red}};
}

std::string CompatReport::to_markdown() const {
  std::ostringstream out;
  out << "# Compatibility report\n\n";
  out << "Residual tolerance " << number(tol) << ". ODE and PDE residuals are maxima over the listed branches.\n\n";
  out << "| case | problem | symbolic | expected | instantiation | ODE residual | PDE residual | printed PDE residual | "
         "printed transformed residual | printed vs derived | notes |\n";
  out << "|---|---|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& row : rows) {
    std::string notes;
    for (const auto& f : row.failing) notes += (notes.empty() ? "" : "; ") + clip(f, 160);
    for (const auto& n : row.notes) notes += (notes.empty() ? "" : "; ") + n;
    auto line = [&](const InstantiationResult* inst, const std::string& extra) {
      out << "| " << row.id << " | " << row.problem << " | " << (row.pass ? "pass" : "fail") << " | "
          << row.expected.value_or("-") << " | " << (inst ? inst->label : "-") << " | "
          << (inst ? number(inst->ode_residual) : "-") << " | " << (inst ? number(inst->pde_residual) : "-") << " | "
          << (inst ? number(inst->printed_residual) : "-") << " | "
          << (inst ? number(inst->printed_transformed_residual) : "-") << " | " << (inst ? number(inst->printed_diff) : "-")
          << " | " << extra << " |\n";
    };
    if (row.instantiations.empty()) line(nullptr, notes);
    for (std::size_t k = 0; k < row.instantiations.size(); ++k) {
      std::string extra = k == 0 ? notes : "";
      for (const auto& n : row.instantiations[k].notes) extra += (extra.empty() ? "" : "; ") + clip(n, 160);
      line(&row.instantiations[k], extra);
    }
  }
  if (!reductions.empty()) {
    out << "\n## Printed reductions\n\n";
    out << "| problem | stage | equation | status | difference (printed - derived) | notes |\n";
    out << "|---|---|---|---|---|---|\n";
    for (const auto& c : reductions) {
      std::string notes;
      for (const auto& n : c.notes) notes += (notes.empty() ? "" : "; ") + n;
      out << "| " << c.problem << " | " << c.stage << " | " << c.index << " | " << c.status << " | "
          << (c.difference.empty() ? "-" : clip(c.difference, 160)) << " | " << notes << " |\n";
    }
  }
  return out.str();
}

}  // namespace meda
