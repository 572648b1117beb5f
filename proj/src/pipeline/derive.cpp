#include <cctype>
#include <cstdlib>
#include <sstream>

#include "meda/calculus.hpp"
#include "meda/error.hpp"
#include "meda/parser.hpp"
#include "meda/pipeline.hpp"

namespace meda {

namespace {

std::string profile_name(const TravelingWaveODE& ode, const std::string& name) {
  auto it = ode.profile_of.find(name);
  if (it != ode.profile_of.end()) return it->second;
  for (const auto& p : ode.profiles) {
    if (p == name) return p;
  }
  throw DerivationError("'" + name + "' is neither an unknown nor a profile");
}

}  // namespace

TravelingWaveODE prepare_ode(const PDEProblem& problem, const DeriveOptions& opts) {
  TravelingWaveODE ode = reduce_to_ode(problem);
  const bool integrate = opts.integrate.value_or(integrable(ode));
  if (integrate) ode = integrate_once(ode, opts.constants);
  if (opts.eliminate) {
    ode = eliminate(ode, profile_name(ode, *opts.eliminate));
  } else if (opts.auto_eliminate && ode.profiles.size() > 1) {
    std::string reasons;
    for (auto it = ode.profiles.rbegin(); it != ode.profiles.rend() && ode.profiles.size() > 1; ++it) {
      try {
        return eliminate(ode, *it);
      } catch (const DerivationError& err) {
        reasons += std::string("; ") + err.what();
      }
    }
    throw DerivationError("no profile can be eliminated" + reasons);
  }
  return ode;
}

Derivation derive(const PDEProblem& problem, const DeriveOptions& opts) {
  Derivation d;
  d.problem = problem;
  d.ode = prepare_ode(problem, opts);
  if (d.ode.equations.size() != 1) throw DerivationError("the ansatz needs a single ODE; eliminate a profile first");

  std::optional<std::string> balance_error;
  try {
    d.balance = compute_balance(d.ode);
  } catch (const DerivationError& err) {
    balance_error = err.what();
  }

  std::optional<Expr> p = opts.transform;
  if (!p && !opts.order && d.balance && !d.balance->is_positive_integer()) {
    if (opts.auto_transform) {
      p = suggest_transform_exponent(*d.balance);
    } else {
      std::string hint;
      try {
        hint = " (for example --transform \"" + suggest_transform_exponent(*d.balance).str() + "\")";
      } catch (const Error&) {
      }
      throw DerivationError("balance gives M = " + d.balance->str() +
                            ", which is not a positive integer; a power transform U = V^p is required" + hint);
    }
  }
  if (!p && !opts.order && balance_error) throw DerivationError(*balance_error);

  d.working = d.ode;
  if (p) {
    d.working = power_transform(d.ode, *p);
    try {
      d.working_balance = compute_balance(d.working);
    } catch (const DerivationError& err) {
      if (!opts.order) throw;
    }
  } else {
    d.working_balance = d.balance;
  }

  if (opts.order) {
    d.order = *opts.order;
  } else {
    if (!d.working_balance || !d.working_balance->is_positive_integer()) {
      throw DerivationError("balance after the transform gives M = " + (d.working_balance ? d.working_balance->str() : "?") +
                            ", which is not a positive integer");
    }
    d.order = static_cast<int>(*d.working_balance->integer_value());
  }
  d.ansatz = build_ansatz(d.order);
  d.laurent = substitute_ansatz(d.working, d.ansatz);
  d.system = extract_system(d.laurent, d.ansatz, problem.wave.speed);
  return d;
}

nlohmann::json complex_json(Complex z) { return nlohmann::json::array({z.real(), z.imag()}); }

nlohmann::json ode_json(const TravelingWaveODE& ode) {
  nlohmann::json eqs = nlohmann::json::array();
  for (const auto& e : ode.equations) eqs.push_back(format_equation(e, ode.profile_set()) + " = 0");
  nlohmann::json factors = nlohmann::json::array();
  for (const auto& f : ode.cleared_factors) factors.push_back(f.str());
  nlohmann::json out = {{"variable", ode.variable()},
                        {"profiles", ode.profiles},
                        {"equations", eqs},
                        {"cleared_factors", factors},
                        {"integrations", ode.integrations},
                        {"wave", {{"sign", ode.wave.sign}, {"speed", ode.wave.speed}}}};
  if (ode.eliminated) out["eliminated"] = {{"profile", ode.eliminated->profile}, {"relation", ode.eliminated->relation.str()}};
  if (ode.transform) {
    out["transform"] = {{"from", ode.transform->from},
                        {"to", ode.transform->to},
                        {"exponent", ode.transform->exponent.str()},
                        {"multiplier", ode.transform->multiplier.str()}};
  }
  return out;
}

std::string format_system(const AlgebraicSystem& system) {
  std::ostringstream out;
  for (const auto& eq : system.equations) {
    out << "phi^" << eq.source_power << ": " << eq.poly.str() << " = 0\n";
  }
  return out.str();
}

nlohmann::json system_json(const AlgebraicSystem& system) {
  nlohmann::json eqs = nlohmann::json::array();
  for (const auto& eq : system.equations) {
    eqs.push_back({{"power", eq.source_power}, {"cleared_power", eq.cleared_power}, {"equation", eq.poly.str()}});
  }
  return {{"unknowns", system.unknowns},
          {"parameters", system.parameters},
          {"speed", system.speed},
          {"clearing_shift", system.clearing_shift},
          {"dropped_powers", system.dropped_powers},
          {"equations", eqs}};
}

nlohmann::json derivation_json(const Derivation& d) {
  nlohmann::json out = {{"problem", d.problem.name}, {"ode", ode_json(d.ode)}, {"M", d.order}, {"system", system_json(d.system)}};
  if (d.balance) out["balance"] = d.balance->str();
  if (d.working.transform) {
    out["working_ode"] = ode_json(d.working);
    if (d.working_balance) out["working_balance"] = d.working_balance->str();
  }
  out["ansatz"] = d.ansatz.expansion.str();
  return out;
}

nlohmann::json candidate_json(const Candidate& cand) {
  nlohmann::json out = nlohmann::json::object();
  out["source"] = cand.source;
  const char* status = cand.status == CandidateStatus::verified ? "verified"
                       : cand.status == CandidateStatus::failed ? "failed"
                                                                 : "unverified";
  out["status"] = status;
  if (cand.is_numeric()) {
    nlohmann::json values = nlohmann::json::object();
    for (const auto& [k, v] : cand.numeric) values[k] = complex_json(v);
    out["values"] = values;
  } else {
    nlohmann::json values = nlohmann::json::object();
    for (const auto& [k, v] : cand.bindings) values[k] = v.str();
    out["bindings"] = values;
  }
  out["arbitrary"] = std::vector<std::string>(cand.arbitrary.begin(), cand.arbitrary.end());
  return out;
}

nlohmann::json verification_json(const VerificationReport& report) {
  nlohmann::json eqs = nlohmann::json::array();
  for (const auto& e : report.equations) {
    nlohmann::json row = {{"power", e.power}, {"zero", e.zero}};
    if (!e.zero) row["residual"] = e.residual;
    eqs.push_back(row);
  }
  return {{"pass", report.pass}, {"equations", eqs}, {"notes", report.notes}};
}

nlohmann::json solve_json(const SolveResult& result) {
  nlohmann::json cands = nlohmann::json::array();
  for (const auto& c : result.candidates) cands.push_back(candidate_json(c));
  std::string status = result.candidates.empty() ? (result.all_singular ? "jacobian singular at every start" : "no roots found")
                                                 : "roots found";
  return {{"status", status},
          {"free_unknowns", result.free_unknowns},
          {"attempted_starts", result.attempted_starts},
          {"converged_starts", result.converged_starts},
          {"candidates", cands}};
}

std::string present(const Expr& e) {
  std::string text = e.str();
  const std::string from = "sqrt(";
  for (auto pos = text.find(from); pos != std::string::npos; pos = text.find(from, pos)) {
    const bool inside_name = pos > 0 && (std::isalnum(static_cast<unsigned char>(text[pos - 1])) != 0 || text[pos - 1] == '_');
    if (inside_name) {
      pos += from.size();
      continue;
    }
    text.replace(pos, from.size(), "\u221a(");
  }
  return text;
}

nlohmann::json solution_json(const ClosedFormSolution& sol) {
  nlohmann::json fields = nlohmann::json::object();
  nlohmann::json display = nlohmann::json::object();
  for (const auto& [k, v] : sol.fields) {
    fields[k] = v.str();
    display[k] = present(v);
  }
  nlohmann::json profiles = nlohmann::json::object();
  for (const auto& [k, v] : sol.profiles) profiles[k] = v.str();
  nlohmann::json out = {{"branch", branch_name(sol.branch)},
                        {"fields", fields},
                        {"display", display},
                        {"profiles", profiles},
                        {"speed", sol.speed.str()}};
  if (sol.power_exponent) out["power_exponent"] = sol.power_exponent->str();
  return out;
}

std::filesystem::path fixtures_dir() {
  if (const char* env = std::getenv("MEDA_FIXTURES"); env != nullptr && *env != '\0') return env;
#ifdef MEDA_DEFAULT_FIXTURES
  return MEDA_DEFAULT_FIXTURES;
#else
  return "fixtures";
#endif
}

std::filesystem::path problem_path(const std::filesystem::path& fixtures, const std::string& name) {
  std::filesystem::path p = fixtures / (name + ".meda");
  if (std::filesystem::exists(p)) return p;
  if (std::filesystem::exists(name)) return name;
  throw Error("no problem file for '" + name + "' under " + fixtures.string());
}

DeriveOptions case_options(const CandidateFile& file) {
  DeriveOptions opts;
  if (file.transform) {
    opts.transform = parse_expr_free(*file.transform);
  } else {
    opts.auto_transform = true;
  }
  return opts;
}

}  // namespace meda
