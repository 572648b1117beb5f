#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "meda/algsolve.hpp"
#include "meda/balance.hpp"
#include "meda/solution.hpp"
#include "meda/verify.hpp"

namespace meda {

struct DeriveOptions {
  /// Unset: integrate when every term has an antiderivative.
  std::optional<bool> integrate;
  std::vector<Expr> constants;
  /// Unknown or profile to eliminate. Unset: eliminate automatically for systems.
  std::optional<std::string> eliminate;
  bool auto_eliminate = true;
  /// U = V^p applied before the ansatz.
  std::optional<Expr> transform;
  /// Picks p from the balance when M is not a positive integer.
  bool auto_transform = false;
  std::optional<int> order;
};

struct Derivation {
  PDEProblem problem;
  TravelingWaveODE ode;
  std::optional<BalanceOrder> balance;
  TravelingWaveODE working;
  std::optional<BalanceOrder> working_balance;
  int order = 0;
  Ansatz ansatz;
  LaurentExpansion laurent;
  AlgebraicSystem system;
};

/// Reduction, integration and elimination.
TravelingWaveODE prepare_ode(const PDEProblem& problem, const DeriveOptions& opts);
Derivation derive(const PDEProblem& problem, const DeriveOptions& opts);

nlohmann::json complex_json(Complex z);
nlohmann::json ode_json(const TravelingWaveODE& ode);
nlohmann::json system_json(const AlgebraicSystem& system);
nlohmann::json derivation_json(const Derivation& d);
nlohmann::json candidate_json(const Candidate& cand);
nlohmann::json verification_json(const VerificationReport& report);
nlohmann::json solve_json(const SolveResult& result);
nlohmann::json solution_json(const ClosedFormSolution& sol);

std::string format_system(const AlgebraicSystem& system);

/// Presentation text: the grammar rendering with radicals written as √(...).
std::string present(const Expr& e);

/// Fixture directory: MEDA_FIXTURES when set, otherwise the shipped one.
std::filesystem::path fixtures_dir();

/// Problem path for a candidate's `problem:` name, relative to the fixtures.
std::filesystem::path problem_path(const std::filesystem::path& fixtures, const std::string& name);

/// Derivation options implied by a candidate file.
DeriveOptions case_options(const CandidateFile& file);

struct InstantiationResult {
  std::string label;
  NumericBindings values;
  std::optional<double> ode_residual;
  std::optional<double> pde_residual;
  std::size_t pde_skipped = 0;
  std::size_t pde_total = 0;
  std::optional<double> printed_residual;
  std::optional<double> printed_transformed_residual;
  std::optional<double> printed_diff;
  std::vector<std::string> notes;
};

struct CompatRow {
  std::string id;
  std::string problem;
  bool pass = false;
  std::optional<std::string> expected;
  std::vector<std::string> failing;
  std::vector<std::string> branches;
  std::vector<InstantiationResult> instantiations;
  std::vector<std::string> notes;

  /// Symbolic pass and every derived ODE residual below the tolerance.
  bool residuals_ok(double tol) const;
};

struct ReductionCheck {
  std::string problem;
  std::string stage;
  std::size_t index = 0;
  std::string printed;
  std::string derived;
  /// "identical", "identical up to sign" or "differs"
  std::string status;
  std::string difference;
  std::vector<std::string> notes;
};

struct CompatOptions {
  GridSpec grid;
  std::optional<std::string> case_id;
  double tol = 1e-8;
  double pole_guard = 0.1;
};

struct CompatReport {
  std::vector<CompatRow> rows;
  std::vector<ReductionCheck> reductions;
  double tol = 1e-8;

  nlohmann::json to_json() const;
  std::string to_markdown() const;
};

CompatRow run_case(const std::filesystem::path& fixtures, const std::filesystem::path& case_file, const CompatOptions& opts);
std::vector<ReductionCheck> run_reduction_checks(const std::filesystem::path& fixtures, const std::filesystem::path& file);
CompatReport run_compat(const std::filesystem::path& fixtures, const CompatOptions& opts);

}  // namespace meda
