#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "meda/engine.hpp"
#include "meda/eval.hpp"

namespace meda {

enum class CandidateStatus { unverified, verified, failed };

struct Candidate {
  /// Exact bindings of unknowns (and possibly parameters).
  Bindings bindings;
  /// Numeric bindings for solver-produced candidates.
  NumericBindings numeric;
  SymbolSet arbitrary;
  /// Named shorthands substituted into the bindings before use.
  std::vector<std::pair<std::string, Expr>> abbreviations;
  std::string source;
  CandidateStatus status = CandidateStatus::unverified;

  bool is_numeric() const { return bindings.empty() && !numeric.empty(); }
  /// Bindings with every abbreviation expanded.
  Bindings resolved() const;
};

struct EquationCheck {
  int power = 0;
  bool zero = false;
  std::string residual;
};

struct VerificationReport {
  std::vector<EquationCheck> equations;
  bool pass = false;
  std::vector<std::string> notes;
};

/// Exact check: every equation vanishes after substituting the bindings.
/// Throws CandidateError for undeclared symbols or missing unknowns and
/// DivisionByZero for an identically-zero denominator.
VerificationReport verify_candidate(const AlgebraicSystem& system, const Candidate& cand);

/// Largest |equation| over the system at numeric values of every symbol.
double numeric_residual(const AlgebraicSystem& system, const NumericBindings& values);

struct SolveConfig {
  int starts = 200;
  double radius = 5.0;
  double tol = 1e-10;
  double dedup = 1e-6;
  int max_iterations = 100;
  std::uint64_t seed = 0;
};

struct SolveResult {
  std::vector<Candidate> candidates;
  std::vector<std::string> free_unknowns;
  int attempted_starts = 0;
  int converged_starts = 0;
  bool all_singular = false;
};

/// Multistart damped Gauss-Newton on the system with parameters and pinned
/// unknowns fixed. Starts are spread over every zero pattern of the expansion
/// coefficients; within a pattern the remaining coefficients are divided out
/// of each equation. Unknowns the system no longer depends on at a root are
/// reported as arbitrary with value 0. Roots are deduplicated and sorted
/// deterministically.
SolveResult solve_numeric(const AlgebraicSystem& system, const NumericBindings& params, const NumericBindings& pinned,
                          const SolveConfig& config = {});

/// Candidate fixture file: `key = expr` bindings plus directives.
struct CandidateFile {
  std::string source;
  std::string problem;
  Candidate candidate;
  std::vector<std::string> branches;
  std::optional<std::string> transform;
  std::vector<NumericBindings> instantiations;
  std::optional<std::string> printed_u;
  std::optional<std::string> printed_v;
  /// Printed form of the transformed profile, before undoing U = V^p.
  std::optional<std::string> printed_transformed;
  std::optional<std::string> expected;
  std::vector<std::string> notes;
};

CandidateFile parse_candidate_text(const std::string& text, const std::string& origin = "<input>");
CandidateFile parse_candidate_file(const std::filesystem::path& file);

}  // namespace meda
