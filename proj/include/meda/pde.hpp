#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "meda/expr.hpp"

namespace meda {

/// z = i*(x + sign*speed*t)
struct WaveSpec {
  std::string variable = "z";
  int sign = -1;
  std::string speed = "c";
};

struct PDEProblem {
  std::string name;
  std::string space = "x";
  std::string time = "t";
  std::vector<std::string> unknowns;
  std::vector<std::string> params;
  /// Parameters declared positive.
  SymbolSet positive;
  std::vector<Expr> equations;
  WaveSpec wave;

  SymbolSet declared() const;
};

PDEProblem parse_problem_text(const std::string& text, const std::string& origin = "<input>");
PDEProblem parse_problem(const std::filesystem::path& file);

struct PowerTransform {
  std::string from;  // U
  std::string to;    // V
  Expr exponent;     // U = V^exponent
  /// transformed = multiplier * (original with U = V^exponent)
  Expr multiplier;
};

struct Elimination {
  std::string profile;  // V
  Expr relation;        // V = relation
  std::size_t source = 0;
};

/// Ordinary differential equations in the wave variable.
struct TravelingWaveODE {
  std::vector<Expr> equations;
  std::vector<std::string> profiles;
  /// unknown u -> profile U
  std::map<std::string, std::string> profile_of;
  WaveSpec wave;
  std::vector<std::string> params;
  /// Per equation: original PDE = factor * reduced equation.
  std::vector<Expr> cleared_factors;
  std::vector<Expr> integration_constants;
  int integrations = 0;
  std::optional<Elimination> eliminated;
  std::optional<PowerTransform> transform;

  const std::string& variable() const { return wave.variable; }
  SymbolSet profile_set() const { return {profiles.begin(), profiles.end()}; }
  SymbolSet declared() const;
};

TravelingWaveODE reduce_to_ode(const PDEProblem& problem);

/// Integrates every equation once in the wave variable; `constants[k]` is
/// moved to the right-hand side of equation k (missing entries are zero).
TravelingWaveODE integrate_once(const TravelingWaveODE& ode, const std::vector<Expr>& constants = {});

/// True when every term of every equation matches an antiderivative pattern.
bool integrable(const TravelingWaveODE& ode);

/// Solves an equation linear in `profile` for it and substitutes the result
/// into the remaining equations. `into` selects the receiving equation.
TravelingWaveODE eliminate(const TravelingWaveODE& ode, const std::string& profile,
                           std::optional<std::size_t> into = std::nullopt);

/// Terms of `e` grouped by their profile-dependent part, highest derivative
/// order first: (alpha - c)*D(U, z) - lambda*D(U^n, z) + ...
std::string format_equation(const Expr& e, const SymbolSet& profiles);

/// Replaces each profile by an expression in the wave variable and resolves
/// every derivative marker.
Expr instantiate_profiles(const Expr& e, const Bindings& profiles);

}  // namespace meda
