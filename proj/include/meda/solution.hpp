#pragma once

#include "meda/algsolve.hpp"
#include "meda/closed_form.hpp"

namespace meda {

/// Riccati solution phi(z) of phi' = b + phi^2 on the given branch.
/// The rational branch requires b to vanish identically.
Expr build_phi(const Expr& b, Branch branch, const std::string& variable = "z");

/// Substitutes phi(z) into the ansatz, undoes the power transform, rebuilds
/// eliminated profiles, and maps z = i*(x + s*speed*t). Refuses candidates
/// that are not verified.
ClosedFormSolution assemble_solution(const Candidate& cand, const Ansatz& ansatz, Branch branch, const TravelingWaveODE& ode,
                                     const std::string& space = "x", const std::string& time = "t");

}  // namespace meda
