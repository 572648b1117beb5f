#pragma once

#include <string>
#include <vector>

#include "meda/pde.hpp"
#include "meda/poly.hpp"

namespace meda {

/// W = a0 + sum_j (a_j phi^j + b_j phi^-j) with phi' = b + phi^2.
struct Ansatz {
  int order = 0;
  std::vector<std::string> a;  // a0..aM
  std::vector<std::string> b;  // b1..bM
  std::string aux = "b";
  std::string phi = "phi";
  Expr expansion;

  std::vector<std::string> coefficients() const;
};

Ansatz build_ansatz(int order);

/// k-th z-derivative of the expansion as a Laurent polynomial in phi,
/// applying d/dz L = (dL/dphi)(b + phi^2).
std::vector<Poly> ansatz_derivatives(const Ansatz& ansatz, int max_order);

struct LaurentExpansion {
  /// Coefficients of phi^k before clearing (k may be negative).
  PolyForm form;
  /// Power of phi multiplied through so that every exponent is nonnegative.
  int clearing_shift = 0;
  /// Powers in the occupied range whose coefficient vanished identically.
  std::vector<int> dropped_powers;
};

LaurentExpansion substitute_ansatz(const TravelingWaveODE& ode, const Ansatz& ansatz);

struct AlgebraicEquation {
  int source_power = 0;   // phi power before clearing
  int cleared_power = 0;  // phi power after clearing
  Poly poly;
};

struct AlgebraicSystem {
  std::vector<std::string> unknowns;
  /// Expansion coefficients other than a0.
  std::vector<std::string> coefficients;
  std::vector<std::string> parameters;
  std::vector<AlgebraicEquation> equations;
  std::vector<int> dropped_powers;
  std::string speed;
  int clearing_shift = 0;
};

AlgebraicSystem extract_system(const LaurentExpansion& laurent, const Ansatz& ansatz, const std::string& speed);

}  // namespace meda
