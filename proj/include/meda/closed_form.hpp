#pragma once

#include <map>
#include <optional>
#include <string>

#include "meda/expr.hpp"

namespace meda {

enum class Branch { tanh, coth, tan, cot, rational };

inline std::string branch_name(Branch b) {
  switch (b) {
    case Branch::tanh: return "tanh";
    case Branch::coth: return "coth";
    case Branch::tan: return "tan";
    case Branch::cot: return "cot";
    case Branch::rational: return "rational";
  }
  return "?";
}

inline std::optional<Branch> parse_branch(const std::string& name) {
  for (Branch b : {Branch::tanh, Branch::coth, Branch::tan, Branch::cot, Branch::rational}) {
    if (branch_name(b) == name) return b;
  }
  return std::nullopt;
}

/// Traveling-wave solution: one field per unknown, in x and t.
struct ClosedFormSolution {
  Branch branch = Branch::tan;
  /// unknown -> expression in x, t
  std::map<std::string, Expr> fields;
  /// profile -> expression in the wave variable
  std::map<std::string, Expr> profiles;
  Expr speed;
  std::optional<Expr> power_exponent;
  std::string origin;
};

}  // namespace meda
