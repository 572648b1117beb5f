#include "meda/solution.hpp"

#include "meda/calculus.hpp"
#include "meda/error.hpp"
#include "meda/rational_function.hpp"

namespace meda {

Expr build_phi(const Expr& b, Branch branch, const std::string& variable) {
  const Expr z = sym(variable);
  switch (branch) {
    case Branch::tanh: {
      Expr r = apply(Func::sqrt, -b);
      return -r * apply(Func::tanh, r * z);
    }
    case Branch::coth: {
      Expr r = apply(Func::sqrt, -b);
      return -r * apply(Func::coth, r * z);
    }
    case Branch::tan: {
      Expr r = apply(Func::sqrt, b);
      return r * apply(Func::tan, r * z);
    }
    case Branch::cot: {
      Expr r = apply(Func::sqrt, b);
      return -r * apply(Func::cot, r * z);
    }
    case Branch::rational:
      if (!poly_zero_check(b)) throw DerivationError("the rational branch needs b = 0, got b = " + b.str());
      return Expr(-1) / z;
  }
  throw DerivationError("unknown branch");
}

ClosedFormSolution assemble_solution(const Candidate& cand, const Ansatz& ansatz, Branch branch, const TravelingWaveODE& ode,
                                     const std::string& space, const std::string& time) {
  if (cand.status != CandidateStatus::verified) throw CandidateError("refusing to assemble an unverified candidate");
  Bindings values = cand.resolved();
  if (cand.is_numeric()) {
    for (const auto& [k, v] : cand.numeric) values[k] = Expr(GaussianRational::from_complex(v));
  }
  const Expr bval = values.contains(ansatz.aux) ? values.at(ansatz.aux) : sym(ansatz.aux);
  const std::string& z = ode.variable();
  const Expr phi = build_phi(bval, branch, z);

  Bindings with_phi = values;
  with_phi[ansatz.phi] = phi;
  const Expr w = substitute(ansatz.expansion, with_phi);

  ClosedFormSolution sol;
  sol.branch = branch;
  sol.origin = cand.source;
  std::string main = ode.profiles.front();
  Expr main_expr = w;
  if (ode.transform) {
    main = ode.transform->from;
    const Expr p = substitute(ode.transform->exponent, values);
    main_expr = pow(w, p);
    sol.power_exponent = p;
    sol.profiles[ode.transform->to] = w;
  }
  sol.profiles[main] = main_expr;
  if (ode.eliminated) {
    Bindings rel = values;
    rel[main] = main_expr;
    sol.profiles[ode.eliminated->profile] = substitute(ode.eliminated->relation, rel);
  }

  sol.speed = values.contains(ode.wave.speed) ? values.at(ode.wave.speed) : sym(ode.wave.speed);
  const Expr wave = Expr::imaginary_unit() * (sym(space) + Expr(static_cast<long>(ode.wave.sign)) * sol.speed * sym(time));
  for (const auto& [unknown, profile] : ode.profile_of) {
    auto it = sol.profiles.find(profile);
    if (it == sol.profiles.end()) throw DerivationError("no expression for profile " + profile);
    sol.fields[unknown] = substitute(it->second, {{z, wave}});
  }
  return sol;
}

}  // namespace meda
