// Residual check of the Boussinesq kink with the solution supplied as text.
// Links only the expression, PDE and verification libraries.
#include <iostream>

#include "meda/parser.hpp"
#include "meda/pde.hpp"
#include "meda/verify.hpp"

int main(int argc, char** argv) {
  using namespace meda;
  const std::string fixtures = argc > 1 ? argv[1] : MEDA_FIXTURES_DIR;
  try {
    const PDEProblem problem = parse_problem(fixtures + "/boussinesq.meda");
    const Bindings fields{{"u", parse_expr_free("1 - tanh((x - t)/2)")},
                          {"v", parse_expr_free("(1 - tanh((x - t)/2)) - (1 - tanh((x - t)/2))^2/2")}};
    const ResidualReport r = pde_residual(problem, fields, GridSpec{}, {});
    const bool pass = r.max() < 1e-8 && r.skipped * 10 < r.total;
    std::cout << (pass ? "PASS" : "FAIL") << " oracle independence: max PDE residual " << r.max() << ", skipped " << r.skipped
              << " of " << r.total << ", finite-difference cross-check max relative " << r.crosscheck_max_relative << "\n";
    return pass ? 0 : 1;
  } catch (const std::exception& err) {
    std::cout << "FAIL oracle independence: " << err.what() << "\n";
    return 1;
  }
}
