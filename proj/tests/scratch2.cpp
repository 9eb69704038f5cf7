// LP debugging probe (not part of the test suite).
#include "pwacert/fixtures.hpp"
#include "pwacert/io.hpp"
#include "pwacert/iise.hpp"
#include "oracles.hpp"
#include <iostream>

using namespace pwacert;

int main() {
  auto dynamics = io::build_dynamics(fixtures::pendulum());
  auto aligned = iise::align_domain_tangencies(dynamics);
  std::cout << "aligned cells: " << aligned.cells().size() << "\n";
  iise::IiseConfig cfg;
  auto cats = iise::categorize_seed(aligned);
  std::cout << "excl pairs: " << cats.excluded.size() << " uc: " << cats.unclassified.size() << "\n";
  auto built = iise::build_iise_lp(aligned, cats, cfg.alpha0, cfg.alpha0, cfg.tolerances());
  std::cout << "LP: vars=" << built.problem.num_variables()
            << " rows=" << built.problem.num_constraints() << "\n";
  try {
    auto sol = linprog::solve_builtin(built.problem);
    std::cout << "builtin: status=" << (int)sol.status << " obj=" << sol.objective_value
              << " viol=" << linprog::max_constraint_violation(built.problem, sol.values) << "\n";
  } catch (const std::exception& e) {
    std::cout << "builtin error: " << e.what() << "\n";
  }
  auto ref = oracles::reference_simplex(built.problem);
  std::cout << "reference: status=" << (int)ref.status << " obj=" << ref.objective << "\n";
  if (ref.status == oracles::SimplexResult::Status::Optimal)
    std::cout << "reference viol=" << linprog::max_constraint_violation(built.problem, ref.values) << "\n";
  return 0;
}
