#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Linear-program builder plus a pluggable solver adapter.  The default
// backend is a built-in dense two-phase simplex, so the whole toolkit runs
// without external solver dependencies.  Set PWACERT_LP_BACKEND to pick a
// different registered backend.

namespace pwacert::linprog {

enum class Relation { LessEq, Equal, GreaterEq };
enum class LpStatus { Optimal, Infeasible, Unbounded };

struct SolverFailure : std::runtime_error {
  explicit SolverFailure(const std::string& what) : std::runtime_error(what) {}
};

struct LpTerm {
  int var = -1;
  double coeff = 0.0;
};

// One sparse row: sum(coeff * x[var]) REL rhs.
struct LpConstraint {
  std::vector<LpTerm> terms;
  Relation rel = Relation::LessEq;
  double rhs = 0.0;
};

class LpProblem {
 public:
  // Variables without a lower bound are free.  Returns the variable id.
  int add_variable(std::string name, std::optional<double> lower = std::nullopt);

  // Objective is always minimized; repeated calls accumulate coefficients.
  void add_objective(int var, double coeff);

  void add_constraint(std::vector<LpTerm> terms, Relation rel, double rhs);

  int num_variables() const { return static_cast<int>(names_.size()); }
  int num_constraints() const { return static_cast<int>(rows_.size()); }
  const std::string& variable_name(int v) const { return names_.at(static_cast<size_t>(v)); }
  const std::vector<std::optional<double>>& lower_bounds() const { return lower_; }
  const std::vector<double>& objective() const { return objective_; }
  const std::vector<LpConstraint>& constraints() const { return rows_; }

 private:
  std::vector<std::string> names_;
  std::vector<std::optional<double>> lower_;
  std::vector<double> objective_;
  std::vector<LpConstraint> rows_;
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> values;  // indexed by variable id, valid when Optimal
  double objective_value = 0.0;

  double value(int var) const { return values.at(static_cast<size_t>(var)); }
};

// Solves with the backend named in PWACERT_LP_BACKEND ("builtin" default).
LpSolution solve(const LpProblem& problem);

// The built-in dense two-phase simplex (deterministic pivot rule).
LpSolution solve_builtin(const LpProblem& problem);

// How far a candidate point is from satisfying every constraint (max violation).
double max_constraint_violation(const LpProblem& problem, const std::vector<double>& x);

}  // namespace pwacert::linprog
