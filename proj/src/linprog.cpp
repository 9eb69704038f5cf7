#include "pwacert/linprog.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace pwacert::linprog {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;
constexpr double kFeasCheckTol = 1e-7;

struct Transformed {
  // Original variable j maps to column pos[j] (shifted by lower bound) or to
  // the pair (pos[j], pos[j]+1) acting as x = y+ - y- when free[j] is set.
  std::vector<int> pos;
  std::vector<bool> free;
  std::vector<double> shift;
  int num_cols = 0;
};

Transformed transform_variables(const LpProblem& p) {
  Transformed t;
  const auto& lower = p.lower_bounds();
  t.pos.resize(lower.size());
  t.free.resize(lower.size());
  t.shift.resize(lower.size(), 0.0);
  int col = 0;
  for (size_t j = 0; j < lower.size(); ++j) {
    t.pos[j] = col;
    if (lower[j].has_value()) {
      t.free[j] = false;
      t.shift[j] = *lower[j];
      col += 1;
    } else {
      t.free[j] = true;
      col += 2;
    }
  }
  t.num_cols = col;
  return t;
}

class SimplexTableau {
 public:
  SimplexTableau(Eigen::MatrixXd A, Eigen::VectorXd b, std::vector<int> basis,
                 std::vector<bool> banned)
      : A_(std::move(A)), b_(std::move(b)), basis_(std::move(basis)), banned_(std::move(banned)) {
    row_ids_.resize(static_cast<size_t>(A_.rows()));
    for (size_t i = 0; i < row_ids_.size(); ++i) row_ids_[i] = static_cast<int>(i);
  }

  // Minimizes c over the current feasible tableau.  Returns false when the
  // problem is unbounded in the direction of some entering column.
  bool minimize(const Eigen::VectorXd& c, long max_iters) {
    Eigen::VectorXd z = reduced_costs(c);
    long degenerate_streak = 0;
    bool bland = false;
    for (long iter = 0; iter < max_iters; ++iter) {
      int enter = pick_entering(z, bland);
      if (enter < 0) return true;  // optimal
      int leave = ratio_test(enter);
      if (leave < 0) return false;  // unbounded
      if (b_(leave) < kPivotTol) {
        if (++degenerate_streak > 64) bland = true;
      } else {
        degenerate_streak = 0;
      }
      pivot(leave, enter);
      z = reduced_costs(c);
    }
    throw SolverFailure("simplex iteration limit exceeded");
  }

  Eigen::VectorXd reduced_costs(const Eigen::VectorXd& c) const {
    Eigen::VectorXd cb(basis_.size());
    for (size_t i = 0; i < basis_.size(); ++i) cb(static_cast<long>(i)) = c(basis_[i]);
    return c - A_.transpose() * cb;
  }

  int pick_entering(const Eigen::VectorXd& z, bool bland) const {
    int best = -1;
    double best_val = -kCostTol;
    for (int j = 0; j < z.size(); ++j) {
      if (banned_[static_cast<size_t>(j)]) continue;
      if (z(j) < best_val) {
        if (bland) return j;  // first (lowest-index) improving column
        best_val = z(j);
        best = j;
      }
    }
    return best;
  }

  int ratio_test(int enter) const {
    int leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < A_.rows(); ++i) {
      const double a = A_(i, enter);
      if (a <= kPivotTol) continue;
      const double ratio = b_(i) / a;
      if (ratio < best - kPivotTol || (ratio < best + kPivotTol && leave >= 0 && basis_[static_cast<size_t>(i)] < basis_[static_cast<size_t>(leave)])) {
        best = ratio;
        leave = i;
      }
    }
    return leave;
  }

  void pivot(int row, int col) {
    const double piv = A_(row, col);
    A_.row(row) /= piv;
    b_(row) /= piv;
    for (int i = 0; i < A_.rows(); ++i) {
      if (i == row) continue;
      const double f = A_(i, col);
      if (f == 0.0) continue;
      A_.row(i) -= f * A_.row(row);
      b_(i) -= f * b_(row);
      if (b_(i) < 0.0 && b_(i) > -1e-11) b_(i) = 0.0;
    }
    basis_[static_cast<size_t>(row)] = col;
  }

  // Drives basic artificials out of the basis after phase 1 (degenerate
  // pivots are safe at zero) and erases rows that turned out redundant.
  void clear_artificials(int first_artificial) {
    std::vector<int> keep;
    for (int i = 0; i < A_.rows(); ++i) {
      if (basis_[static_cast<size_t>(i)] < first_artificial) {
        keep.push_back(i);
        continue;
      }
      int col = -1;
      double best = kPivotTol;
      for (int j = 0; j < first_artificial; ++j) {
        if (std::abs(A_(i, j)) > best) {
          best = std::abs(A_(i, j));
          col = j;
        }
      }
      if (col >= 0) {
        pivot(i, col);
        keep.push_back(i);
      }
      // else: redundant row, dropped below
    }
    if (static_cast<int>(keep.size()) != A_.rows()) {
      Eigen::MatrixXd A2(keep.size(), A_.cols());
      Eigen::VectorXd b2(keep.size());
      std::vector<int> basis2, rows2;
      for (size_t i = 0; i < keep.size(); ++i) {
        A2.row(static_cast<long>(i)) = A_.row(keep[i]);
        b2(static_cast<long>(i)) = b_(keep[i]);
        basis2.push_back(basis_[static_cast<size_t>(keep[i])]);
        rows2.push_back(row_ids_[static_cast<size_t>(keep[i])]);
      }
      A_ = std::move(A2);
      b_ = std::move(b2);
      basis_ = std::move(basis2);
      row_ids_ = std::move(rows2);
    }
    for (size_t j = static_cast<size_t>(first_artificial); j < banned_.size(); ++j) banned_[j] = true;
  }

  const std::vector<int>& basis() const { return basis_; }
  const std::vector<int>& row_ids() const { return row_ids_; }
  const Eigen::VectorXd& rhs() const { return b_; }
  Eigen::MatrixXd& matrix() { return A_; }

 private:
  Eigen::MatrixXd A_;
  Eigen::VectorXd b_;
  std::vector<int> basis_;
  std::vector<bool> banned_;
  std::vector<int> row_ids_;  // original constraint rows still present
};

}  // namespace

int LpProblem::add_variable(std::string name, std::optional<double> lower) {
  names_.push_back(std::move(name));
  lower_.push_back(lower);
  objective_.push_back(0.0);
  return static_cast<int>(names_.size()) - 1;
}

void LpProblem::add_objective(int var, double coeff) {
  if (!std::isfinite(coeff)) throw std::invalid_argument("non-finite objective coefficient");
  objective_.at(static_cast<size_t>(var)) += coeff;
}

void LpProblem::add_constraint(std::vector<LpTerm> terms, Relation rel, double rhs) {
  for (const auto& t : terms) {
    if (t.var < 0 || t.var >= num_variables())
      throw std::invalid_argument("constraint references undeclared variable");
    if (!std::isfinite(t.coeff)) throw std::invalid_argument("non-finite constraint coefficient");
  }
  if (!std::isfinite(rhs)) throw std::invalid_argument("non-finite rhs");
  rows_.push_back(LpConstraint{std::move(terms), rel, rhs});
}

double max_constraint_violation(const LpProblem& p, const std::vector<double>& x) {
  double worst = 0.0;
  for (const auto& row : p.constraints()) {
    double lhs = 0.0;
    double scale = 1.0 + std::abs(row.rhs);
    for (const auto& t : row.terms) {
      lhs += t.coeff * x[static_cast<size_t>(t.var)];
      scale += std::abs(t.coeff * x[static_cast<size_t>(t.var)]);
    }
    double v = 0.0;
    switch (row.rel) {
      case Relation::LessEq: v = lhs - row.rhs; break;
      case Relation::GreaterEq: v = row.rhs - lhs; break;
      case Relation::Equal: v = std::abs(lhs - row.rhs); break;
    }
    worst = std::max(worst, v / scale);
  }
  return worst;
}

LpSolution solve_builtin(const LpProblem& p) {
  const Transformed tr = transform_variables(p);
  const int m = p.num_constraints();
  const int n_struct = tr.num_cols;

  // Count slack/surplus and artificial columns.
  int n_slack = 0;
  for (const auto& row : p.constraints())
    if (row.rel != Relation::Equal) ++n_slack;
  const int first_artificial = n_struct + n_slack;
  const int n_total = first_artificial + m;

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, n_total);
  Eigen::VectorXd b(m);
  std::vector<int> basis(static_cast<size_t>(m), -1);

  int slack_at = n_struct;
  for (int i = 0; i < m; ++i) {
    const auto& row = p.constraints()[static_cast<size_t>(i)];
    double rhs = row.rhs;
    Eigen::RowVectorXd coeffs = Eigen::RowVectorXd::Zero(n_struct);
    for (const auto& t : row.terms) {
      const size_t j = static_cast<size_t>(t.var);
      if (tr.free[j]) {
        coeffs(tr.pos[j]) += t.coeff;
        coeffs(tr.pos[j] + 1) -= t.coeff;
      } else {
        coeffs(tr.pos[j]) += t.coeff;
        rhs -= t.coeff * tr.shift[j];
      }
    }
    Relation rel = row.rel;
    if (rhs < 0.0) {
      coeffs = -coeffs;
      rhs = -rhs;
      if (rel == Relation::LessEq) rel = Relation::GreaterEq;
      else if (rel == Relation::GreaterEq) rel = Relation::LessEq;
    }
    A.block(i, 0, 1, n_struct) = coeffs;
    b(i) = rhs;
    if (rel == Relation::LessEq) {
      A(i, slack_at) = 1.0;
      basis[static_cast<size_t>(i)] = slack_at;  // slack starts basic
      ++slack_at;
    } else if (rel == Relation::GreaterEq) {
      A(i, slack_at) = -1.0;
      ++slack_at;
    }
    if (basis[static_cast<size_t>(i)] < 0) {
      A(i, first_artificial + i) = 1.0;
      basis[static_cast<size_t>(i)] = first_artificial + i;
    }
  }

  std::vector<bool> banned(static_cast<size_t>(n_total), false);
  const Eigen::MatrixXd A0 = A;  // pristine copies for the final basis resolve
  const Eigen::VectorXd b0 = b;
  SimplexTableau tab(A, b, basis, banned);
  const long max_iters = 20000 + 200L * (m + n_total);

  // Phase 1: minimize the artificial sum.
  bool any_artificial_basic = false;
  for (int v : tab.basis())
    if (v >= first_artificial) any_artificial_basic = true;
  if (any_artificial_basic) {
    Eigen::VectorXd c1 = Eigen::VectorXd::Zero(n_total);
    for (int j = first_artificial; j < n_total; ++j) c1(j) = 1.0;
    if (!tab.minimize(c1, max_iters))
      throw SolverFailure("phase-1 subproblem reported unbounded");
    double infeas = 0.0;
    for (size_t i = 0; i < tab.basis().size(); ++i)
      if (tab.basis()[i] >= first_artificial) infeas += tab.rhs()(static_cast<long>(i));
    if (infeas > 1e-7) return LpSolution{LpStatus::Infeasible, {}, 0.0};
    tab.clear_artificials(first_artificial);
  }

  // Phase 2: the actual objective over structural columns.
  Eigen::VectorXd c2 = Eigen::VectorXd::Zero(n_total);
  for (int v = 0; v < p.num_variables(); ++v) {
    const double cv = p.objective()[static_cast<size_t>(v)];
    if (cv == 0.0) continue;
    const size_t j = static_cast<size_t>(v);
    if (tr.free[j]) {
      c2(tr.pos[j]) += cv;
      c2(tr.pos[j] + 1) -= cv;
    } else {
      c2(tr.pos[j]) += cv;
    }
  }
  if (!tab.minimize(c2, max_iters)) return LpSolution{LpStatus::Unbounded, {}, 0.0};

  // Re-solve the final basis against the pristine rows: the tableau drifts
  // over long pivot sequences, the factorization does not.
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n_total);
  {
    const int mb = static_cast<int>(tab.basis().size());
    Eigen::MatrixXd B(mb, mb);
    Eigen::VectorXd rhs(mb);
    for (int i = 0; i < mb; ++i) {
      for (int j = 0; j < mb; ++j)
        B(i, j) = A0(tab.row_ids()[static_cast<size_t>(i)], tab.basis()[static_cast<size_t>(j)]);
      rhs(i) = b0(tab.row_ids()[static_cast<size_t>(i)]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
    if (lu.isInvertible()) {
      const Eigen::VectorXd xb = lu.solve(rhs);
      for (int j = 0; j < mb; ++j) y(tab.basis()[static_cast<size_t>(j)]) = xb(j);
    } else {
      for (size_t i = 0; i < tab.basis().size(); ++i)
        y(tab.basis()[i]) = tab.rhs()(static_cast<long>(i));
    }
  }
  LpSolution sol;
  sol.status = LpStatus::Optimal;
  sol.values.resize(static_cast<size_t>(p.num_variables()));
  for (int v = 0; v < p.num_variables(); ++v) {
    const size_t j = static_cast<size_t>(v);
    sol.values[j] = tr.free[j] ? y(tr.pos[j]) - y(tr.pos[j] + 1) : y(tr.pos[j]) + tr.shift[j];
  }
  sol.objective_value = 0.0;
  for (int v = 0; v < p.num_variables(); ++v)
    sol.objective_value += p.objective()[static_cast<size_t>(v)] * sol.values[static_cast<size_t>(v)];

  const double viol = max_constraint_violation(p, sol.values);
  if (viol > kFeasCheckTol)
    throw SolverFailure("optimal basis violates constraints by " + std::to_string(viol));
  return sol;
}

LpSolution solve(const LpProblem& p) {
  const char* backend = std::getenv("PWACERT_LP_BACKEND");
  if (backend == nullptr || std::string(backend) == "builtin") return solve_builtin(p);
  throw SolverFailure("unknown LP backend: " + std::string(backend));
}

}  // namespace pwacert::linprog
