#pragma once

#include "pwacert/geometry.hpp"
#include "pwacert/linprog.hpp"

#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

// Iterative invariant-set estimation for continuous PWA dynamics: seed a
// PWA barrier, align the partition with the set boundary, categorize
// (cell, vertex) pairs, solve the certification LP under the Leaky-ReLU
// alpha schedule, refine on failure, and iterate while the NUGIS growth
// condition holds at some boundary vertex.

namespace pwacert::iise {

using geometry::Cell;
using geometry::Partition;
using geometry::Vector;

struct RefinementStalled : std::runtime_error {
  explicit RefinementStalled(const std::string& what) : std::runtime_error(what) {}
};
struct NoInvariantSet : std::runtime_error {
  explicit NoInvariantSet(const std::string& what) : std::runtime_error(what) {}
};

// Certification threshold on the blocking-slack sum.
constexpr double kCertTol = 1e-6;

// PWA barrier h_i(x) = s_i.x + t_i over a partition, with the Leaky-ReLU
// class-K-infinity schedule: slope alpha0 where h >= 0 and the decayed
// slope alpha_m where h < 0.
struct BarrierFunction {
  struct CellCoeff {
    Vector s;
    double t = 0.0;
  };
  std::vector<CellCoeff> coeffs;  // indexed by cell id
  double alpha0 = 10.0;
  double gamma = 0.1;
  int iteration = 0;

  double alpha_m() const { return alpha0 * std::pow(1.0 - gamma, iteration); }
  double value(int cell, const Vector& x) const {
    const auto& c = coeffs.at(static_cast<size_t>(cell));
    return c.s.dot(x) + c.t;
  }
};

double barrier_value(const BarrierFunction& h, const Partition& p, int cell, const Vector& x);
// Derivative of h along the cell's affine flow: s_i . (A_i x + a_i).
double barrier_derivative(const BarrierFunction& h, const Cell& cell, const Vector& x);
// Evaluation through locate(); any containing cell serves (h is continuous).
double barrier_at(const BarrierFunction& h, const Partition& p, const Vector& x);

// Five disjoint classes of (cell id, vertex id) pairs covering the
// incidence set of a boundary-aligned partition.
struct VertexCategorization {
  std::set<std::pair<int, int>> interior;      // strictly inside the set
  std::set<std::pair<int, int>> nugis;         // boundary, growable
  std::set<std::pair<int, int>> bis;           // boundary, may stay
  std::set<std::pair<int, int>> excluded;      // must stay outside
  std::set<std::pair<int, int>> unclassified;  // the rest

  size_t total() const {
    return interior.size() + nugis.size() + bis.size() + excluded.size() + unclassified.size();
  }
  bool is_disjoint_cover(const Partition& p) const;
};

struct IiseTolerances {
  double eps1 = 1e-4;
  double eps2 = 1e-4;
  double eps3 = 1e-4;
  double eps_nugis = 1e-3;
  double penalty = 1e3;
};

struct IiseConfig {
  double alpha0 = 10.0;
  double gamma = 0.1;
  double eps1 = 1e-4;
  double eps2 = 1e-4;
  double eps3 = 1e-4;
  double eps_nugis = 1e-3;
  double penalty = 1e3;  // must exceed 1
  int max_iter = 10;
  int max_inner_rounds = 25;
  int max_seed_rounds = 24;
  int stagnation_rounds = 3;          // non-improving LP rounds before giving up
  double min_diameter_factor = 1e-4;  // refinement floor relative to domain diameter

  IiseTolerances tolerances() const { return {eps1, eps2, eps3, eps_nugis, penalty}; }
};

struct SlackRecord {
  std::map<int, double> tau_b;  // per excluded cell
  double tau_int = 0.0;
  double tau_nugis = 0.0;
  double tau_bis = 0.0;
  std::map<int, double> tau_uc;  // per unclassified cell

  double blocking_sum() const;
};

// Self-contained, replayable by the independent checker.
struct InvariantSetCertificate {
  Partition partition;
  BarrierFunction barrier;
  VertexCategorization categories;  // the categorization its LP bound against
  SlackRecord slacks;
  IiseTolerances tolerances;
  bool certified = false;
};

// Splits every cell crossed by {h = 0} by its local hyperplane; children
// inherit barrier coefficients, so every resulting cell carries h of a
// single sign (within tolerance) at its vertices.
std::pair<Partition, BarrierFunction> refine_boundary(const Partition& p, const BarrierFunction& h);

// Categorization of a certified barrier on a boundary-aligned partition.
VertexCategorization categorize(const Partition& refined, const BarrierFunction& h,
                                double eps_nugis);

// Iteration-0 categorization: exclusion from the outward-flow test on
// domain-boundary vertices, everything else unclassified.
VertexCategorization categorize_seed(const Partition& p);

// Splits every cell whose flow changes sign against a domain facet it
// touches, so the vertex-wise exclusion test captures the whole outflow
// region: between two non-excluded vertices the (affine) facet flow then
// points inward everywhere.  Idempotent, preserved by later refinement.
Partition align_domain_tangencies(const Partition& p);

struct IiseLp {
  linprog::LpProblem problem;
  std::vector<std::vector<int>> s_vars;  // per cell
  std::vector<int> t_vars;               // per cell
  std::map<int, int> tau_b_vars;
  std::map<int, int> tau_uc_vars;
  int tau_int_var = -1;
  int tau_nugis_var = -1;
  int tau_bis_var = -1;
  int membership_rows = 0;
  int derivative_rows = 0;
  int continuity_rows = 0;
};

// The certification LP.  Membership rows bind on the supplied (previous)
// categorization; derivative rows cover every incidence pair with slope
// alpha0 on interior/nugis/bis pairs and alpha_m on excluded/unclassified.
IiseLp build_iise_lp(const Partition& refined, const VertexCategorization& prev,
                     double alpha0, double alpha_m, const IiseTolerances& tol);

InvariantSetCertificate seed_barrier(const Partition& dynamics, const IiseConfig& cfg);
InvariantSetCertificate iise_step(const InvariantSetCertificate& state, const IiseConfig& cfg);

enum class Termination { NugisExhausted, MaxIterations };

struct IterationStats {
  int cells = 0;
  size_t n_interior = 0, n_nugis = 0, n_bis = 0, n_excluded = 0, n_unclassified = 0;
  int lp_solves = 0;
  double wall_ms = 0.0;
};

struct IiseRun {
  std::vector<InvariantSetCertificate> certificates;  // seed first
  Termination termination = Termination::MaxIterations;
  std::vector<IterationStats> stats;
};

IiseRun run_iise(const Partition& dynamics, const IiseConfig& cfg);

// Diagnostic for the no-sliding assumption: vertices where the flows of two
// facet-sharing cells point into each other across the facet.
std::vector<int> sliding_mode_flags(const Partition& p);

}  // namespace pwacert::iise
