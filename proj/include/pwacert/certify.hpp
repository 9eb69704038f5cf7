#pragma once

#include "pwacert/iise.hpp"
#include "pwacert/lyapunov.hpp"

#include <cstdint>
#include <optional>
#include <string>

// Synthesis-blind validation.  Everything here recomputes inequalities from
// raw partitions and coefficients; no LP artifacts enter.  Trajectory
// simulation acts as a physical oracle for forward invariance.

namespace pwacert::certify {

using geometry::Partition;
using geometry::Vector;
using iise::BarrierFunction;
using iise::InvariantSetCertificate;
using lyapunov::RoaCertificate;

constexpr double kReplayTol = 1e-6;
constexpr double kOvershootTol = 1e-3;  // in h-units normalized by |s_i|

struct CheckEntry {
  std::string name;
  std::string location;
  double margin = 0.0;
  bool passed = false;
};

struct ReplayReport {
  std::vector<CheckEntry> checks;
  double worst_margin = std::numeric_limits<double>::infinity();
  bool passed = true;

  void add(const std::string& name, const std::string& location, double margin,
           double tol = kReplayTol);
  const CheckEntry* first_failure() const;
};

// Recomputes continuity, category sign conditions and the barrier
// inequality (Leaky-ReLU slope chosen by the actual sign of h).
ReplayReport replay_barrier(const InvariantSetCertificate& cert);

// Facet-wise inward-flow test on the set boundary: s_i . (A_i v + a_i) at
// every boundary vertex of every inside cell.
ReplayReport check_nagumo_boundary(const InvariantSetCertificate& cert);

// V(0) = 0, continuity, and strict decrease at non-origin vertices.
ReplayReport replay_lyapunov(const RoaCertificate& cert);

struct TrajectoryResult {
  Vector initial;
  bool exited = false;
  std::optional<double> exit_time;
  bool left_domain = false;
  double final_distance_to_origin = 0.0;
  double max_overshoot = 0.0;  // max depth below the query set boundary
  int steps = 0;
};

struct SimulateOptions {
  double horizon = 20.0;
  double dt = 1e-3;
  // Query set: stop (and flag exit) once h drops below -overshoot_tol.
  const InvariantSetCertificate* inside = nullptr;
  double overshoot_tol = kOvershootTol;
};

// Fixed-step RK4 integration of the PWA field; boundary ties resolve to the
// first located cell.
TrajectoryResult simulate(const Partition& dynamics, const Vector& x0, const SimulateOptions& opts);

struct InvarianceSummary {
  int samples = 0;
  int exits = 0;
  double max_overshoot = 0.0;
  std::uint64_t seed = 0;
};

// Uniform rejection sampling of the invariant set, one simulation per point.
InvarianceSummary monte_carlo_invariance(const Partition& dynamics,
                                         const InvariantSetCertificate& cert, int samples,
                                         double horizon, double dt, std::uint64_t seed);

// Monte-Carlo estimate of the volume of {h >= 0} inside the domain box.
double estimate_set_volume(const InvariantSetCertificate& cert, int samples, std::uint64_t seed);

}  // namespace pwacert::certify
