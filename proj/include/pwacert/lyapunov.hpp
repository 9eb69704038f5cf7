#pragma once

#include "pwacert/iise.hpp"

#include <stdexcept>

// Second stage of the pipeline: restrict the boundary-aligned partition to
// the certified invariant set, synthesize a PWA Lyapunov-like function by
// linear programming with refinement on failure, and package the full RoA
// certificate.  The function is Lyapunov-like: V(0) = 0, continuous, and
// strictly decreasing along the flow; positive definiteness is not imposed.

namespace pwacert::lyapunov {

using geometry::Cell;
using geometry::Partition;
using geometry::Vector;
using iise::BarrierFunction;
using iise::IiseConfig;
using iise::InvariantSetCertificate;

struct EmptyRestriction : std::runtime_error {
  explicit EmptyRestriction(const std::string& what) : std::runtime_error(what) {}
};
struct OriginNotCovered : std::runtime_error {
  explicit OriginNotCovered(const std::string& what) : std::runtime_error(what) {}
};

struct LyapunovFunction {
  struct CellCoeff {
    Vector p;
    double q = 0.0;  // forced to zero on origin cells
  };
  Partition partition;  // the restricted partition the coefficients live on
  std::vector<CellCoeff> coeffs;
  std::vector<int> origin_cells;

  double value(int cell, const Vector& x) const {
    const auto& c = coeffs.at(static_cast<size_t>(cell));
    return c.p.dot(x) + c.q;
  }
  double derivative(const Cell& cell, const Vector& x) const {
    return coeffs.at(static_cast<size_t>(cell.id)).p.dot(cell.flow(x));
  }
};

struct RoaProvenance {
  IiseConfig config;
  int iise_iterations = 0;
  int lyapunov_rounds = 0;
  iise::Termination termination = iise::Termination::MaxIterations;
};

struct RoaCertificate {
  InvariantSetCertificate invariant;
  LyapunovFunction lyapunov;
  double lyapunov_slack_sum = 0.0;
  RoaProvenance provenance;
};

// Keeps exactly the cells whose vertices all carry h >= -1e-6, i.e. the
// cells inside the invariant set of a boundary-aligned partition.
Partition restrict_partition(const Partition& refined, const BarrierFunction& barrier);

struct LyapunovLp {
  linprog::LpProblem problem;
  std::vector<std::vector<int>> p_vars;
  std::vector<int> q_vars;  // -1 on origin cells (no constant term)
  std::vector<int> tau_vars;
  std::vector<int> origin_cells;
  int decrease_rows = 0;
  int continuity_rows = 0;
};

LyapunovLp build_lyapunov_lp(const Partition& restricted, double eps1);

// Full pipeline.  When run_out is given it receives the complete invariant
// set iteration history for reporting.
RoaCertificate run_seroaise(const Partition& dynamics, const IiseConfig& cfg,
                            iise::IiseRun* run_out = nullptr);

}  // namespace pwacert::lyapunov
