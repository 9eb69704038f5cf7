#include "pwacert/certify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace pwacert::certify {

using geometry::kZeroTol;

void ReplayReport::add(const std::string& name, const std::string& location, double margin,
                       double tol) {
  const bool ok = margin >= -tol;
  checks.push_back(CheckEntry{name, location, margin, ok});
  worst_margin = std::min(worst_margin, margin);
  passed = passed && ok;
}

const CheckEntry* ReplayReport::first_failure() const {
  for (const auto& c : checks)
    if (!c.passed) return &c;
  return nullptr;
}

ReplayReport replay_barrier(const InvariantSetCertificate& cert) {
  ReplayReport report;
  const Partition& p = cert.partition;
  const BarrierFunction& h = cert.barrier;
  const auto& pool = p.vertex_pool();
  const auto& tol = cert.tolerances;

  // Continuity across every shared vertex.
  for (size_t k = 0; k < pool.size(); ++k) {
    const auto& owners = p.cells_at_vertex(static_cast<int>(k));
    for (size_t a = 0; a + 1 < owners.size(); ++a) {
      const double diff =
          std::abs(h.value(owners[a], pool[k]) - h.value(owners[a + 1], pool[k]));
      report.add("continuity",
                 "vertex " + std::to_string(k) + " cells " + std::to_string(owners[a]) + "/" +
                     std::to_string(owners[a + 1]),
                 -diff);
    }
  }

  // Barrier inequality with the Leaky-ReLU slope picked by the sign of h.
  const double alpha_m = h.alpha_m();
  for (const auto& [i, k] : p.incidence()) {
    const Vector& v = pool[static_cast<size_t>(k)];
    const double hv = h.value(i, v);
    const double hdot = iise::barrier_derivative(h, p.cells()[static_cast<size_t>(i)], v);
    const double alpha = hv >= 0.0 ? h.alpha0 : alpha_m;
    report.add("barrier-inequality",
               "cell " + std::to_string(i) + " vertex " + std::to_string(k),
               hdot + alpha * hv - tol.eps3);
  }

  // Sign conditions per recorded category.
  auto hval = [&](const std::pair<int, int>& pr) {
    return h.value(pr.first, pool[static_cast<size_t>(pr.second)]);
  };
  auto loc = [](const std::pair<int, int>& pr) {
    return "cell " + std::to_string(pr.first) + " vertex " + std::to_string(pr.second);
  };
  for (const auto& pr : cert.categories.interior)
    report.add("interior-sign", loc(pr), hval(pr) - tol.eps3);
  for (const auto& pr : cert.categories.nugis)
    report.add("nugis-sign", loc(pr), hval(pr) - tol.eps3);
  for (const auto& pr : cert.categories.bis) report.add("bis-sign", loc(pr), hval(pr));
  for (const auto& pr : cert.categories.excluded)
    report.add("excluded-sign", loc(pr), -tol.eps1 - hval(pr));
  return report;
}

ReplayReport check_nagumo_boundary(const InvariantSetCertificate& cert) {
  ReplayReport report;
  // Facets of {h = 0} live on cell boundaries only after alignment.
  auto [aligned, h] = iise::refine_boundary(cert.partition, cert.barrier);
  for (const auto& cell : aligned.cells()) {
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& v : cell.region.vertices()) lo = std::min(lo, h.value(cell.id, v));
    if (lo < -kZeroTol) continue;  // outside cell
    for (const auto& v : cell.region.vertices()) {
      if (std::abs(h.value(cell.id, v)) > kZeroTol) continue;
      const double inward = h.coeffs[static_cast<size_t>(cell.id)].s.dot(cell.flow(v));
      report.add("nagumo",
                 "cell " + std::to_string(cell.id) + " boundary vertex",
                 inward);
    }
  }
  return report;
}

ReplayReport replay_lyapunov(const RoaCertificate& cert) {
  ReplayReport report;
  const auto& fn = cert.lyapunov;
  const Partition& p = fn.partition;
  const auto& pool = p.vertex_pool();
  const Vector origin = Vector::Zero(p.domain().dim());
  const double eps1 = cert.invariant.tolerances.eps1;

  for (int i : fn.origin_cells)
    report.add("lyapunov-origin", "cell " + std::to_string(i), -std::abs(fn.value(i, origin)));

  for (size_t k = 0; k < pool.size(); ++k) {
    const auto& owners = p.cells_at_vertex(static_cast<int>(k));
    for (size_t a = 0; a + 1 < owners.size(); ++a) {
      const double diff =
          std::abs(fn.value(owners[a], pool[k]) - fn.value(owners[a + 1], pool[k]));
      report.add("lyapunov-continuity",
                 "vertex " + std::to_string(k) + " cells " + std::to_string(owners[a]) + "/" +
                     std::to_string(owners[a + 1]),
                 -diff);
    }
  }

  for (const auto& [i, k] : p.incidence()) {
    const Vector& v = pool[static_cast<size_t>(k)];
    if (v.lpNorm<Eigen::Infinity>() <= 1e-9) continue;
    const double vdot = fn.derivative(p.cells()[static_cast<size_t>(i)], v);
    report.add("lyapunov-decrease",
               "cell " + std::to_string(i) + " vertex " + std::to_string(k), -eps1 - vdot);
  }
  return report;
}

namespace {

// Barrier value scaled to geometric units by the local gradient norm.
double normalized_barrier(const InvariantSetCertificate& cert, const Vector& x) {
  const auto ids = geometry::locate(cert.partition, x);
  int cell;
  if (!ids.empty()) {
    cell = ids.front();
  } else {
    cell = 0;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : cert.partition.cells()) {
      const double v = c.region.violation(x);
      if (v < best) {
        best = v;
        cell = c.id;
      }
    }
  }
  const auto& coeff = cert.barrier.coeffs[static_cast<size_t>(cell)];
  const double norm = coeff.s.norm();
  const double hv = coeff.s.dot(x) + coeff.t;
  return norm > 1e-12 ? hv / norm : hv;
}

}  // namespace

TrajectoryResult simulate(const Partition& dynamics, const Vector& x0,
                          const SimulateOptions& opts) {
  TrajectoryResult res;
  res.initial = x0;
  Vector x = x0;
  int hint = -1;
  auto field = [&](const Vector& y) { return geometry::eval_field(dynamics, y, &hint); };
  const int nsteps = static_cast<int>(std::llround(opts.horizon / opts.dt));
  const auto& dom = dynamics.domain();

  for (int step = 0; step < nsteps; ++step) {
    const Vector k1 = field(x);
    const Vector k2 = field(x + 0.5 * opts.dt * k1);
    const Vector k3 = field(x + 0.5 * opts.dt * k2);
    const Vector k4 = field(x + opts.dt * k3);
    x += (opts.dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    res.steps = step + 1;
    const double t = (step + 1) * opts.dt;

    if (dom.violation(x) > kZeroTol) {
      res.left_domain = true;
      if (opts.inside != nullptr) {
        res.exited = true;
        if (!res.exit_time) res.exit_time = t;
      }
      break;
    }
    if (opts.inside != nullptr) {
      const double hn = normalized_barrier(*opts.inside, x);
      res.max_overshoot = std::max(res.max_overshoot, std::max(0.0, -hn));
      if (hn < -opts.overshoot_tol) {
        res.exited = true;
        res.exit_time = t;
        break;
      }
    }
  }
  res.final_distance_to_origin = x.norm();
  return res;
}

InvarianceSummary monte_carlo_invariance(const Partition& dynamics,
                                         const InvariantSetCertificate& cert, int samples,
                                         double horizon, double dt, std::uint64_t seed) {
  InvarianceSummary summary;
  summary.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  const auto& dom = dynamics.domain();
  Vector lo = dom.vertices().front(), hi = dom.vertices().front();
  for (const auto& v : dom.vertices()) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const int dim = dom.dim();

  SimulateOptions opts;
  opts.horizon = horizon;
  opts.dt = dt;
  opts.inside = &cert;

  int drawn = 0;
  long guard = 0;
  while (drawn < samples && guard < 1000L * samples + 10000) {
    ++guard;
    Vector x(dim);
    for (int j = 0; j < dim; ++j) x(j) = lo(j) + uni(rng) * (hi(j) - lo(j));
    if (!dom.contains(x, 0.0)) continue;
    if (iise::barrier_at(cert.barrier, cert.partition, x) < 0.0) continue;
    ++drawn;
    const auto traj = simulate(dynamics, x, opts);
    if (traj.exited) ++summary.exits;
    summary.max_overshoot = std::max(summary.max_overshoot, traj.max_overshoot);
  }
  summary.samples = drawn;
  return summary;
}

double estimate_set_volume(const InvariantSetCertificate& cert, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const auto& dom = cert.partition.domain();
  Vector lo = dom.vertices().front(), hi = dom.vertices().front();
  for (const auto& v : dom.vertices()) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const int dim = dom.dim();
  double box_volume = 1.0;
  for (int j = 0; j < dim; ++j) box_volume *= hi(j) - lo(j);

  int in_set = 0;
  for (int s = 0; s < samples; ++s) {
    Vector x(dim);
    for (int j = 0; j < dim; ++j) x(j) = lo(j) + uni(rng) * (hi(j) - lo(j));
    if (!dom.contains(x, 0.0)) continue;
    if (iise::barrier_at(cert.barrier, cert.partition, x) >= 0.0) ++in_set;
  }
  return box_volume * static_cast<double>(in_set) / static_cast<double>(samples);
}

}  // namespace pwacert::certify
