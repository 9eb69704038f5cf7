#include "pwacert/lyapunov.hpp"

#include <algorithm>
#include <limits>

namespace pwacert::lyapunov {

using geometry::kZeroTol;
using linprog::LpProblem;
using linprog::LpSolution;
using linprog::LpStatus;
using linprog::LpTerm;
using linprog::Relation;

namespace {
constexpr double kOriginTol = 1e-9;
}

Partition restrict_partition(const Partition& refined, const BarrierFunction& barrier) {
  std::vector<Cell> kept;
  for (const auto& cell : refined.cells()) {
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& v : cell.region.vertices()) lo = std::min(lo, barrier.value(cell.id, v));
    if (lo >= -kZeroTol) kept.push_back(cell);
  }
  if (kept.empty()) throw EmptyRestriction("no cell lies inside the invariant set");
  return Partition(std::move(kept), refined.domain());
}

LyapunovLp build_lyapunov_lp(const Partition& restricted, double eps1) {
  LyapunovLp out;
  LpProblem& lp = out.problem;
  const int dim = restricted.domain().dim();
  const int ncells = static_cast<int>(restricted.cells().size());
  const Vector origin = Vector::Zero(dim);

  for (const auto& cell : restricted.cells())
    if (cell.region.contains(origin, kOriginTol)) out.origin_cells.push_back(cell.id);
  if (out.origin_cells.empty())
    throw OriginNotCovered("no restricted cell contains the origin");

  out.p_vars.resize(static_cast<size_t>(ncells));
  out.q_vars.assign(static_cast<size_t>(ncells), -1);
  out.tau_vars.resize(static_cast<size_t>(ncells));
  for (int i = 0; i < ncells; ++i) {
    for (int j = 0; j < dim; ++j)
      out.p_vars[static_cast<size_t>(i)].push_back(
          lp.add_variable("p" + std::to_string(i) + "_" + std::to_string(j)));
    const bool at_origin = std::find(out.origin_cells.begin(), out.origin_cells.end(), i) !=
                           out.origin_cells.end();
    if (!at_origin) out.q_vars[static_cast<size_t>(i)] = lp.add_variable("q" + std::to_string(i));
    out.tau_vars[static_cast<size_t>(i)] = lp.add_variable("tau" + std::to_string(i), 0.0);
    lp.add_objective(out.tau_vars[static_cast<size_t>(i)], 1.0);
  }

  auto value_terms = [&](int i, const Vector& v) {
    std::vector<LpTerm> terms;
    for (int j = 0; j < dim; ++j)
      terms.push_back({out.p_vars[static_cast<size_t>(i)][static_cast<size_t>(j)], v(j)});
    if (out.q_vars[static_cast<size_t>(i)] >= 0)
      terms.push_back({out.q_vars[static_cast<size_t>(i)], 1.0});
    return terms;
  };

  // Strict decrease along the flow at every non-origin vertex.
  const auto& pool = restricted.vertex_pool();
  for (const auto& [i, k] : restricted.incidence()) {
    const Vector& v = pool[static_cast<size_t>(k)];
    if (v.lpNorm<Eigen::Infinity>() <= kOriginTol) continue;
    const Vector flow = restricted.cells()[static_cast<size_t>(i)].flow(v);
    std::vector<LpTerm> terms;
    for (int j = 0; j < dim; ++j)
      terms.push_back({out.p_vars[static_cast<size_t>(i)][static_cast<size_t>(j)], flow(j)});
    terms.push_back({out.tau_vars[static_cast<size_t>(i)], -1.0});
    lp.add_constraint(std::move(terms), Relation::LessEq, -eps1);
    ++out.decrease_rows;
  }

  // Continuity at shared vertices.
  for (size_t k = 0; k < pool.size(); ++k) {
    const auto& owners = restricted.cells_at_vertex(static_cast<int>(k));
    for (size_t a = 0; a + 1 < owners.size(); ++a) {
      auto terms = value_terms(owners[a], pool[k]);
      for (auto& t : value_terms(owners[a + 1], pool[k])) terms.push_back({t.var, -t.coeff});
      lp.add_constraint(std::move(terms), Relation::Equal, 0.0);
      ++out.continuity_rows;
    }
  }
  return out;
}

namespace {

struct LyapOutcome {
  LyapunovFunction fn;
  std::vector<double> taus;
  double slack_sum = 0.0;
};

LyapOutcome solve_lyapunov_lp(const Partition& restricted, const LyapunovLp& built) {
  const LpSolution sol = linprog::solve(built.problem);
  if (sol.status != LpStatus::Optimal)
    throw linprog::SolverFailure("Lyapunov LP did not reach optimality");
  LyapOutcome out;
  const int dim = restricted.domain().dim();
  out.fn.partition = restricted;
  out.fn.origin_cells = built.origin_cells;
  out.fn.coeffs.resize(restricted.cells().size());
  out.taus.resize(restricted.cells().size());
  for (size_t i = 0; i < restricted.cells().size(); ++i) {
    Vector p(dim);
    for (int j = 0; j < dim; ++j) p(j) = sol.value(built.p_vars[i][static_cast<size_t>(j)]);
    const double q = built.q_vars[i] >= 0 ? sol.value(built.q_vars[i]) : 0.0;
    out.fn.coeffs[i] = {std::move(p), q};
    out.taus[i] = sol.value(built.tau_vars[i]);
    out.slack_sum += out.taus[i];
  }
  return out;
}

}  // namespace

RoaCertificate run_seroaise(const Partition& dynamics, const IiseConfig& cfg,
                            iise::IiseRun* run_out) {
  const Vector origin = Vector::Zero(dynamics.domain().dim());
  bool origin_seen = false;
  for (const auto& cell : dynamics.cells()) {
    if (!cell.region.contains(origin, kOriginTol)) continue;
    origin_seen = true;
    if (cell.a.lpNorm<Eigen::Infinity>() > 1e-8)
      throw std::invalid_argument("origin is not an equilibrium of its containing cell");
  }
  if (!origin_seen) throw OriginNotCovered("origin lies outside the dynamics partition");

  auto run = iise::run_iise(dynamics, cfg);
  if (run_out != nullptr) *run_out = run;
  const auto& final_cert = run.certificates.back();
  auto [aligned, h2] = iise::refine_boundary(final_cert.partition, final_cert.barrier);
  Partition restricted = restrict_partition(aligned, h2);

  const double floor = cfg.min_diameter_factor * dynamics.domain().diameter();
  double best = std::numeric_limits<double>::infinity();
  int stagnation = 0;
  for (int round = 0; round <= cfg.max_inner_rounds; ++round) {
    auto built = build_lyapunov_lp(restricted, cfg.eps1);
    auto outcome = solve_lyapunov_lp(restricted, built);
    if (outcome.slack_sum <= iise::kCertTol) {
      RoaCertificate cert;
      cert.invariant = final_cert;
      cert.lyapunov = std::move(outcome.fn);
      cert.lyapunov_slack_sum = outcome.slack_sum;
      cert.provenance.config = cfg;
      cert.provenance.iise_iterations = static_cast<int>(run.certificates.size()) - 1;
      cert.provenance.lyapunov_rounds = round + 1;
      cert.provenance.termination = run.termination;
      return cert;
    }
    if (outcome.slack_sum > best * 0.999) {
      if (++stagnation >= cfg.stagnation_rounds)
        throw iise::RefinementStalled("Lyapunov slack stopped improving under refinement");
    } else {
      stagnation = 0;
    }
    best = std::min(best, outcome.slack_sum);

    std::vector<std::pair<int, std::vector<Cell>>> repl;
    for (size_t i = 0; i < outcome.taus.size(); ++i) {
      if (outcome.taus[i] <= iise::kCertTol) continue;
      auto children = geometry::refine_cell(restricted.cells()[i],
                                            {geometry::RefineMode::VectorField, floor});
      repl.push_back({static_cast<int>(i), std::move(children)});
    }
    if (repl.empty())
      throw iise::RefinementStalled("Lyapunov slack active but no refinable cell identified");
    restricted = restricted.replace_cells(repl).partition;
  }
  throw iise::RefinementStalled("Lyapunov refinement exceeded its round budget");
}

}  // namespace pwacert::lyapunov
