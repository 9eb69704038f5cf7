#include "pwacert/iise.hpp"

#include <algorithm>
#include <limits>

namespace pwacert::iise {

using geometry::kFeasTol;
using geometry::kZeroTol;
using linprog::LpProblem;
using linprog::LpSolution;
using linprog::LpStatus;
using linprog::LpTerm;
using linprog::Relation;

double barrier_value(const BarrierFunction& h, const Partition& p, int cell, const Vector& x) {
  (void)p;
  return h.value(cell, x);
}

double barrier_derivative(const BarrierFunction& h, const Cell& cell, const Vector& x) {
  return h.coeffs.at(static_cast<size_t>(cell.id)).s.dot(cell.flow(x));
}

double barrier_at(const BarrierFunction& h, const Partition& p, const Vector& x) {
  const auto ids = geometry::locate(p, x);
  if (!ids.empty()) return h.value(ids.front(), x);
  int best = 0;
  double best_violation = std::numeric_limits<double>::infinity();
  for (const auto& c : p.cells()) {
    const double v = c.region.violation(x);
    if (v < best_violation) {
      best_violation = v;
      best = c.id;
    }
  }
  return h.value(best, x);
}

double SlackRecord::blocking_sum() const {
  double sum = tau_int + tau_nugis + tau_bis;
  for (const auto& [cell, v] : tau_b) sum += v;
  return sum;
}

bool VertexCategorization::is_disjoint_cover(const Partition& p) const {
  std::set<std::pair<int, int>> all;
  for (const auto* s : {&interior, &nugis, &bis, &excluded, &unclassified})
    for (const auto& pr : *s)
      if (!all.insert(pr).second) return false;  // overlap
  if (all.size() != p.incidence().size()) return false;
  for (const auto& pr : p.incidence())
    if (all.find(pr) == all.end()) return false;
  return true;
}

namespace {

// Outward-flow exclusion test at a domain-boundary vertex: true when some
// domain facet through the vertex has the cell's flow leaving the domain.
// Tangent flow (within classification tolerance) is excluded as well, so
// membership of a boundary vertex certifies strict inflow there.
bool excluded_by_domain_flow(const Partition& p, int cell, const Vector& v) {
  for (const auto& row : p.domain().halfspaces()) {
    if (std::abs(row.value(v)) > kZeroTol) continue;
    if (row.normal.dot(p.cells()[static_cast<size_t>(cell)].flow(v)) < kZeroTol) return true;
  }
  return false;
}

}  // namespace

Partition align_domain_tangencies(const Partition& p) {
  Partition current = p;
  for (int pass = 0; pass < 64; ++pass) {
    std::vector<std::pair<int, std::vector<Cell>>> repl;
    for (const auto& cell : current.cells()) {
      for (const auto& row : current.domain().halfspaces()) {
        // On-facet vertices of this cell.
        std::vector<const Vector*> on_facet;
        for (const auto& v : cell.region.vertices())
          if (std::abs(row.value(v)) <= kZeroTol) on_facet.push_back(&v);
        if (on_facet.size() < 2) continue;
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto* v : on_facet) {
          const double g = row.normal.dot(cell.flow(*v));
          lo = std::min(lo, g);
          hi = std::max(hi, g);
        }
        if (lo >= -kZeroTol || hi <= kZeroTol) continue;
        // Tangency hyperplane E'.(A x + a) = 0 of this cell.
        const Vector normal = cell.A.transpose() * row.normal;
        const double offset = row.normal.dot(cell.a);
        auto split = geometry::split_by_hyperplane(cell, normal, offset);
        if (split.did_split) {
          repl.push_back({cell.id, split.parts});
          break;
        }
      }
    }
    if (repl.empty()) return current;
    current = current.replace_cells(repl).partition;
  }
  return current;
}

VertexCategorization categorize_seed(const Partition& p) {
  VertexCategorization cat;
  for (const auto& [i, k] : p.incidence()) {
    const Vector& v = p.vertex_pool()[static_cast<size_t>(k)];
    if (excluded_by_domain_flow(p, i, v))
      cat.excluded.insert({i, k});
    else
      cat.unclassified.insert({i, k});
  }
  return cat;
}

VertexCategorization categorize(const Partition& refined, const BarrierFunction& h,
                                double eps_nugis) {
  VertexCategorization cat;
  const auto& pool = refined.vertex_pool();

  // Exclusion wins over every other class so the five sets stay disjoint.
  std::set<std::pair<int, int>> excl;
  for (const auto& [i, k] : refined.incidence())
    if (excluded_by_domain_flow(refined, i, pool[static_cast<size_t>(k)])) excl.insert({i, k});

  // Minimum barrier derivative over the boundary pairs of each vertex.
  std::vector<double> min_hdot(pool.size(), std::numeric_limits<double>::infinity());
  for (const auto& [i, k] : refined.incidence()) {
    if (excl.count({i, k})) continue;
    const Vector& v = pool[static_cast<size_t>(k)];
    if (std::abs(h.value(i, v)) > kZeroTol) continue;
    const double hdot = barrier_derivative(h, refined.cells()[static_cast<size_t>(i)], v);
    min_hdot[static_cast<size_t>(k)] = std::min(min_hdot[static_cast<size_t>(k)], hdot);
  }

  for (const auto& [i, k] : refined.incidence()) {
    if (excl.count({i, k})) {
      cat.excluded.insert({i, k});
      continue;
    }
    const Vector& v = pool[static_cast<size_t>(k)];
    const double hv = h.value(i, v);
    if (hv > kZeroTol) {
      cat.interior.insert({i, k});
    } else if (hv >= -kZeroTol) {
      if (min_hdot[static_cast<size_t>(k)] > eps_nugis)
        cat.nugis.insert({i, k});
      else
        cat.bis.insert({i, k});
    } else {
      cat.unclassified.insert({i, k});
    }
  }
  return cat;
}

std::pair<Partition, BarrierFunction> refine_boundary(const Partition& p, const BarrierFunction& h) {
  std::vector<std::pair<int, std::vector<Cell>>> repl;
  for (const auto& cell : p.cells()) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& v : cell.region.vertices()) {
      const double hv = h.value(cell.id, v);
      lo = std::min(lo, hv);
      hi = std::max(hi, hv);
    }
    if (lo >= -kZeroTol || hi <= kZeroTol) continue;
    const auto& c = h.coeffs[static_cast<size_t>(cell.id)];
    auto split = geometry::split_by_hyperplane(cell, c.s, c.t);
    if (split.did_split) repl.push_back({cell.id, split.parts});
  }
  if (repl.empty()) return {p, h};

  auto edit = p.replace_cells(repl);
  BarrierFunction h2;
  h2.alpha0 = h.alpha0;
  h2.gamma = h.gamma;
  h2.iteration = h.iteration;
  h2.coeffs.resize(edit.partition.cells().size());
  for (size_t old_id = 0; old_id < edit.cell_map.size(); ++old_id)
    for (int new_id : edit.cell_map[old_id])
      h2.coeffs[static_cast<size_t>(new_id)] = h.coeffs[old_id];
  return {std::move(edit.partition), std::move(h2)};
}

IiseLp build_iise_lp(const Partition& refined, const VertexCategorization& prev,
                     double alpha0, double alpha_m, const IiseTolerances& tol) {
  IiseLp out;
  LpProblem& lp = out.problem;
  const int dim = refined.domain().dim();
  const int ncells = static_cast<int>(refined.cells().size());

  out.s_vars.resize(static_cast<size_t>(ncells));
  out.t_vars.resize(static_cast<size_t>(ncells));
  for (int i = 0; i < ncells; ++i) {
    for (int j = 0; j < dim; ++j)
      out.s_vars[static_cast<size_t>(i)].push_back(
          lp.add_variable("s" + std::to_string(i) + "_" + std::to_string(j)));
    out.t_vars[static_cast<size_t>(i)] = lp.add_variable("t" + std::to_string(i));
  }

  // Slack variables exist only for populated categories; all carry lower
  // bound zero at the adapter level.
  for (const auto& [i, k] : prev.excluded)
    if (!out.tau_b_vars.count(i)) {
      const int v = lp.add_variable("tau_b" + std::to_string(i), 0.0);
      out.tau_b_vars[i] = v;
      lp.add_objective(v, tol.penalty);
    }
  for (const auto& [i, k] : prev.unclassified)
    if (!out.tau_uc_vars.count(i)) {
      const int v = lp.add_variable("tau_uc" + std::to_string(i), 0.0);
      out.tau_uc_vars[i] = v;
      lp.add_objective(v, 1.0);
    }
  if (!prev.interior.empty()) {
    out.tau_int_var = lp.add_variable("tau_int", 0.0);
    lp.add_objective(out.tau_int_var, tol.penalty);
  }
  if (!prev.nugis.empty()) {
    out.tau_nugis_var = lp.add_variable("tau_nugis", 0.0);
    lp.add_objective(out.tau_nugis_var, tol.penalty);
  }
  if (!prev.bis.empty()) {
    out.tau_bis_var = lp.add_variable("tau_bis", 0.0);
    lp.add_objective(out.tau_bis_var, tol.penalty);
  }

  const auto& pool = refined.vertex_pool();
  auto h_terms = [&](int i, const Vector& v) {
    std::vector<LpTerm> terms;
    for (int j = 0; j < dim; ++j)
      terms.push_back({out.s_vars[static_cast<size_t>(i)][static_cast<size_t>(j)], v(j)});
    terms.push_back({out.t_vars[static_cast<size_t>(i)], 1.0});
    return terms;
  };

  // Membership rows from the previous categorization.
  for (const auto& [i, k] : prev.excluded) {
    auto terms = h_terms(i, pool[static_cast<size_t>(k)]);
    terms.push_back({out.tau_b_vars.at(i), -1.0});
    lp.add_constraint(std::move(terms), Relation::LessEq, -tol.eps1);
    ++out.membership_rows;
  }
  for (const auto& [i, k] : prev.bis) {
    auto terms = h_terms(i, pool[static_cast<size_t>(k)]);
    terms.push_back({out.tau_bis_var, 1.0});
    lp.add_constraint(std::move(terms), Relation::GreaterEq, 0.0);
    ++out.membership_rows;
  }
  for (const auto& [i, k] : prev.interior) {
    auto terms = h_terms(i, pool[static_cast<size_t>(k)]);
    terms.push_back({out.tau_int_var, 1.0});
    lp.add_constraint(std::move(terms), Relation::GreaterEq, tol.eps3);
    ++out.membership_rows;
  }
  for (const auto& [i, k] : prev.nugis) {
    auto terms = h_terms(i, pool[static_cast<size_t>(k)]);
    terms.push_back({out.tau_nugis_var, 1.0});
    lp.add_constraint(std::move(terms), Relation::GreaterEq, tol.eps3);
    ++out.membership_rows;
  }
  for (const auto& [i, k] : prev.unclassified) {
    auto terms = h_terms(i, pool[static_cast<size_t>(k)]);
    terms.push_back({out.tau_uc_vars.at(i), 1.0});
    lp.add_constraint(std::move(terms), Relation::GreaterEq, tol.eps2);
    ++out.membership_rows;
  }

  // Barrier-derivative rows at every incidence pair.  The Leaky-ReLU slope
  // is alpha0 on pairs meant to sit inside or on the boundary of the set,
  // and the decayed alpha_m on excluded/unclassified pairs.
  for (const auto& pr : refined.incidence()) {
    const auto& [i, k] = pr;
    const Vector& v = pool[static_cast<size_t>(k)];
    const double alpha =
        (prev.excluded.count(pr) || prev.unclassified.count(pr)) ? alpha_m : alpha0;
    const Vector flow = refined.cells()[static_cast<size_t>(i)].flow(v);
    std::vector<LpTerm> terms;
    for (int j = 0; j < dim; ++j)
      terms.push_back({out.s_vars[static_cast<size_t>(i)][static_cast<size_t>(j)],
                       flow(j) + alpha * v(j)});
    terms.push_back({out.t_vars[static_cast<size_t>(i)], alpha});
    lp.add_constraint(std::move(terms), Relation::GreaterEq, tol.eps3);
    ++out.derivative_rows;
  }

  // Continuity at shared vertices, chained over the incident cells.
  for (size_t k = 0; k < pool.size(); ++k) {
    const auto& owners = refined.cells_at_vertex(static_cast<int>(k));
    for (size_t a = 0; a + 1 < owners.size(); ++a) {
      const Vector& v = pool[k];
      auto terms = h_terms(owners[a], v);
      for (auto& t : h_terms(owners[a + 1], v)) terms.push_back({t.var, -t.coeff});
      lp.add_constraint(std::move(terms), Relation::Equal, 0.0);
      ++out.continuity_rows;
    }
  }
  return out;
}

namespace {

struct LpOutcome {
  BarrierFunction barrier;
  SlackRecord slacks;
};

LpOutcome solve_iise_lp(const IiseLp& built, const Partition& p, double alpha0, double gamma,
                        int iteration) {
  const LpSolution sol = linprog::solve(built.problem);
  if (sol.status != LpStatus::Optimal)
    throw linprog::SolverFailure("certification LP did not reach optimality");
  LpOutcome out;
  out.barrier.alpha0 = alpha0;
  out.barrier.gamma = gamma;
  out.barrier.iteration = iteration;
  const int dim = p.domain().dim();
  out.barrier.coeffs.resize(p.cells().size());
  for (size_t i = 0; i < p.cells().size(); ++i) {
    Vector s(dim);
    for (int j = 0; j < dim; ++j) s(j) = sol.value(built.s_vars[i][static_cast<size_t>(j)]);
    out.barrier.coeffs[i] = {std::move(s), sol.value(built.t_vars[i])};
  }
  for (const auto& [cell, var] : built.tau_b_vars) out.slacks.tau_b[cell] = sol.value(var);
  for (const auto& [cell, var] : built.tau_uc_vars) out.slacks.tau_uc[cell] = sol.value(var);
  if (built.tau_int_var >= 0) out.slacks.tau_int = sol.value(built.tau_int_var);
  if (built.tau_nugis_var >= 0) out.slacks.tau_nugis = sol.value(built.tau_nugis_var);
  if (built.tau_bis_var >= 0) out.slacks.tau_bis = sol.value(built.tau_bis_var);
  return out;
}

// Cells that must be refined: excluded cells with active tau_b plus the
// cells whose membership rows bind against an active shared slack.
std::vector<int> blocking_cells(const Partition& p, const VertexCategorization& cats,
                                const BarrierFunction& h, const SlackRecord& slacks,
                                const IiseTolerances& tol) {
  std::set<int> targets;
  for (const auto& [cell, v] : slacks.tau_b)
    if (v > kCertTol) targets.insert(cell);
  const auto& pool = p.vertex_pool();
  auto scan = [&](const std::set<std::pair<int, int>>& pairs, double slack, double rhs) {
    if (slack <= kCertTol) return;
    for (const auto& [i, k] : pairs)
      if (h.value(i, pool[static_cast<size_t>(k)]) + slack <= rhs + 1e-7) targets.insert(i);
  };
  scan(cats.interior, slacks.tau_int, tol.eps3);
  scan(cats.nugis, slacks.tau_nugis, tol.eps3);
  scan(cats.bis, slacks.tau_bis, 0.0);
  return {targets.begin(), targets.end()};
}

VertexCategorization transport_categories(const VertexCategorization& cats,
                                          const geometry::PartitionEdit& edit,
                                          const Partition& prev_partition,
                                          const BarrierFunction& prev_barrier) {
  VertexCategorization out;
  const Partition& np = edit.partition;
  auto has_vertex = [&](int cell, int vertex) {
    const auto& ids = np.cell_vertex_ids(cell);
    return std::find(ids.begin(), ids.end(), vertex) != ids.end();
  };
  auto move_set = [&](const std::set<std::pair<int, int>>& src, std::set<std::pair<int, int>>& dst) {
    for (const auto& [i, k] : src)
      for (int ni : edit.cell_map[static_cast<size_t>(i)])
        if (has_vertex(ni, k)) dst.insert({ni, k});
  };
  move_set(cats.interior, out.interior);
  move_set(cats.nugis, out.nugis);
  move_set(cats.bis, out.bis);
  move_set(cats.excluded, out.excluded);
  move_set(cats.unclassified, out.unclassified);

  // Pairs born from the split: unclassified unless they sit on the previous
  // set boundary.
  for (const auto& pr : np.incidence()) {
    if (out.interior.count(pr) || out.nugis.count(pr) || out.bis.count(pr) ||
        out.excluded.count(pr) || out.unclassified.count(pr))
      continue;
    const Vector& v = np.vertex_pool()[static_cast<size_t>(pr.second)];
    const double hv = barrier_at(prev_barrier, prev_partition, v);
    if (std::abs(hv) <= kZeroTol)
      out.bis.insert(pr);
    else
      out.unclassified.insert(pr);
  }
  return out;
}

double max_pair_barrier(const Partition& p, const BarrierFunction& h) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& [i, k] : p.incidence())
    best = std::max(best, h.value(i, p.vertex_pool()[static_cast<size_t>(k)]));
  return best;
}

InvariantSetCertificate step_impl(Partition partition, VertexCategorization cats,
                                  const Partition& prev_partition,
                                  const BarrierFunction& prev_barrier, int next_iteration,
                                  const IiseConfig& cfg, int* lp_solves) {
  const double alpha_next = cfg.alpha0 * std::pow(1.0 - cfg.gamma, next_iteration);
  const double floor = cfg.min_diameter_factor * partition.domain().diameter();
  double best_blocking = std::numeric_limits<double>::infinity();
  int stagnation = 0;

  for (int round = 0; round <= cfg.max_inner_rounds; ++round) {
    auto built = build_iise_lp(partition, cats, cfg.alpha0, alpha_next, cfg.tolerances());
    auto outcome = solve_iise_lp(built, partition, cfg.alpha0, cfg.gamma, next_iteration);
    if (lp_solves != nullptr) ++*lp_solves;
    const double blocking = outcome.slacks.blocking_sum();
    if (blocking <= kCertTol) {
      InvariantSetCertificate cert{std::move(partition), std::move(outcome.barrier),
                                   std::move(cats), std::move(outcome.slacks),
                                   cfg.tolerances(), true};
      return cert;
    }
    if (blocking > best_blocking * 0.999) {
      if (++stagnation >= cfg.stagnation_rounds)
        throw RefinementStalled("certification slack stopped improving in the inner loop");
    } else {
      stagnation = 0;
    }
    best_blocking = std::min(best_blocking, blocking);

    const auto targets =
        blocking_cells(partition, cats, outcome.barrier, outcome.slacks, cfg.tolerances());
    if (targets.empty())
      throw RefinementStalled("blocking slack active but no refinable cell identified");
    std::vector<std::pair<int, std::vector<Cell>>> repl;
    for (int id : targets) {
      auto children = geometry::refine_cell(partition.cells()[static_cast<size_t>(id)],
                                            {geometry::RefineMode::VectorField, floor});
      repl.push_back({id, std::move(children)});
    }
    auto edit = partition.replace_cells(repl);
    cats = transport_categories(cats, edit, prev_partition, prev_barrier);
    partition = std::move(edit.partition);
  }
  throw RefinementStalled("inner certification loop exceeded its round budget");
}

}  // namespace

InvariantSetCertificate seed_barrier(const Partition& dynamics, const IiseConfig& cfg) {
  Partition partition = align_domain_tangencies(dynamics);
  const double floor = cfg.min_diameter_factor * dynamics.domain().diameter();
  double best_blocking = std::numeric_limits<double>::infinity();
  int stagnation = 0;

  for (int round = 0; round <= cfg.max_seed_rounds; ++round) {
    const auto cats = categorize_seed(partition);
    // Linear schedule at iteration 0: both Leaky-ReLU slopes equal alpha0.
    auto built = build_iise_lp(partition, cats, cfg.alpha0, cfg.alpha0, cfg.tolerances());
    auto outcome = solve_iise_lp(built, partition, cfg.alpha0, cfg.gamma, 0);
    const double blocking = outcome.slacks.blocking_sum();
    if (blocking <= kCertTol) {
      if (max_pair_barrier(partition, outcome.barrier) < -kZeroTol)
        throw NoInvariantSet("certified barrier has an empty superlevel set");
      return InvariantSetCertificate{std::move(partition), std::move(outcome.barrier), cats,
                                     std::move(outcome.slacks), cfg.tolerances(), true};
    }
    if (blocking > best_blocking * 0.999) {
      if (++stagnation >= cfg.stagnation_rounds)
        throw NoInvariantSet(
            "exclusion slacks stopped improving under refinement; no invariant set certified");
    } else {
      stagnation = 0;
    }
    best_blocking = std::min(best_blocking, blocking);

    std::vector<int> targets;
    for (const auto& [cell, v] : outcome.slacks.tau_b)
      if (v > kCertTol) targets.push_back(cell);
    if (targets.empty())
      throw RefinementStalled("seed slack active but no refinable cell identified");
    std::vector<std::pair<int, std::vector<Cell>>> repl;
    for (int id : targets) {
      auto children = geometry::refine_cell(partition.cells()[static_cast<size_t>(id)],
                                            {geometry::RefineMode::VectorField, floor});
      repl.push_back({id, std::move(children)});
    }
    partition = partition.replace_cells(repl).partition;
  }
  throw RefinementStalled("seed refinement exceeded its round budget");
}

InvariantSetCertificate iise_step(const InvariantSetCertificate& state, const IiseConfig& cfg) {
  if (!state.certified) throw std::invalid_argument("iise_step requires a certified state");
  auto [aligned, h2] = refine_boundary(state.partition, state.barrier);
  auto cats = categorize(aligned, h2, cfg.eps_nugis);
  return step_impl(aligned, cats, aligned, h2, h2.iteration + 1, cfg, nullptr);
}

IiseRun run_iise(const Partition& dynamics, const IiseConfig& cfg) {
  if (geometry::continuity_defect(dynamics) > kZeroTol)
    throw std::invalid_argument("dynamics are discontinuous across shared vertices");

  IiseRun run;
  run.certificates.push_back(seed_barrier(dynamics, cfg));
  {
    const auto& seed = run.certificates.back();
    IterationStats st;
    st.cells = static_cast<int>(seed.partition.cells().size());
    st.n_excluded = seed.categories.excluded.size();
    st.n_unclassified = seed.categories.unclassified.size();
    run.stats.push_back(st);
  }

  for (int m = 0;; ++m) {
    if (m >= cfg.max_iter) {
      run.termination = Termination::MaxIterations;
      break;
    }
    const auto& current = run.certificates.back();
    auto [aligned, h2] = refine_boundary(current.partition, current.barrier);
    auto cats = categorize(aligned, h2, cfg.eps_nugis);
    if (cats.nugis.empty()) {
      run.termination = Termination::NugisExhausted;
      break;
    }
    int lp_solves = 0;
    auto next = step_impl(aligned, cats, aligned, h2, h2.iteration + 1, cfg, &lp_solves);
    IterationStats st;
    st.cells = static_cast<int>(next.partition.cells().size());
    st.n_interior = next.categories.interior.size();
    st.n_nugis = next.categories.nugis.size();
    st.n_bis = next.categories.bis.size();
    st.n_excluded = next.categories.excluded.size();
    st.n_unclassified = next.categories.unclassified.size();
    st.lp_solves = lp_solves;
    run.stats.push_back(st);
    run.certificates.push_back(std::move(next));
  }
  return run;
}

std::vector<int> sliding_mode_flags(const Partition& p) {
  std::set<int> flagged;
  for (size_t k = 0; k < p.vertex_pool().size(); ++k) {
    const auto& owners = p.cells_at_vertex(static_cast<int>(k));
    if (owners.size() < 2) continue;
    const Vector& v = p.vertex_pool()[k];
    for (size_t a = 0; a < owners.size(); ++a) {
      const Cell& ci = p.cells()[static_cast<size_t>(owners[a])];
      for (size_t b = 0; b < owners.size(); ++b) {
        if (a == b) continue;
        const Cell& cj = p.cells()[static_cast<size_t>(owners[b])];
        for (const auto& ri : ci.region.halfspaces()) {
          if (std::abs(ri.value(v)) > kZeroTol) continue;
          for (const auto& rj : cj.region.halfspaces()) {
            if (std::abs(rj.value(v)) > kZeroTol) continue;
            if ((ri.normal + rj.normal).lpNorm<Eigen::Infinity>() > 1e-6) continue;
            if (std::abs(ri.offset + rj.offset) > 1e-6) continue;
            // Shared facet with inward normal ri.normal for cell i.
            if (ri.normal.dot(ci.flow(v)) < -kZeroTol && ri.normal.dot(cj.flow(v)) > kZeroTol)
              flagged.insert(static_cast<int>(k));
          }
        }
      }
    }
  }
  return {flagged.begin(), flagged.end()};
}

}  // namespace pwacert::iise
