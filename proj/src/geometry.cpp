#include "pwacert/geometry.hpp"

#include "pwacert/linprog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

namespace pwacert::geometry {

namespace {

constexpr double kRankTol = 1e-9;
constexpr double kFacetTol = 1e-6;  // a vertex lies on a facet below this

bool nearly_same_point(const Vector& a, const Vector& b, double tol) {
  return (a - b).lpNorm<Eigen::Infinity>() <= tol;
}

// Drops exact-duplicate rows (same oriented hyperplane) after normalization.
std::vector<Halfspace> normalize_rows(const std::vector<Halfspace>& rows) {
  std::vector<Halfspace> out;
  for (const auto& h : rows) {
    const double n = h.normal.norm();
    if (n <= kRankTol) continue;  // vacuous or infeasible-constant row
    Halfspace u{h.normal / n, h.offset / n};
    bool dup = false;
    for (const auto& v : out) {
      if ((u.normal - v.normal).lpNorm<Eigen::Infinity>() <= 1e-9 &&
          std::abs(u.offset - v.offset) <= 1e-9) {
        dup = true;
        break;
      }
    }
    if (!dup) out.push_back(std::move(u));
  }
  return out;
}

void push_unique_vertex(std::vector<Vector>& verts, const Vector& v) {
  for (const auto& w : verts)
    if (nearly_same_point(v, w, kMergeTol)) return;
  verts.push_back(v);
}

// All vertices via n-subset hyperplane intersection; caller guarantees a
// bounded region.  Fine at desk scale for n <= 3.
std::vector<Vector> enumerate_combinatorial(const std::vector<Halfspace>& rows, int dim) {
  const int m = static_cast<int>(rows.size());
  std::vector<Vector> verts;
  std::vector<int> idx(static_cast<size_t>(dim));
  std::iota(idx.begin(), idx.end(), 0);
  if (m < dim) return verts;
  while (true) {
    Matrix E(dim, dim);
    Vector rhs(dim);
    for (int r = 0; r < dim; ++r) {
      E.row(r) = rows[static_cast<size_t>(idx[static_cast<size_t>(r)])].normal.transpose();
      rhs(r) = -rows[static_cast<size_t>(idx[static_cast<size_t>(r)])].offset;
    }
    Eigen::FullPivLU<Matrix> lu(E);
    lu.setThreshold(kRankTol);
    if (lu.isInvertible()) {
      Vector x = lu.solve(rhs);
      bool feasible = true;
      for (const auto& h : rows) {
        if (h.value(x) < -kFeasTol) {
          feasible = false;
          break;
        }
      }
      if (feasible) push_unique_vertex(verts, x);
    }
    // next combination
    int k = dim - 1;
    while (k >= 0 && idx[static_cast<size_t>(k)] == m - dim + k) --k;
    if (k < 0) break;
    ++idx[static_cast<size_t>(k)];
    for (int j = k + 1; j < dim; ++j)
      idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
  }
  return verts;
}

// Finds the lexicographically minimal feasible point, which is a vertex.
Vector lexicographic_vertex(const std::vector<Halfspace>& rows, int dim) {
  using namespace linprog;
  std::vector<double> fixed;
  for (int level = 0; level < dim; ++level) {
    LpProblem lp;
    std::vector<int> x(static_cast<size_t>(dim));
    for (int j = 0; j < dim; ++j) x[static_cast<size_t>(j)] = lp.add_variable("x" + std::to_string(j));
    lp.add_objective(x[static_cast<size_t>(level)], 1.0);
    for (const auto& h : rows) {
      std::vector<LpTerm> terms;
      for (int j = 0; j < dim; ++j)
        if (h.normal(j) != 0.0) terms.push_back({x[static_cast<size_t>(j)], h.normal(j)});
      lp.add_constraint(std::move(terms), Relation::GreaterEq, -h.offset);
    }
    for (size_t k = 0; k < fixed.size(); ++k)
      lp.add_constraint({{x[k], 1.0}}, Relation::Equal, fixed[k]);
    LpSolution sol = solve(lp);
    if (sol.status == LpStatus::Infeasible) throw EmptyRegion("no feasible point");
    if (sol.status == LpStatus::Unbounded) throw UnboundedRegion("recession direction detected");
    fixed.push_back(sol.value(x[static_cast<size_t>(level)]));
  }
  Vector v(dim);
  for (int j = 0; j < dim; ++j) v(j) = fixed[static_cast<size_t>(j)];
  return v;
}

// Vertex enumeration by walking the vertex-edge graph.  Handles degenerate
// vertices by considering every invertible n-subset of the active rows.
std::vector<Vector> enumerate_pivoting(const std::vector<Halfspace>& rows, int dim) {
  std::vector<Vector> verts;
  std::vector<Vector> queue;
  queue.push_back(lexicographic_vertex(rows, dim));
  verts.push_back(queue.back());

  while (!queue.empty()) {
    const Vector v = queue.back();
    queue.pop_back();
    std::vector<int> active;
    for (size_t i = 0; i < rows.size(); ++i)
      if (std::abs(rows[i].value(v)) <= 10 * kFeasTol) active.push_back(static_cast<int>(i));
    if (static_cast<int>(active.size()) < dim) continue;  // numeric noise; skip

    std::vector<int> pick(static_cast<size_t>(dim));
    std::iota(pick.begin(), pick.end(), 0);
    const int na = static_cast<int>(active.size());
    while (true) {
      Matrix E(dim, dim);
      for (int r = 0; r < dim; ++r)
        E.row(r) = rows[static_cast<size_t>(active[static_cast<size_t>(pick[static_cast<size_t>(r)])])].normal.transpose();
      Eigen::FullPivLU<Matrix> lu(E);
      lu.setThreshold(kRankTol);
      if (lu.isInvertible()) {
        for (int r = 0; r < dim; ++r) {
          Vector e = Vector::Zero(dim);
          e(r) = 1.0;
          Vector d = lu.solve(e);  // leaves row r, keeps the rest active
          bool ok = true;
          for (int j = 0; j < na; ++j) {
            bool in_pick = false;
            for (int q = 0; q < dim; ++q)
              if (pick[static_cast<size_t>(q)] == j) in_pick = true;
            if (in_pick) continue;
            if (rows[static_cast<size_t>(active[static_cast<size_t>(j)])].normal.dot(d) < -1e-9) {
              ok = false;
              break;
            }
          }
          if (!ok) continue;
          // Shoot the ray against the inactive rows.
          double tmax = std::numeric_limits<double>::infinity();
          for (size_t i = 0; i < rows.size(); ++i) {
            const double slope = rows[i].normal.dot(d);
            if (slope >= -1e-9) continue;
            const double val = rows[i].value(v);
            if (val <= 10 * kFeasTol) continue;  // active row
            tmax = std::min(tmax, val / (-slope));
          }
          if (!std::isfinite(tmax)) throw UnboundedRegion("unbounded edge during pivoting");
          if (tmax <= 1e-9) continue;
          Vector w = v + tmax * d;
          bool known = false;
          for (const auto& u : verts)
            if (nearly_same_point(u, w, kMergeTol)) {
              known = true;
              break;
            }
          if (!known) {
            verts.push_back(w);
            queue.push_back(w);
          }
        }
      }
      int k = dim - 1;
      while (k >= 0 && pick[static_cast<size_t>(k)] == na - dim + k) --k;
      if (k < 0) break;
      ++pick[static_cast<size_t>(k)];
      for (int j = k + 1; j < dim; ++j)
        pick[static_cast<size_t>(j)] = pick[static_cast<size_t>(j - 1)] + 1;
    }
  }
  return verts;
}

std::vector<Vector> enumerate_any(const std::vector<Halfspace>& rows, int dim) {
  if (dim <= 3) {
    auto verts = enumerate_combinatorial(rows, dim);
    if (verts.empty()) throw EmptyRegion("no feasible vertex");
    return verts;
  }
  return enumerate_pivoting(rows, dim);
}

void check_bounded_nonempty(const std::vector<Halfspace>& rows, int dim) {
  using namespace linprog;
  if (rows.empty()) throw UnboundedRegion("no halfspaces");

  Matrix E(static_cast<long>(rows.size()), dim);
  for (size_t i = 0; i < rows.size(); ++i) E.row(static_cast<long>(i)) = rows[i].normal.transpose();

  {  // feasibility
    LpProblem lp;
    std::vector<int> x(static_cast<size_t>(dim));
    for (int j = 0; j < dim; ++j) x[static_cast<size_t>(j)] = lp.add_variable("x" + std::to_string(j));
    for (const auto& h : rows) {
      std::vector<LpTerm> terms;
      for (int j = 0; j < dim; ++j)
        if (h.normal(j) != 0.0) terms.push_back({x[static_cast<size_t>(j)], h.normal(j)});
      lp.add_constraint(std::move(terms), Relation::GreaterEq, -h.offset);
    }
    if (solve(lp).status == LpStatus::Infeasible) throw EmptyRegion("halfspace intersection is empty");
  }

  Eigen::ColPivHouseholderQR<Matrix> qr(E);
  qr.setThreshold(kRankTol);
  if (qr.rank() < dim) throw UnboundedRegion("normals do not span the space");

  // Recession cone check: max sum(E d) over E d >= 0, |d|_inf <= 1 is zero
  // exactly when the cone is trivial.
  LpProblem lp;
  std::vector<int> d(static_cast<size_t>(dim));
  for (int j = 0; j < dim; ++j) d[static_cast<size_t>(j)] = lp.add_variable("d" + std::to_string(j), -1.0);
  Vector colsum = E.colwise().sum();
  for (int j = 0; j < dim; ++j) {
    lp.add_objective(d[static_cast<size_t>(j)], -colsum(j));  // maximize sum(E d)
    lp.add_constraint({{d[static_cast<size_t>(j)], 1.0}}, linprog::Relation::LessEq, 1.0);
  }
  for (const auto& h : rows) {
    std::vector<LpTerm> terms;
    for (int j = 0; j < dim; ++j)
      if (h.normal(j) != 0.0) terms.push_back({d[static_cast<size_t>(j)], h.normal(j)});
    lp.add_constraint(std::move(terms), Relation::GreaterEq, 0.0);
  }
  LpSolution sol = solve(lp);
  if (sol.status != LpStatus::Optimal || -sol.objective_value > 1e-7)
    throw UnboundedRegion("recession direction detected");
}

}  // namespace

Halfspace Halfspace::normalized() const {
  const double n = normal.norm();
  if (n <= kRankTol) return *this;
  return Halfspace{normal / n, offset / n};
}

std::vector<Vector> enumerate_vertices(const std::vector<Halfspace>& halfspaces) {
  if (halfspaces.empty()) throw UnboundedRegion("no halfspaces");
  const int dim = static_cast<int>(halfspaces.front().normal.size());
  auto rows = normalize_rows(halfspaces);
  check_bounded_nonempty(rows, dim);
  auto verts = enumerate_any(rows, dim);
  if (verts.empty()) throw EmptyRegion("no feasible vertex");
  return verts;
}

Polytope Polytope::from_halfspaces(std::vector<Halfspace> halfspaces) {
  Polytope p;
  p.vertices_ = enumerate_vertices(halfspaces);
  p.halfspaces_ = normalize_rows(halfspaces);
  p.dim_ = static_cast<int>(p.vertices_.front().size());
  // Drop rows that are slack at every vertex; they cannot support a facet.
  std::vector<Halfspace> kept;
  for (const auto& h : p.halfspaces_) {
    double closest = std::numeric_limits<double>::infinity();
    for (const auto& v : p.vertices_) closest = std::min(closest, h.value(v));
    if (closest <= kFacetTol) kept.push_back(h);
  }
  p.halfspaces_ = std::move(kept);
  return p;
}

Polytope Polytope::from_halfspaces_unchecked(std::vector<Halfspace> halfspaces) {
  Polytope p;
  if (halfspaces.empty()) throw EmptyRegion("no halfspaces");
  const int dim = static_cast<int>(halfspaces.front().normal.size());
  auto rows = normalize_rows(halfspaces);
  p.vertices_ = enumerate_any(rows, dim);
  if (p.vertices_.empty()) throw EmptyRegion("no feasible vertex");
  p.dim_ = dim;
  std::vector<Halfspace> kept;
  for (const auto& h : rows) {
    double closest = std::numeric_limits<double>::infinity();
    for (const auto& v : p.vertices_) closest = std::min(closest, h.value(v));
    if (closest <= kFacetTol) kept.push_back(h);
  }
  p.halfspaces_ = std::move(kept);
  return p;
}

Polytope Polytope::from_data(std::vector<Halfspace> halfspaces, std::vector<Vector> vertices) {
  if (vertices.empty()) throw EmptyRegion("no vertices");
  Polytope p;
  p.halfspaces_ = std::move(halfspaces);
  p.vertices_ = std::move(vertices);
  p.dim_ = static_cast<int>(p.vertices_.front().size());
  return p;
}

Polytope Polytope::box(const Vector& lower, const Vector& upper) {
  const int dim = static_cast<int>(lower.size());
  Polytope p;
  p.dim_ = dim;
  for (int j = 0; j < dim; ++j) {
    Vector e = Vector::Zero(dim);
    e(j) = 1.0;
    p.halfspaces_.push_back(Halfspace{e, -lower(j)});
    p.halfspaces_.push_back(Halfspace{-e, upper(j)});
  }
  const int corners = 1 << dim;
  for (int mask = 0; mask < corners; ++mask) {
    Vector v(dim);
    for (int j = 0; j < dim; ++j) v(j) = (mask >> j) & 1 ? upper(j) : lower(j);
    p.vertices_.push_back(std::move(v));
  }
  return p;
}

bool Polytope::contains(const Vector& x, double tol) const {
  for (const auto& h : halfspaces_)
    if (h.value(x) < -tol) return false;
  return true;
}

double Polytope::violation(const Vector& x) const {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& h : halfspaces_) worst = std::max(worst, -h.value(x));
  return worst;
}

double Polytope::diameter() const {
  double best = 0.0;
  for (size_t i = 0; i < vertices_.size(); ++i)
    for (size_t j = i + 1; j < vertices_.size(); ++j)
      best = std::max(best, (vertices_[i] - vertices_[j]).norm());
  return best;
}

Vector Polytope::vertex_centroid() const {
  Vector c = Vector::Zero(dim_);
  for (const auto& v : vertices_) c += v;
  return c / static_cast<double>(vertices_.size());
}

std::pair<Vector, double> Polytope::chebyshev_center() const {
  using namespace linprog;
  LpProblem lp;
  std::vector<int> x(static_cast<size_t>(dim_));
  for (int j = 0; j < dim_; ++j) x[static_cast<size_t>(j)] = lp.add_variable("x" + std::to_string(j));
  const int r = lp.add_variable("r", 0.0);
  lp.add_objective(r, -1.0);  // maximize the inscribed radius
  for (const auto& h : halfspaces_) {
    std::vector<LpTerm> terms;
    for (int j = 0; j < dim_; ++j)
      if (h.normal(j) != 0.0) terms.push_back({x[static_cast<size_t>(j)], h.normal(j)});
    terms.push_back({r, -1.0});
    lp.add_constraint(std::move(terms), Relation::GreaterEq, -h.offset);
  }
  LpSolution sol = solve(lp);
  if (sol.status != LpStatus::Optimal) throw EmptyRegion("chebyshev center LP not optimal");
  Vector c(dim_);
  for (int j = 0; j < dim_; ++j) c(j) = sol.value(x[static_cast<size_t>(j)]);
  return {c, sol.value(r)};
}

void validate_polytope(const Polytope& p, unsigned seed) {
  if (p.vertices().empty()) throw std::runtime_error("polytope has no vertices");
  const int dim = p.dim();
  for (const auto& v : p.vertices()) {
    if (p.violation(v) > kFeasTol) throw std::runtime_error("vertex violates a halfspace");
    int active = 0;
    for (const auto& h : p.halfspaces())
      if (std::abs(h.value(v)) <= kFacetTol) ++active;
    if (active < dim) throw std::runtime_error("vertex lies on fewer than dim facets");
  }
  // Hull points obey the halfspaces.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const int k = static_cast<int>(p.vertices().size());
  for (int s = 0; s < 64; ++s) {
    std::vector<double> w(static_cast<size_t>(k));
    double total = 0.0;
    for (auto& wi : w) {
      wi = uni(rng);
      total += wi;
    }
    Vector x = Vector::Zero(dim);
    for (int i = 0; i < k; ++i) x += (w[static_cast<size_t>(i)] / total) * p.vertices()[static_cast<size_t>(i)];
    if (p.violation(x) > kFeasTol) throw std::runtime_error("hull point escapes halfspaces");
  }
  // Intersection points lie in the hull (membership solved as a tiny LP).
  Vector lo = p.vertices().front(), hi = p.vertices().front();
  for (const auto& v : p.vertices()) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  int checked = 0;
  for (int s = 0; s < 512 && checked < 24; ++s) {
    Vector x(dim);
    for (int j = 0; j < dim; ++j) x(j) = lo(j) + uni(rng) * (hi(j) - lo(j));
    if (!p.contains(x, 0.0)) continue;
    ++checked;
    using namespace linprog;
    LpProblem lp;
    std::vector<int> lam(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) lam[static_cast<size_t>(i)] = lp.add_variable("l" + std::to_string(i), 0.0);
    for (int j = 0; j < dim; ++j) {
      std::vector<LpTerm> terms;
      for (int i = 0; i < k; ++i) terms.push_back({lam[static_cast<size_t>(i)], p.vertices()[static_cast<size_t>(i)](j)});
      lp.add_constraint(std::move(terms), Relation::Equal, x(j));
    }
    std::vector<LpTerm> sum;
    for (int i = 0; i < k; ++i) sum.push_back({lam[static_cast<size_t>(i)], 1.0});
    lp.add_constraint(std::move(sum), Relation::Equal, 1.0);
    if (solve(lp).status != LpStatus::Optimal)
      throw std::runtime_error("intersection point is outside the vertex hull");
  }
}

SplitResult split_by_hyperplane(const Cell& cell, const Vector& normal, double offset) {
  SplitResult res;
  const double norm = normal.norm();
  if (norm <= kRankTol) return res;
  const Halfspace above{normal / norm, offset / norm};

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& v : cell.region.vertices()) {
    const double val = above.value(v);
    lo = std::min(lo, val);
    hi = std::max(hi, val);
  }
  if (lo >= -kFeasTol || hi <= kFeasTol) return res;  // no interior cut (grazing included)

  auto make_child = [&](const Halfspace& extra) -> Polytope {
    auto rows = cell.region.halfspaces();
    rows.push_back(extra);
    return Polytope::from_halfspaces_unchecked(std::move(rows));
  };
  Polytope below_region, above_region;
  try {
    below_region = make_child(above.flipped());
    above_region = make_child(above);
  } catch (const EmptyRegion&) {
    return res;  // degenerate cut
  }
  if (static_cast<int>(below_region.vertices().size()) < cell.region.dim() + 1 ||
      static_cast<int>(above_region.vertices().size()) < cell.region.dim() + 1)
    return res;

  res.did_split = true;
  res.parts.push_back(Cell{-1, std::move(below_region), cell.A, cell.a});
  res.parts.push_back(Cell{-1, std::move(above_region), cell.A, cell.a});
  return res;
}

namespace {

// Facet = maximal vertex set active on one supporting row.
struct Facet {
  int row = -1;
  std::vector<int> vertex_ids;  // indices into the cell's vertex list
};

std::vector<Facet> cell_facets(const Polytope& p) {
  std::vector<Facet> facets;
  for (size_t r = 0; r < p.halfspaces().size(); ++r) {
    Facet f;
    f.row = static_cast<int>(r);
    for (size_t i = 0; i < p.vertices().size(); ++i)
      if (std::abs(p.halfspaces()[r].value(p.vertices()[i])) <= kFacetTol)
        f.vertex_ids.push_back(static_cast<int>(i));
    if (static_cast<int>(f.vertex_ids.size()) >= p.dim()) facets.push_back(std::move(f));
  }
  return facets;
}

// Cone from an interior apex over one facet, assembled from the facet's
// ridges.  A ridge is the facet's intersection with another facet.
std::vector<Cell> barycentric_fan(const Cell& cell) {
  const Polytope& p = cell.region;
  const int dim = p.dim();
  const Vector apex = p.vertex_centroid();
  const auto facets = cell_facets(p);
  std::vector<Cell> out;
  for (const auto& f : facets) {
    std::vector<Halfspace> rows;
    rows.push_back(p.halfspaces()[static_cast<size_t>(f.row)]);
    Vector fc = Vector::Zero(dim);
    for (int vi : f.vertex_ids) fc += p.vertices()[static_cast<size_t>(vi)];
    fc /= static_cast<double>(f.vertex_ids.size());
    for (const auto& g : facets) {
      if (g.row == f.row) continue;
      std::vector<int> ridge;
      for (int vi : f.vertex_ids)
        if (std::find(g.vertex_ids.begin(), g.vertex_ids.end(), vi) != g.vertex_ids.end())
          ridge.push_back(vi);
      if (static_cast<int>(ridge.size()) < std::max(1, dim - 1)) continue;
      // Hyperplane through the ridge and the apex.
      Matrix span(static_cast<long>(ridge.size()), dim);
      for (size_t i = 0; i < ridge.size(); ++i)
        span.row(static_cast<long>(i)) = (p.vertices()[static_cast<size_t>(ridge[i])] - apex).transpose();
      Eigen::JacobiSVD<Matrix> svd(span, Eigen::ComputeFullV);
      Vector normal = svd.matrixV().col(dim - 1);
      if (normal.norm() <= kRankTol) continue;
      double off = -normal.dot(apex);
      Halfspace h{normal, off};
      const double side = h.value(fc);
      if (std::abs(side) <= kRankTol) continue;  // apex, ridge and facet center collinear
      if (side < 0.0) h = h.flipped();
      rows.push_back(h.normalized());
    }
    if (static_cast<int>(rows.size()) < dim + 1) continue;
    try {
      Polytope cone = Polytope::from_halfspaces_unchecked(rows);
      if (static_cast<int>(cone.vertices().size()) >= dim + 1)
        out.push_back(Cell{-1, std::move(cone), cell.A, cell.a});
    } catch (const EmptyRegion&) {
    }
  }
  return out;
}

// Candidate cut directions: dominant right-singular directions of A, then
// coordinate axes ordered by vertex spread.
std::vector<Vector> cut_directions(const Cell& cell) {
  const int dim = cell.region.dim();
  std::vector<Vector> dirs;
  Eigen::JacobiSVD<Matrix> svd(cell.A, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv.size() > 0 && sv(0) > 1e-12) {
    for (int i = 0; i < sv.size(); ++i)
      if (sv(i) >= sv(0) - 1e-9) dirs.push_back(svd.matrixV().col(i));
  }
  auto spread = [&](const Vector& d) {
    double mn = std::numeric_limits<double>::infinity(), mx = -mn;
    for (const auto& v : cell.region.vertices()) {
      const double t = d.dot(v);
      mn = std::min(mn, t);
      mx = std::max(mx, t);
    }
    return mx - mn;
  };
  if (dirs.size() > 1)
    std::stable_sort(dirs.begin(), dirs.end(),
                     [&](const Vector& a, const Vector& b) { return spread(a) > spread(b) + 1e-9; });
  std::vector<int> axes(static_cast<size_t>(dim));
  std::iota(axes.begin(), axes.end(), 0);
  std::stable_sort(axes.begin(), axes.end(), [&](int i, int j) {
    Vector ei = Vector::Zero(dim), ej = Vector::Zero(dim);
    ei(i) = 1.0;
    ej(j) = 1.0;
    return spread(ei) > spread(ej) + 1e-9;
  });
  for (int j : axes) {
    Vector e = Vector::Zero(dim);
    e(j) = 1.0;
    dirs.push_back(e);
  }
  return dirs;
}

}  // namespace

std::vector<Cell> refine_cell(const Cell& cell, const RefineOptions& opts) {
  if (cell.region.diameter() < opts.min_diameter)
    throw TooSmallCell("cell diameter below the refinement floor");

  if (opts.mode == RefineMode::Barycentric) {
    auto fan = barycentric_fan(cell);
    if (fan.size() >= 2) return fan;
    throw std::runtime_error("barycentric fan failed to produce children");
  }

  if (opts.mode == RefineMode::LongestEdge) {
    const Polytope& p = cell.region;
    const int dim = p.dim();
    const auto facets = cell_facets(p);
    // Longest edge: adjacent vertex pair sharing dim-1 facets.
    double best = -1.0;
    Vector u, w;
    const auto& verts = p.vertices();
    for (size_t i = 0; i < verts.size(); ++i) {
      for (size_t j = i + 1; j < verts.size(); ++j) {
        int shared = 0;
        for (const auto& f : facets) {
          const bool has_i = std::find(f.vertex_ids.begin(), f.vertex_ids.end(), static_cast<int>(i)) != f.vertex_ids.end();
          const bool has_j = std::find(f.vertex_ids.begin(), f.vertex_ids.end(), static_cast<int>(j)) != f.vertex_ids.end();
          if (has_i && has_j) ++shared;
        }
        if (shared < dim - 1) continue;
        const double len = (verts[i] - verts[j]).norm();
        if (len > best) {
          best = len;
          u = verts[i];
          w = verts[j];
        }
      }
    }
    if (best > 0.0) {
      const Vector mid = 0.5 * (u + w);
      Vector normal;
      if (dim == 2) {
        // Median cut: through the midpoint and the vertex farthest from the edge.
        Vector dir = (w - u).normalized();
        Vector perp(2);
        perp << -dir(1), dir(0);
        double far_d = -1.0;
        Vector far = mid;
        for (const auto& v : verts) {
          const double d = std::abs(perp.dot(v - u));
          if (d > far_d) {
            far_d = d;
            far = v;
          }
        }
        Vector median = far - mid;
        if (median.norm() > kRankTol) {
          normal = Vector(2);
          normal << -median(1), median(0);
          normal.normalize();
        } else {
          normal = dir;
        }
      } else {
        normal = (w - u).normalized();
      }
      auto split = split_by_hyperplane(cell, normal, -normal.dot(mid));
      if (split.did_split) return split.parts;
    }
    auto fan = barycentric_fan(cell);
    if (fan.size() >= 2) return fan;
    throw std::runtime_error("longest-edge refinement failed to produce children");
  }

  // Vector-field mode: cut through the Chebyshev center orthogonal to the
  // direction in which the affine field varies fastest.
  const auto [center, radius] = cell.region.chebyshev_center();
  (void)radius;
  for (const auto& d : cut_directions(cell)) {
    auto split = split_by_hyperplane(cell, d, -d.dot(center));
    if (split.did_split) return split.parts;
  }
  auto fan = barycentric_fan(cell);
  if (fan.size() >= 2) return fan;
  throw std::runtime_error("refinement failed to produce children");
}

Partition::Partition(std::vector<Cell> cells, Polytope domain)
    : cells_(std::move(cells)), domain_(std::move(domain)) {
  for (size_t i = 0; i < cells_.size(); ++i) cells_[i].id = static_cast<int>(i);
  index_vertices();
}

void Partition::index_vertices() {
  incidence_.clear();
  cell_vertex_ids_.assign(cells_.size(), {});
  for (size_t i = 0; i < cells_.size(); ++i) {
    for (const auto& v : cells_[i].region.vertices()) {
      int id = -1;
      for (size_t k = 0; k < pool_.size(); ++k) {
        if (nearly_same_point(pool_[k], v, kMergeTol)) {
          id = static_cast<int>(k);
          break;
        }
      }
      if (id < 0) {
        id = static_cast<int>(pool_.size());
        pool_.push_back(v);
      }
      cell_vertex_ids_[i].push_back(id);
      incidence_.emplace_back(static_cast<int>(i), id);
    }
  }
  std::sort(incidence_.begin(), incidence_.end());
  incidence_.erase(std::unique(incidence_.begin(), incidence_.end()), incidence_.end());
  vertex_cells_.assign(pool_.size(), {});
  for (const auto& [c, vtx] : incidence_) vertex_cells_[static_cast<size_t>(vtx)].push_back(c);
}

PartitionEdit Partition::replace_cells(
    const std::vector<std::pair<int, std::vector<Cell>>>& replacements) const {
  std::vector<std::vector<Cell>> repl(cells_.size());
  std::vector<bool> replaced(cells_.size(), false);
  for (const auto& [id, children] : replacements) {
    replaced.at(static_cast<size_t>(id)) = true;
    repl.at(static_cast<size_t>(id)) = children;
  }
  PartitionEdit edit;
  edit.cell_map.assign(cells_.size(), {});
  std::vector<Cell> next;
  for (size_t i = 0; i < cells_.size(); ++i) {
    if (!replaced[i]) {
      edit.cell_map[i].push_back(static_cast<int>(next.size()));
      next.push_back(cells_[i]);
    } else {
      for (const auto& child : repl[i]) {
        edit.cell_map[i].push_back(static_cast<int>(next.size()));
        next.push_back(child);
      }
    }
  }
  edit.partition.cells_ = std::move(next);
  edit.partition.domain_ = domain_;
  edit.partition.pool_ = pool_;  // keep ids stable, new vertices appended
  for (size_t i = 0; i < edit.partition.cells_.size(); ++i)
    edit.partition.cells_[i].id = static_cast<int>(i);
  edit.partition.index_vertices();
  return edit;
}

std::vector<int> locate(const Partition& partition, const Vector& x) {
  std::vector<int> out;
  for (const auto& c : partition.cells())
    if (c.region.contains(x, kFeasTol)) out.push_back(c.id);
  return out;
}

Vector eval_field(const Partition& partition, const Vector& x, int* cell_hint) {
  if (cell_hint != nullptr && *cell_hint >= 0 &&
      *cell_hint < static_cast<int>(partition.cells().size())) {
    const Cell& c = partition.cells()[static_cast<size_t>(*cell_hint)];
    if (c.region.contains(x, kFeasTol)) return c.flow(x);
  }
  int best = -1;
  double best_violation = std::numeric_limits<double>::infinity();
  for (const auto& c : partition.cells()) {
    const double v = c.region.violation(x);
    if (v <= kFeasTol) {
      if (cell_hint != nullptr) *cell_hint = c.id;
      return c.flow(x);
    }
    if (v < best_violation) {
      best_violation = v;
      best = c.id;
    }
  }
  // Slightly outside every cell: continuous extension from the nearest one.
  const Cell& c = partition.cells()[static_cast<size_t>(best)];
  if (cell_hint != nullptr) *cell_hint = c.id;
  return c.flow(x);
}

double continuity_defect(const Partition& partition) {
  double worst = 0.0;
  for (size_t vtx = 0; vtx < partition.vertex_pool().size(); ++vtx) {
    const auto& owners = partition.cells_at_vertex(static_cast<int>(vtx));
    if (owners.size() < 2) continue;
    const Vector& v = partition.vertex_pool()[vtx];
    for (size_t a = 0; a < owners.size(); ++a) {
      const Vector fa = partition.cells()[static_cast<size_t>(owners[a])].flow(v);
      for (size_t b = a + 1; b < owners.size(); ++b) {
        const Vector fb = partition.cells()[static_cast<size_t>(owners[b])].flow(v);
        worst = std::max(worst, (fa - fb).lpNorm<Eigen::Infinity>());
      }
    }
  }
  return worst;
}

void validate_partition(const Partition& partition, unsigned seed, int samples) {
  for (const auto& c : partition.cells()) {
    if (c.region.vertices().empty()) throw std::runtime_error("cell without vertices");
    for (const auto& v : c.region.vertices())
      if (c.region.violation(v) > kFeasTol) throw std::runtime_error("cell vertex infeasible");
  }
  if (continuity_defect(partition) > kZeroTol)
    throw std::runtime_error("PWA dynamics discontinuous across shared vertices");

  const auto& dom = partition.domain();
  Vector lo = dom.vertices().front(), hi = dom.vertices().front();
  for (const auto& v : dom.vertices()) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const int dim = dom.dim();
  int tested = 0;
  for (int s = 0; s < samples * 8 && tested < samples; ++s) {
    Vector x(dim);
    for (int j = 0; j < dim; ++j) x(j) = lo(j) + uni(rng) * (hi(j) - lo(j));
    if (!dom.contains(x, -kFeasTol)) continue;
    ++tested;
    int containing = 0;
    int strict = 0;
    for (const auto& c : partition.cells()) {
      const double viol = c.region.violation(x);
      if (viol <= kFeasTol) ++containing;
      if (viol < -kZeroTol) ++strict;
    }
    if (containing == 0) throw std::runtime_error("domain point covered by no cell");
    if (strict > 1) throw std::runtime_error("cell interiors overlap");
  }
}

}  // namespace pwacert::geometry
