#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace oracles {

using pwacert::linprog::LpProblem;
using pwacert::linprog::Relation;

SimplexResult reference_simplex(const LpProblem& problem) {
  // Every variable x_j = u_j - w_j with u, w >= 0; lower bounds become rows.
  const int nv = problem.num_variables();
  struct Row {
    std::vector<double> a;  // over 2*nv structural columns
    Relation rel;
    double rhs;
  };
  std::vector<Row> rows;
  for (const auto& c : problem.constraints()) {
    Row r{std::vector<double>(static_cast<size_t>(2 * nv), 0.0), c.rel, c.rhs};
    for (const auto& t : c.terms) {
      r.a[static_cast<size_t>(2 * t.var)] += t.coeff;
      r.a[static_cast<size_t>(2 * t.var + 1)] -= t.coeff;
    }
    rows.push_back(std::move(r));
  }
  for (int v = 0; v < nv; ++v) {
    if (!problem.lower_bounds()[static_cast<size_t>(v)].has_value()) continue;
    Row r{std::vector<double>(static_cast<size_t>(2 * nv), 0.0), Relation::GreaterEq,
          *problem.lower_bounds()[static_cast<size_t>(v)]};
    r.a[static_cast<size_t>(2 * v)] = 1.0;
    r.a[static_cast<size_t>(2 * v + 1)] = -1.0;
    rows.push_back(std::move(r));
  }

  const int m = static_cast<int>(rows.size());
  int n_slack = 0;
  for (const auto& r : rows)
    if (r.rel != Relation::Equal) ++n_slack;
  const int n_struct = 2 * nv;
  const int first_art = n_struct + n_slack;
  const int n_total = first_art + m;

  std::vector<std::vector<double>> T(static_cast<size_t>(m),
                                     std::vector<double>(static_cast<size_t>(n_total), 0.0));
  std::vector<double> b(static_cast<size_t>(m), 0.0);
  std::vector<int> basis(static_cast<size_t>(m), -1);
  int slack_at = n_struct;
  for (int i = 0; i < m; ++i) {
    auto r = rows[static_cast<size_t>(i)];
    if (r.rhs < 0.0) {
      for (auto& x : r.a) x = -x;
      r.rhs = -r.rhs;
      if (r.rel == Relation::LessEq) r.rel = Relation::GreaterEq;
      else if (r.rel == Relation::GreaterEq) r.rel = Relation::LessEq;
    }
    for (int j = 0; j < n_struct; ++j) T[static_cast<size_t>(i)][static_cast<size_t>(j)] = r.a[static_cast<size_t>(j)];
    b[static_cast<size_t>(i)] = r.rhs;
    if (r.rel == Relation::LessEq) {
      T[static_cast<size_t>(i)][static_cast<size_t>(slack_at)] = 1.0;
      basis[static_cast<size_t>(i)] = slack_at++;
    } else if (r.rel == Relation::GreaterEq) {
      T[static_cast<size_t>(i)][static_cast<size_t>(slack_at++)] = -1.0;
    }
    if (basis[static_cast<size_t>(i)] < 0) {
      T[static_cast<size_t>(i)][static_cast<size_t>(first_art + i)] = 1.0;
      basis[static_cast<size_t>(i)] = first_art + i;
    }
  }

  auto pivot = [&](int row, int col) {
    const double p = T[static_cast<size_t>(row)][static_cast<size_t>(col)];
    for (auto& x : T[static_cast<size_t>(row)]) x /= p;
    b[static_cast<size_t>(row)] /= p;
    for (int i = 0; i < m; ++i) {
      if (i == row) continue;
      const double f = T[static_cast<size_t>(i)][static_cast<size_t>(col)];
      if (f == 0.0) continue;
      for (int j = 0; j < n_total; ++j)
        T[static_cast<size_t>(i)][static_cast<size_t>(j)] -= f * T[static_cast<size_t>(row)][static_cast<size_t>(j)];
      b[static_cast<size_t>(i)] -= f * b[static_cast<size_t>(row)];
      if (b[static_cast<size_t>(i)] < 0.0 && b[static_cast<size_t>(i)] > -1e-12) b[static_cast<size_t>(i)] = 0.0;
    }
    basis[static_cast<size_t>(row)] = col;
  };

  // Bland's rule throughout: lowest improving column, lowest basic index on
  // ratio ties.  Returns false on unboundedness.
  auto run = [&](const std::vector<double>& cost, bool allow_art) -> bool {
    for (long iter = 0; iter < 200000; ++iter) {
      std::vector<double> z = cost;
      for (int i = 0; i < m; ++i) {
        const double cb = cost[static_cast<size_t>(basis[static_cast<size_t>(i)])];
        if (cb == 0.0) continue;
        for (int j = 0; j < n_total; ++j)
          z[static_cast<size_t>(j)] -= cb * T[static_cast<size_t>(i)][static_cast<size_t>(j)];
      }
      int enter = -1;
      for (int j = 0; j < n_total; ++j) {
        if (!allow_art && j >= first_art) break;
        if (z[static_cast<size_t>(j)] < -1e-9) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) {
        const double a = T[static_cast<size_t>(i)][static_cast<size_t>(enter)];
        if (a <= 1e-9) continue;
        const double ratio = b[static_cast<size_t>(i)] / a;
        if (ratio < best - 1e-12 ||
            (ratio < best + 1e-12 && leave >= 0 &&
             basis[static_cast<size_t>(i)] < basis[static_cast<size_t>(leave)])) {
          best = ratio;
          leave = i;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
    return true;
  };

  SimplexResult res;
  // Phase 1.
  {
    std::vector<double> c1(static_cast<size_t>(n_total), 0.0);
    for (int j = first_art; j < n_total; ++j) c1[static_cast<size_t>(j)] = 1.0;
    run(c1, true);
    double infeas = 0.0;
    for (int i = 0; i < m; ++i)
      if (basis[static_cast<size_t>(i)] >= first_art) infeas += b[static_cast<size_t>(i)];
    if (infeas > 1e-7) {
      res.status = SimplexResult::Status::Infeasible;
      return res;
    }
    for (int i = 0; i < m; ++i) {
      if (basis[static_cast<size_t>(i)] < first_art) continue;
      for (int j = 0; j < first_art; ++j)
        if (std::abs(T[static_cast<size_t>(i)][static_cast<size_t>(j)]) > 1e-9) {
          pivot(i, j);
          break;
        }
    }
  }
  // Phase 2.
  std::vector<double> c2(static_cast<size_t>(n_total), 0.0);
  for (int v = 0; v < nv; ++v) {
    c2[static_cast<size_t>(2 * v)] += problem.objective()[static_cast<size_t>(v)];
    c2[static_cast<size_t>(2 * v + 1)] -= problem.objective()[static_cast<size_t>(v)];
  }
  if (!run(c2, false)) {
    res.status = SimplexResult::Status::Unbounded;
    return res;
  }
  res.status = SimplexResult::Status::Optimal;
  res.values.assign(static_cast<size_t>(nv), 0.0);
  std::vector<double> col(static_cast<size_t>(n_total), 0.0);
  for (int i = 0; i < m; ++i) {
    if (basis[static_cast<size_t>(i)] >= first_art && b[static_cast<size_t>(i)] > 1e-7) {
      res.status = SimplexResult::Status::Infeasible;
      return res;
    }
    col[static_cast<size_t>(basis[static_cast<size_t>(i)])] = b[static_cast<size_t>(i)];
  }
  for (int v = 0; v < nv; ++v)
    res.values[static_cast<size_t>(v)] =
        col[static_cast<size_t>(2 * v)] - col[static_cast<size_t>(2 * v + 1)];
  res.objective = 0.0;
  for (int v = 0; v < nv; ++v)
    res.objective += problem.objective()[static_cast<size_t>(v)] * res.values[static_cast<size_t>(v)];
  return res;
}

std::vector<Point2> pairwise_intersection_vertices(
    const std::vector<pwacert::geometry::Halfspace>& halfspaces, double tol) {
  std::vector<Point2> out;
  const int m = static_cast<int>(halfspaces.size());
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const double a1 = halfspaces[static_cast<size_t>(i)].normal(0);
      const double b1 = halfspaces[static_cast<size_t>(i)].normal(1);
      const double c1 = -halfspaces[static_cast<size_t>(i)].offset;
      const double a2 = halfspaces[static_cast<size_t>(j)].normal(0);
      const double b2 = halfspaces[static_cast<size_t>(j)].normal(1);
      const double c2 = -halfspaces[static_cast<size_t>(j)].offset;
      const double det = a1 * b2 - a2 * b1;
      if (std::abs(det) < 1e-12) continue;
      const double x = (c1 * b2 - c2 * b1) / det;
      const double y = (a1 * c2 - a2 * c1) / det;
      bool feasible = true;
      for (const auto& h : halfspaces)
        if (h.normal(0) * x + h.normal(1) * y + h.offset < -tol) {
          feasible = false;
          break;
        }
      if (!feasible) continue;
      bool dup = false;
      for (const auto& p : out)
        if (std::abs(p.first - x) <= tol && std::abs(p.second - y) <= tol) {
          dup = true;
          break;
        }
      if (!dup) out.emplace_back(x, y);
    }
  }
  return out;
}

std::vector<Point2> order_ccw(std::vector<Point2> pts) {
  double cx = 0.0, cy = 0.0;
  for (const auto& p : pts) {
    cx += p.first;
    cy += p.second;
  }
  cx /= static_cast<double>(pts.size());
  cy /= static_cast<double>(pts.size());
  std::sort(pts.begin(), pts.end(), [&](const Point2& a, const Point2& b) {
    return std::atan2(a.second - cy, a.first - cx) < std::atan2(b.second - cy, b.first - cx);
  });
  return pts;
}

std::vector<Point2> clip_polygon(const std::vector<Point2>& poly, double nx, double ny,
                                 double offset) {
  std::vector<Point2> out;
  const size_t n = poly.size();
  auto val = [&](const Point2& p) { return nx * p.first + ny * p.second + offset; };
  for (size_t i = 0; i < n; ++i) {
    const Point2& cur = poly[i];
    const Point2& nxt = poly[(i + 1) % n];
    const double vc = val(cur), vn = val(nxt);
    if (vc >= 0.0) out.push_back(cur);
    if ((vc > 0.0 && vn < 0.0) || (vc < 0.0 && vn > 0.0)) {
      const double t = vc / (vc - vn);
      out.emplace_back(cur.first + t * (nxt.first - cur.first),
                       cur.second + t * (nxt.second - cur.second));
    }
  }
  return out;
}

double polygon_area(const std::vector<Point2>& loop) {
  double area = 0.0;
  const size_t n = loop.size();
  for (size_t i = 0; i < n; ++i) {
    const auto& p = loop[i];
    const auto& q = loop[(i + 1) % n];
    area += p.first * q.second - q.first * p.second;
  }
  return 0.5 * area;
}

bool point_in_polygon(const std::vector<Point2>& loop, double x, double y, double tol) {
  const size_t n = loop.size();
  // Boundary proximity counts as inside.
  for (size_t i = 0; i < n; ++i) {
    const auto& p = loop[i];
    const auto& q = loop[(i + 1) % n];
    const double ex = q.first - p.first, ey = q.second - p.second;
    const double len2 = ex * ex + ey * ey;
    if (len2 < 1e-18) continue;
    double t = ((x - p.first) * ex + (y - p.second) * ey) / len2;
    t = std::clamp(t, 0.0, 1.0);
    const double dx = x - (p.first + t * ex), dy = y - (p.second + t * ey);
    if (dx * dx + dy * dy <= tol * tol) return true;
  }
  bool in = false;
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const bool cross = (loop[i].second > y) != (loop[j].second > y);
    if (!cross) continue;
    const double xi = loop[j].first + (loop[i].first - loop[j].first) * (y - loop[j].second) /
                                          (loop[i].second - loop[j].second);
    if (x < xi) in = !in;
  }
  return in;
}

}  // namespace oracles
