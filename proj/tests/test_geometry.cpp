#include "pwacert/geometry.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace pwacert::geometry;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

std::vector<Halfspace> box_rows(double r) {
  return {{vec2(1, 0), r}, {vec2(-1, 0), r}, {vec2(0, 1), r}, {vec2(0, -1), r}};
}

bool has_vertex(const std::vector<Vector>& verts, double x, double y, double tol = 1e-7) {
  for (const auto& v : verts)
    if (std::abs(v(0) - x) <= tol && std::abs(v(1) - y) <= tol) return true;
  return false;
}

// Random bounded 2-D polytope: tangent halfspaces of a circle at random angles.
std::vector<Halfspace> random_polygon_rows(std::mt19937_64& rng, int m) {
  std::uniform_real_distribution<double> angle(0.0, 2 * M_PI);
  std::uniform_real_distribution<double> radius(0.5, 2.0);
  std::vector<Halfspace> rows;
  for (int i = 0; i < m; ++i) {
    const double t = angle(rng);
    rows.push_back({vec2(-std::cos(t), -std::sin(t)), radius(rng)});
  }
  // Box the region so it is guaranteed bounded regardless of the draw.
  for (const auto& h : box_rows(3.0)) rows.push_back(h);
  return rows;
}

Cell unit_box_cell() {
  return Cell{0, Polytope::box(vec2(-1, -1), vec2(1, 1)), -Matrix::Identity(2, 2),
              Vector::Zero(2)};
}

}  // namespace

TEST_CASE("unit box vertices") {
  const auto verts = enumerate_vertices(box_rows(1.0));
  REQUIRE(verts.size() == 4);
  for (double sx : {-1.0, 1.0})
    for (double sy : {-1.0, 1.0}) CHECK(has_vertex(verts, sx, sy));
}

TEST_CASE("single halfspace is unbounded") {
  CHECK_THROWS_AS(enumerate_vertices({{vec2(1, 0), 0.0}}), UnboundedRegion);
}

TEST_CASE("infeasible slab is empty") {
  CHECK_THROWS_AS(enumerate_vertices({{vec2(1, 0), -1.0},
                                      {vec2(-1, 0), 0.0},
                                      {vec2(0, 1), 1.0},
                                      {vec2(0, -1), 1.0}}),
                  EmptyRegion);
}

TEST_CASE("random polygons match the pairwise-intersection oracle") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const auto rows = random_polygon_rows(rng, 6);
    const auto verts = enumerate_vertices(rows);
    const auto expected = oracles::pairwise_intersection_vertices(rows);
    REQUIRE(verts.size() == expected.size());
    for (const auto& [x, y] : expected) CHECK(has_vertex(verts, x, y, 1e-6));
  }
}

TEST_CASE("round-trip: vertices from a polytope's own halfspaces") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = Polytope::from_halfspaces(random_polygon_rows(rng, 5));
    const auto again = enumerate_vertices(p.halfspaces());
    REQUIRE(again.size() == p.vertices().size());
    for (const auto& v : p.vertices()) CHECK(has_vertex(again, v(0), v(1), 1e-6));
  }
}

TEST_CASE("3-D cube and simplex enumerate correctly") {
  Vector lo(3), hi(3);
  lo << -1, -1, -1;
  hi << 1, 1, 1;
  const auto cube = Polytope::from_halfspaces(Polytope::box(lo, hi).halfspaces());
  CHECK(cube.vertices().size() == 8);

  // Simplex x,y,z >= 0, x+y+z <= 1.
  Vector e1 = Vector::Zero(3), e2 = Vector::Zero(3), e3 = Vector::Zero(3), ones(3);
  e1(0) = 1;
  e2(1) = 1;
  e3(2) = 1;
  ones << -1, -1, -1;
  const auto simplex = Polytope::from_halfspaces(
      {{e1, 0.0}, {e2, 0.0}, {e3, 0.0}, {ones, 1.0}});
  CHECK(simplex.vertices().size() == 4);
}

TEST_CASE("4-D box uses the pivoting path") {
  Vector lo(4), hi(4);
  lo << -1, -0.5, -2, -1;
  hi << 1, 0.5, 0.5, 2;
  const auto p = Polytope::from_halfspaces(Polytope::box(lo, hi).halfspaces());
  CHECK(p.vertices().size() == 16);
  validate_polytope(p, 99);

  // Sliced corner keeps the enumeration honest off the pure box case.
  auto rows = Polytope::box(lo, hi).halfspaces();
  Vector diag(4);
  diag << -1, -1, -1, -1;
  rows.push_back({diag, 1.5});
  const auto sliced = Polytope::from_halfspaces(rows);
  CHECK(sliced.vertices().size() > 16);
  validate_polytope(sliced, 100);
}

TEST_CASE("polytope invariants hold on random polygons") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 10; ++trial)
    validate_polytope(Polytope::from_halfspaces(random_polygon_rows(rng, 6)), trial);
}

TEST_CASE("chebyshev center of the unit box") {
  const auto p = Polytope::box(vec2(-1, -1), vec2(1, 1));
  const auto [center, radius] = p.chebyshev_center();
  CHECK(center.lpNorm<Eigen::Infinity>() <= 1e-9);
  CHECK(radius == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("split of the unit box at x1 = 0") {
  const auto cell = unit_box_cell();
  const auto res = split_by_hyperplane(cell, vec2(1, 0), 0.0);
  REQUIRE(res.did_split);
  REQUIRE(res.parts.size() == 2);
  for (const auto& part : res.parts) {
    CHECK(part.region.vertices().size() == 4);
    CHECK((part.A - cell.A).norm() == 0.0);
    CHECK((part.a - cell.a).norm() == 0.0);
  }
  CHECK(has_vertex(res.parts[0].region.vertices(), 0, 1));
  CHECK(has_vertex(res.parts[0].region.vertices(), 0, -1));
  CHECK(has_vertex(res.parts[1].region.vertices(), 0, 1));
  CHECK(has_vertex(res.parts[1].region.vertices(), 0, -1));
}

TEST_CASE("disjoint hyperplane leaves the cell unchanged") {
  const auto res = split_by_hyperplane(unit_box_cell(), vec2(1, 0), -5.0);
  CHECK_FALSE(res.did_split);
}

TEST_CASE("grazing hyperplane counts as no-cut") {
  const auto res = split_by_hyperplane(unit_box_cell(), vec2(1, 0), -1.0);
  CHECK_FALSE(res.did_split);
}

TEST_CASE("random triangle splits match the edge-clipping oracle") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  int performed = 0;
  for (int trial = 0; trial < 60; ++trial) {
    // Random triangle from three points (skip slivers).
    oracles::Point2 a{uni(rng), uni(rng)}, b{uni(rng), uni(rng)}, c{uni(rng), uni(rng)};
    const double area2 = (b.first - a.first) * (c.second - a.second) -
                         (c.first - a.first) * (b.second - a.second);
    if (std::abs(area2) < 0.3) continue;
    auto tri = oracles::order_ccw({a, b, c});
    std::vector<Halfspace> rows;
    for (size_t i = 0; i < 3; ++i) {
      const auto& p = tri[i];
      const auto& q = tri[(i + 1) % 3];
      // Inward normal of CCW edge (p, q).
      Vector n = vec2(-(q.second - p.second), q.first - p.first);
      n = -n;  // CCW edges have outward (-dy, dx)? fix by orienting at the centroid
      const double cx = (tri[0].first + tri[1].first + tri[2].first) / 3.0;
      const double cy = (tri[0].second + tri[1].second + tri[2].second) / 3.0;
      double off = -(n(0) * p.first + n(1) * p.second);
      if (n(0) * cx + n(1) * cy + off < 0) {
        n = -n;
        off = -off;
      }
      rows.push_back({n, off});
    }
    Cell cell{0, Polytope::from_halfspaces(rows), Matrix::Zero(2, 2), Vector::Zero(2)};

    const double theta = uni(rng) * M_PI;
    const Vector normal = vec2(std::cos(theta), std::sin(theta));
    const double cx = (tri[0].first + tri[1].first + tri[2].first) / 3.0;
    const double cy = (tri[0].second + tri[1].second + tri[2].second) / 3.0;
    const double offset = -(normal(0) * cx + normal(1) * cy) + 0.1 * uni(rng);

    const auto res = split_by_hyperplane(cell, normal, offset);
    std::vector<oracles::Point2> poly;
    for (const auto& v : cell.region.vertices()) poly.emplace_back(v(0), v(1));
    poly = oracles::order_ccw(poly);
    const auto above = oracles::clip_polygon(poly, normal(0), normal(1), offset);
    const auto below = oracles::clip_polygon(poly, -normal(0), -normal(1), -offset);
    if (!res.did_split) continue;
    ++performed;
    REQUIRE(res.parts.size() == 2);
    CHECK(res.parts[0].region.vertices().size() == below.size());
    CHECK(res.parts[1].region.vertices().size() == above.size());
    for (const auto& [x, y] : below)
      CHECK(has_vertex(res.parts[0].region.vertices(), x, y, 1e-6));
    for (const auto& [x, y] : above)
      CHECK(has_vertex(res.parts[1].region.vertices(), x, y, 1e-6));
  }
  CHECK(performed >= 20);
}

TEST_CASE("split conserves volume (Monte-Carlo)") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const auto cell = unit_box_cell();
  const auto res = split_by_hyperplane(cell, vec2(1, 0.4).normalized(), 0.13);
  REQUIRE(res.did_split);
  int in_below = 0, in_above = 0, in_parent = 0;
  for (int s = 0; s < 100000; ++s) {
    const Vector x = vec2(uni(rng), uni(rng));
    if (cell.region.contains(x, 0.0)) ++in_parent;
    if (res.parts[0].region.contains(x, 0.0)) ++in_below;
    if (res.parts[1].region.contains(x, 0.0)) ++in_above;
  }
  CHECK(std::abs(in_below + in_above - in_parent) <= 0.02 * in_parent);
}

TEST_CASE("barycentric fan of the unit square") {
  const auto children = refine_cell(unit_box_cell(), {RefineMode::Barycentric, 0.0});
  REQUIRE(children.size() == 4);
  for (const auto& child : children) {
    CHECK(child.region.vertices().size() == 3);
    CHECK(has_vertex(child.region.vertices(), 0.0, 0.0));  // fan apex at the centroid
    CHECK((child.A - unit_box_cell().A).norm() == 0.0);
  }
}

TEST_CASE("3-D cube fans into six pyramids") {
  Vector lo(3), hi(3);
  lo << -1, -1, -1;
  hi << 1, 1, 1;
  Cell cube{0, Polytope::box(lo, hi), Matrix::Identity(3, 3), Vector::Zero(3)};
  const auto children = refine_cell(cube, {RefineMode::Barycentric, 0.0});
  CHECK(children.size() == 6);
  for (const auto& child : children) CHECK(child.region.vertices().size() == 5);
}

TEST_CASE("thin cells refuse refinement") {
  auto cell = unit_box_cell();
  CHECK_THROWS_AS(refine_cell(cell, {RefineMode::VectorField, 10.0}), TooSmallCell);
}

TEST_CASE("longest-edge refinement of a triangle") {
  std::vector<Halfspace> rows = {{vec2(0, 1), 0.0},
                                 {vec2(1, -1).normalized(), 0.0},
                                 {vec2(-1, -1).normalized(), 2.0 / std::sqrt(2.0)}};
  Cell tri{0, Polytope::from_halfspaces(rows), Matrix::Zero(2, 2), Vector::Zero(2)};
  REQUIRE(tri.region.vertices().size() == 3);  // (0,0), (2,2), (-? ...) triangle
  const auto children = refine_cell(tri, {RefineMode::LongestEdge, 0.0});
  REQUIRE(children.size() == 2);
  // The two children are triangles sharing the median to the longest edge.
  CHECK(children[0].region.vertices().size() == 3);
  CHECK(children[1].region.vertices().size() == 3);
  int shared = 0;
  for (const auto& u : children[0].region.vertices())
    for (const auto& w : children[1].region.vertices())
      if ((u - w).lpNorm<Eigen::Infinity>() <= 1e-9) ++shared;
  CHECK(shared == 2);
}

TEST_CASE("vector-field refinement cuts along the dominant direction") {
  Cell cell = unit_box_cell();
  cell.A = Matrix(2, 2);
  cell.A << 3.0, 0.0, 0.0, 1.0;
  const auto children = refine_cell(cell, {RefineMode::VectorField, 0.0});
  REQUIRE(children.size() == 2);
  // Dominant singular direction e1: the cut is x1 = 0.
  for (const auto& child : children) {
    CHECK(has_vertex(child.region.vertices(), 0.0, 1.0));
    CHECK(has_vertex(child.region.vertices(), 0.0, -1.0));
  }
}

TEST_CASE("refinement children tile the parent") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  auto cell = unit_box_cell();
  for (const auto mode : {RefineMode::VectorField, RefineMode::Barycentric}) {
    const auto children = refine_cell(cell, {mode, 0.0});
    REQUIRE(children.size() >= 2);
    size_t total_vertices = 0;
    for (const auto& c : children) total_vertices += c.region.vertices().size();
    CHECK(total_vertices > cell.region.vertices().size());
    for (int s = 0; s < 2000; ++s) {
      const Vector x = vec2(uni(rng), uni(rng));
      int covering = 0, strict = 0;
      for (const auto& c : children) {
        if (c.region.contains(x, kFeasTol)) ++covering;
        if (c.region.violation(x) < -1e-6) ++strict;
      }
      CHECK(covering >= 1);
      CHECK(strict <= 1);
    }
  }
}

TEST_CASE("locate on a split box") {
  auto split = split_by_hyperplane(unit_box_cell(), vec2(1, 0), 0.0);
  REQUIRE(split.did_split);
  Partition part(split.parts, Polytope::box(vec2(-1, -1), vec2(1, 1)));

  const auto on_boundary = locate(part, vec2(0.0, 0.5));
  CHECK(on_boundary.size() == 2);
  const auto interior = locate(part, vec2(0.5, 0.5));
  REQUIRE(interior.size() == 1);
  CHECK(part.cells()[static_cast<size_t>(interior[0])].region.contains(vec2(0.5, 0.5)));
  CHECK(locate(part, vec2(7.0, 0.0)).empty());

  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> uni(-1.2, 1.2);
  for (int s = 0; s < 1000; ++s) {
    const Vector x = vec2(uni(rng), uni(rng));
    const auto ids = locate(part, x);
    for (const auto& c : part.cells()) {
      const bool inside = c.region.contains(x, kFeasTol);
      const bool listed = std::find(ids.begin(), ids.end(), c.id) != ids.end();
      CHECK(inside == listed);
    }
  }
}

TEST_CASE("partition bookkeeping: pool, incidence, continuity") {
  auto split = split_by_hyperplane(unit_box_cell(), vec2(1, 0), 0.0);
  Partition part(split.parts, Polytope::box(vec2(-1, -1), vec2(1, 1)));
  CHECK(part.vertex_pool().size() == 6);    // 4 corners + 2 shared
  CHECK(part.incidence().size() == 8);      // 4 vertices per cell
  CHECK(continuity_defect(part) == 0.0);
  validate_partition(part, 5);

  // Breaking one cell's dynamics must trip the continuity check.
  auto broken = split.parts;
  broken[1].a(0) += 1.0;
  Partition bad(broken, Polytope::box(vec2(-1, -1), vec2(1, 1)));
  CHECK(continuity_defect(bad) > 0.5);
  CHECK_THROWS(validate_partition(bad, 5));
}

TEST_CASE("replace_cells keeps pool ids stable") {
  auto split = split_by_hyperplane(unit_box_cell(), vec2(1, 0), 0.0);
  Partition part(split.parts, Polytope::box(vec2(-1, -1), vec2(1, 1)));
  const auto pool_before = part.vertex_pool();

  const auto children = refine_cell(part.cells()[1], {RefineMode::Barycentric, 0.0});
  auto edit = part.replace_cells({{1, children}});
  REQUIRE(edit.cell_map[0] == std::vector<int>{0});
  CHECK(edit.cell_map[1].size() == children.size());
  REQUIRE(edit.partition.vertex_pool().size() >= pool_before.size());
  for (size_t i = 0; i < pool_before.size(); ++i)
    CHECK((edit.partition.vertex_pool()[i] - pool_before[i]).lpNorm<Eigen::Infinity>() == 0.0);
}
