#include "pwacert/fixtures.hpp"

#include "pwacert/geometry.hpp"
#include "pwacert/io.hpp"

#include <cmath>

namespace pwacert::fixtures {

using geometry::Cell;
using geometry::Matrix;
using geometry::Polytope;
using geometry::Vector;
using io::PwaCellSpec;
using io::SystemSpec;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

SystemSpec linear_system(const std::string& name, double sign) {
  SystemSpec spec;
  spec.name = name;
  spec.lower = vec2(-1.0, -1.0);
  spec.upper = vec2(1.0, 1.0);
  PwaCellSpec cell;
  cell.E = Matrix(4, 2);
  cell.E << 1, 0, -1, 0, 0, 1, 0, -1;
  cell.e = Vector(4);
  cell.e << 1, 1, 1, 1;
  cell.A = sign * Matrix::Identity(2, 2);
  cell.a = Vector::Zero(2);
  spec.pwa = std::vector<PwaCellSpec>{cell};
  return spec;
}

// Piecewise-linear interpolant of sin on [-pi, pi] with knots at +-pi/2.
void sin_piece(double x, double& slope, double& constant) {
  const double pi = M_PI;
  if (x <= -pi / 2) {
    slope = -2.0 / pi;
    constant = -2.0;
  } else if (x < pi / 2) {
    slope = 2.0 / pi;
    constant = 0.0;
  } else {
    slope = -2.0 / pi;
    constant = 2.0;
  }
}

// u = sat(-3 x1 - 3 x2, +-1.5) selected by s = x1 + x2.
void sat_piece(double s, Vector& du, double& constant) {
  if (s <= -0.5) {
    du = Vector::Zero(2);
    constant = 1.5;
  } else if (s < 0.5) {
    du = vec2(-3.0, -3.0);
    constant = 0.0;
  } else {
    du = Vector::Zero(2);
    constant = -1.5;
  }
}

}  // namespace

SystemSpec stable_linear() { return linear_system("stable-linear", -1.0); }
SystemSpec unstable_linear() { return linear_system("unstable-linear", 1.0); }

SystemSpec pendulum() {
  const double pi = M_PI;
  SystemSpec spec;
  spec.name = "pendulum";
  spec.lower = vec2(-pi, -pi);
  spec.upper = vec2(pi, pi);

  // Carve the box along the sin knots and the saturation band edges.
  Cell seed{0, Polytope::box(spec.lower, spec.upper), Matrix::Zero(2, 2), Vector::Zero(2)};
  std::vector<Cell> cells{seed};
  const std::vector<std::pair<Vector, double>> cuts = {
      {vec2(1.0, 0.0), pi / 2},   // x1 = -pi/2
      {vec2(1.0, 0.0), -pi / 2},  // x1 = +pi/2
      {vec2(1.0, 1.0), 0.5},      // x1 + x2 = -0.5
      {vec2(1.0, 1.0), -0.5},     // x1 + x2 = +0.5
  };
  for (const auto& [normal, offset] : cuts) {
    std::vector<Cell> next;
    for (const auto& cell : cells) {
      auto split = geometry::split_by_hyperplane(cell, normal, offset);
      if (split.did_split)
        for (auto& part : split.parts) next.push_back(std::move(part));
      else
        next.push_back(cell);
    }
    cells = std::move(next);
  }

  // dx1/dt = x2, dx2/dt = pwasin(x1) + u.
  std::vector<PwaCellSpec> out;
  for (const auto& cell : cells) {
    const Vector c = cell.region.vertex_centroid();
    double sin_slope, sin_const, u_const;
    Vector du(2);
    sin_piece(c(0), sin_slope, sin_const);
    sat_piece(c(0) + c(1), du, u_const);

    PwaCellSpec cs;
    cs.A = Matrix(2, 2);
    cs.A << 0.0, 1.0, sin_slope + du(0), du(1);
    cs.a = vec2(0.0, sin_const + u_const);
    const auto& rows = cell.region.halfspaces();
    cs.E = Matrix(static_cast<long>(rows.size()), 2);
    cs.e = Vector(static_cast<long>(rows.size()));
    for (size_t r = 0; r < rows.size(); ++r) {
      cs.E.row(static_cast<long>(r)) = rows[r].normal.transpose();
      cs.e(static_cast<long>(r)) = rows[r].offset;
    }
    out.push_back(std::move(cs));
  }
  spec.pwa = std::move(out);
  return spec;
}

std::optional<SystemSpec> by_name(const std::string& name) {
  if (name == "stable-linear") return stable_linear();
  if (name == "unstable-linear") return unstable_linear();
  if (name == "pendulum") return pendulum();
  return std::nullopt;
}

}  // namespace pwacert::fixtures
