#include "pwacert/relu.hpp"

#include <doctest.h>

#include <random>

using namespace pwacert;
using geometry::Matrix;
using geometry::Polytope;
using geometry::Vector;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

Polytope unit_box() { return Polytope::box(vec2(-1, -1), vec2(1, 1)); }

relu::ReluNetwork random_net(std::mt19937_64& rng, int hidden, int states) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  relu::ReluNetwork net;
  net.W1 = Matrix(hidden, states);
  net.b1 = Vector(hidden);
  net.W2 = Matrix(states, hidden);
  net.b2 = Vector(states);
  for (int i = 0; i < hidden; ++i) {
    for (int j = 0; j < states; ++j) net.W1(i, j) = gauss(rng);
    net.b1(i) = 0.5 * gauss(rng);
    for (int j = 0; j < states; ++j) net.W2(j, i) = gauss(rng);
  }
  for (int j = 0; j < states; ++j) net.b2(j) = 0.5 * gauss(rng);
  return net;
}

}  // namespace

TEST_CASE("single neuron splits the box at its hyperplane") {
  relu::ReluNetwork net;
  net.W1 = Matrix(1, 2);
  net.W1 << 1.0, 0.0;
  net.b1 = Vector::Zero(1);
  net.W2 = Matrix(2, 1);
  net.W2 << 0.5, -0.25;
  net.b2 = vec2(0.1, 0.2);

  const auto part = relu::enumerate_regions(net, unit_box());
  REQUIRE(part.cells().size() == 2);
  // On the active side A = W2*W1; on the inactive side A = 0.
  int active = -1, inactive = -1;
  for (const auto& c : part.cells()) {
    if (c.A.norm() > 1e-12) active = c.id;
    else inactive = c.id;
  }
  REQUIRE(active >= 0);
  REQUIRE(inactive >= 0);
  const Matrix expect = net.W2 * net.W1;
  CHECK((part.cells()[static_cast<size_t>(active)].A - expect).norm() <= 1e-12);
  CHECK((part.cells()[static_cast<size_t>(active)].a - net.b2).norm() <= 1e-12);
  CHECK((part.cells()[static_cast<size_t>(inactive)].a - net.b2).norm() <= 1e-12);
  // The active region is x1 >= 0.
  CHECK(part.cells()[static_cast<size_t>(active)].region.contains(vec2(0.5, 0.0)));

  // Hand evaluation at (0.5, 0): W2 * 0.5 + b2.
  const Vector out = relu::eval_network(net, vec2(0.5, 0.0));
  CHECK(out(0) == doctest::Approx(0.5 * 0.5 + 0.1));
  CHECK(out(1) == doctest::Approx(-0.25 * 0.5 + 0.2));
}

TEST_CASE("constant-active network keeps one cell") {
  relu::ReluNetwork net;
  net.W1 = Matrix::Zero(3, 2);
  net.b1 = Vector(3);
  net.b1 << 1.0, 2.0, 0.5;
  net.W2 = Matrix(2, 3);
  net.W2 << 1, 0, 1, 0, 1, 0;
  net.b2 = vec2(-0.3, 0.4);

  const auto part = relu::enumerate_regions(net, unit_box());
  REQUIRE(part.cells().size() == 1);
  CHECK(part.cells()[0].A.norm() == 0.0);
  CHECK((part.cells()[0].a - (net.W2 * net.b1 + net.b2)).norm() <= 1e-12);
}

TEST_CASE("zero input with zero hidden bias returns the output bias") {
  std::mt19937_64 rng(3);
  auto net = random_net(rng, 4, 2);
  net.b1.setZero();
  CHECK((relu::eval_network(net, Vector::Zero(2)) - net.b2).lpNorm<Eigen::Infinity>() <= 1e-15);
}

TEST_CASE("random 8-neuron planar nets: count bound, sign oracle, equivalence") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const auto net = random_net(rng, 8, 2);
    const auto part = relu::enumerate_regions(net, unit_box());

    // Planar arrangement bound: 1 + h + C(h,2).
    CHECK(part.cells().size() <= 37);

    // Membership via the sign pattern at each cell's Chebyshev center.
    for (const auto& cell : part.cells()) {
      const auto [center, radius] = cell.region.chebyshev_center();
      CHECK(radius > 0.0);
      const auto bits = relu::activation_pattern(net, center);
      const auto [A, a] = relu::affine_restriction(net, bits);
      CHECK((A - cell.A).lpNorm<Eigen::Infinity>() <= 1e-12);
      CHECK((a - cell.a).lpNorm<Eigen::Infinity>() <= 1e-12);
    }

    // Exact equivalence between the network and the located affine map.
    double worst = 0.0;
    for (int s = 0; s < 10000; ++s) {
      const Vector x = vec2(uni(rng), uni(rng));
      const auto ids = geometry::locate(part, x);
      REQUIRE(!ids.empty());
      double best_cell = std::numeric_limits<double>::infinity();
      for (int id : ids) {
        const auto& c = part.cells()[static_cast<size_t>(id)];
        best_cell = std::min(best_cell,
                             (c.A * x + c.a - relu::eval_network(net, x)).lpNorm<Eigen::Infinity>());
      }
      worst = std::max(worst, best_cell);
    }
    CHECK(worst <= 1e-9);

    // ReLU networks are continuous, so the partition must be too.
    CHECK(geometry::continuity_defect(part) <= 1e-9);
  }
}

TEST_CASE("region budget is enforced") {
  std::mt19937_64 rng(19);
  const auto net = random_net(rng, 8, 2);
  CHECK_THROWS_AS(relu::enumerate_regions(net, unit_box(), 3), relu::RegionBudgetExceeded);
}

TEST_CASE("dimension mismatches are rejected") {
  relu::ReluNetwork net;
  net.W1 = Matrix::Zero(3, 2);
  net.b1 = Vector::Zero(2);  // wrong length
  net.W2 = Matrix::Zero(2, 3);
  net.b2 = Vector::Zero(2);
  CHECK_THROWS_AS(net.validate(), std::invalid_argument);
}
