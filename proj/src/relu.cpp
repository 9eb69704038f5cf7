#include "pwacert/relu.hpp"

#include <cmath>
#include <iostream>

namespace pwacert::relu {

void ReluNetwork::validate() const {
  if (W1.rows() != b1.size() || W2.cols() != W1.rows() || W2.rows() != b2.size() ||
      W2.rows() != W1.cols())
    throw std::invalid_argument("inconsistent network dimensions");
  if (!W1.allFinite() || !b1.allFinite() || !W2.allFinite() || !b2.allFinite())
    throw std::invalid_argument("non-finite network weight");
}

Vector eval_network(const ReluNetwork& net, const Vector& x) {
  return net.W2 * (net.W1 * x + net.b1).cwiseMax(0.0) + net.b2;
}

std::vector<bool> activation_pattern(const ReluNetwork& net, const Vector& x) {
  const Vector pre = net.W1 * x + net.b1;
  std::vector<bool> bits(static_cast<size_t>(pre.size()));
  for (int j = 0; j < pre.size(); ++j) bits[static_cast<size_t>(j)] = pre(j) >= 0.0;
  return bits;
}

std::pair<Matrix, Vector> affine_restriction(const ReluNetwork& net, const std::vector<bool>& bits) {
  const int h = net.hidden();
  Vector mask(h);
  for (int j = 0; j < h; ++j) mask(j) = bits[static_cast<size_t>(j)] ? 1.0 : 0.0;
  Matrix A = net.W2 * mask.asDiagonal() * net.W1;
  Vector a = net.W2 * (mask.asDiagonal() * net.b1) + net.b2;
  return {std::move(A), std::move(a)};
}

Partition enumerate_regions(const ReluNetwork& net, const Polytope& domain, int region_budget) {
  net.validate();
  using geometry::Cell;
  std::vector<Cell> cells;
  cells.push_back(Cell{0, domain, Matrix::Zero(net.states(), net.states()),
                       Vector::Zero(net.states())});

  for (int j = 0; j < net.hidden(); ++j) {
    const Vector normal = net.W1.row(j).transpose();
    const double offset = net.b1(j);
    if (normal.norm() <= 1e-12) {
      std::clog << "relu: neuron " << j << " has a zero weight row, skipped\n";
      continue;
    }
    std::vector<Cell> next;
    next.reserve(cells.size());
    for (const auto& cell : cells) {
      auto split = geometry::split_by_hyperplane(cell, normal, offset);
      if (split.did_split) {
        for (auto& part : split.parts) next.push_back(std::move(part));
      } else {
        next.push_back(cell);
      }
    }
    cells = std::move(next);
    if (static_cast<int>(cells.size()) > region_budget)
      throw RegionBudgetExceeded("activation regions exceed the configured budget");
  }

  // The affine map of each region comes from its interior sign pattern.
  for (auto& cell : cells) {
    const auto bits = activation_pattern(net, cell.region.vertex_centroid());
    auto [A, a] = affine_restriction(net, bits);
    cell.A = std::move(A);
    cell.a = std::move(a);
  }
  return Partition(std::move(cells), domain);
}

}  // namespace pwacert::relu
