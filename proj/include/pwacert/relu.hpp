#pragma once

#include "pwacert/geometry.hpp"

#include <stdexcept>

// Converts a single-hidden-layer ReLU network on a box domain into an exact
// PWA partition: one cell per full-dimensional activation region, carrying
// the network's affine restriction.

namespace pwacert::relu {

using geometry::Matrix;
using geometry::Partition;
using geometry::Polytope;
using geometry::Vector;

struct RegionBudgetExceeded : std::runtime_error {
  explicit RegionBudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

struct ReluNetwork {
  Matrix W1;  // h x n
  Vector b1;  // h
  Matrix W2;  // n x h
  Vector b2;  // n

  int hidden() const { return static_cast<int>(W1.rows()); }
  int states() const { return static_cast<int>(W1.cols()); }
  void validate() const;
};

Vector eval_network(const ReluNetwork& net, const Vector& x);

// Activation pattern bits at a point: unit j active iff W1_j.x + b1_j >= 0.
std::vector<bool> activation_pattern(const ReluNetwork& net, const Vector& x);

// Affine restriction (A, a) for a fixed activation pattern.
std::pair<Matrix, Vector> affine_restriction(const ReluNetwork& net, const std::vector<bool>& bits);

// Incremental arrangement construction: inserts each neuron hyperplane into
// the current cell list via halfspace splitting.
Partition enumerate_regions(const ReluNetwork& net, const Polytope& domain,
                            int region_budget = 100000);

}  // namespace pwacert::relu
