#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

// Polytope computations in double precision with explicit tolerances:
// representation conversion, halfspace splitting, vertex/incidence
// bookkeeping and cell refinement.  Everything here is a pure function of
// its inputs; partitions are immutable snapshots and edits build new ones.

namespace pwacert::geometry {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// A point satisfies all halfspaces when normal.dot(x) + offset >= -kFeasTol.
constexpr double kFeasTol = 1e-7;
// Two vertices closer than this (infinity norm) share one pool identity.
constexpr double kMergeTol = 1e-7;
// Classification threshold for treating a computed value as nonzero.
constexpr double kZeroTol = 1e-6;

struct UnboundedRegion : std::runtime_error {
  explicit UnboundedRegion(const std::string& what) : std::runtime_error(what) {}
};
struct EmptyRegion : std::runtime_error {
  explicit EmptyRegion(const std::string& what) : std::runtime_error(what) {}
};
struct TooSmallCell : std::runtime_error {
  explicit TooSmallCell(const std::string& what) : std::runtime_error(what) {}
};

struct Halfspace {
  Vector normal;
  double offset = 0.0;

  double value(const Vector& x) const { return normal.dot(x) + offset; }
  Halfspace normalized() const;
  Halfspace flipped() const { return Halfspace{-normal, -offset}; }
};

// Enumerates the vertices of {x : normal_i.x + offset_i >= 0 for all i}.
// Throws UnboundedRegion / EmptyRegion.  Combinatorial n-subset
// intersection for n <= 3, pivoting over the vertex-edge graph above.
std::vector<Vector> enumerate_vertices(const std::vector<Halfspace>& halfspaces);

// A bounded convex region carrying both representations.
class Polytope {
 public:
  Polytope() = default;

  // Enumerates vertices from the halfspaces (validating boundedness).
  static Polytope from_halfspaces(std::vector<Halfspace> halfspaces);

  // Trusts the caller that the intersection is bounded and nonempty;
  // used on split children whose parent was already validated.
  static Polytope from_halfspaces_unchecked(std::vector<Halfspace> halfspaces);

  // Adopts both representations verbatim (deserialization path).
  static Polytope from_data(std::vector<Halfspace> halfspaces, std::vector<Vector> vertices);

  static Polytope box(const Vector& lower, const Vector& upper);

  const std::vector<Halfspace>& halfspaces() const { return halfspaces_; }
  const std::vector<Vector>& vertices() const { return vertices_; }
  int dim() const { return dim_; }

  bool contains(const Vector& x, double tol = kFeasTol) const;
  // Largest violation of any halfspace at x (<= 0 means inside).
  double violation(const Vector& x) const;
  double diameter() const;
  Vector vertex_centroid() const;
  // Center and radius of the largest inscribed ball (solved as an LP).
  std::pair<Vector, double> chebyshev_center() const;

 private:
  std::vector<Halfspace> halfspaces_;
  std::vector<Vector> vertices_;
  int dim_ = 0;
};

// Structural invariants: nonempty, vertices feasible, each vertex on >= n
// facets, hull == intersection on sampled points.  Throws on violation.
void validate_polytope(const Polytope& p, unsigned seed = 0);

struct Cell {
  int id = -1;
  Polytope region;
  Matrix A;
  Vector a;

  Vector flow(const Vector& x) const { return A * x + a; }
};

struct SplitResult {
  bool did_split = false;
  std::vector<Cell> parts;  // two cells {below, above} when did_split
};

// Cuts a cell by {x : normal.x + offset = 0}.  Grazing cuts (no interior on
// one side) are reported as no-cut.  Children inherit (A, a) unchanged.
SplitResult split_by_hyperplane(const Cell& cell, const Vector& normal, double offset);

enum class RefineMode { VectorField, Barycentric, LongestEdge };

struct RefineOptions {
  RefineMode mode = RefineMode::VectorField;
  double min_diameter = 0.0;  // TooSmallCell below this
};

// Splits a cell into >= 2 children tiling it, all inheriting (A, a).
std::vector<Cell> refine_cell(const Cell& cell, const RefineOptions& opts);

struct PartitionEdit;

class Partition {
 public:
  Partition() = default;
  // Reassigns cell ids to 0..k-1 and builds the shared vertex pool plus the
  // (cell, vertex) incidence pairs.
  Partition(std::vector<Cell> cells, Polytope domain);

  const std::vector<Cell>& cells() const { return cells_; }
  const Polytope& domain() const { return domain_; }
  const std::vector<Vector>& vertex_pool() const { return pool_; }
  // Sorted list of (cell id, pool vertex id), one entry per cell vertex.
  const std::vector<std::pair<int, int>>& incidence() const { return incidence_; }
  const std::vector<int>& cell_vertex_ids(int cell) const {
    return cell_vertex_ids_.at(static_cast<size_t>(cell));
  }
  const std::vector<int>& cells_at_vertex(int vertex) const {
    return vertex_cells_.at(static_cast<size_t>(vertex));
  }

  // Replaces cells by their children (identity for untouched ids);
  // existing pool ids are preserved, new vertices appended.
  PartitionEdit replace_cells(
      const std::vector<std::pair<int, std::vector<Cell>>>& replacements) const;

 private:
  void index_vertices();

  std::vector<Cell> cells_;
  Polytope domain_;
  std::vector<Vector> pool_;
  std::vector<std::pair<int, int>> incidence_;
  std::vector<std::vector<int>> cell_vertex_ids_;
  std::vector<std::vector<int>> vertex_cells_;
};

struct PartitionEdit {
  Partition partition;
  std::vector<std::vector<int>> cell_map;  // old cell id -> new cell ids
};

// All cells containing x within kFeasTol; empty for exterior points.
std::vector<int> locate(const Partition& partition, const Vector& x);

// Field value at x taken from the first located cell; nearest cell by
// violation when x sits slightly outside every cell.
Vector eval_field(const Partition& partition, const Vector& x, int* cell_hint = nullptr);

// Max over shared pool vertices of the inter-cell dynamics mismatch
// |(A_i - A_j) v + (a_i - a_j)|_inf.  Zero for continuous PWA fields.
double continuity_defect(const Partition& partition);

// Sampled structural checks (cover + disjoint interiors + continuity).
void validate_partition(const Partition& partition, unsigned seed = 0, int samples = 256);

}  // namespace pwacert::geometry
