#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "approxflow/graph.hpp"

namespace approxflow {

struct ClusterNode {
  std::int32_t parent = -1;
  double boundary_capacity = 0.0;  // u(S) in the graph the tree was priced on
  std::int32_t member_count = 0;
  std::int32_t level = 0;  // root is level 0
};

// Laminar family of vertex clusters with singleton leaves. Node 0 is the
// root (all vertices) and every node's parent has a smaller index, so one
// forward pass visits parents before children and one backward pass visits
// children before parents.
class DecompositionTree {
 public:
  DecompositionTree() = default;

  // Builds a tree from an arbitrary parent array (-1 marks the unique root)
  // and the singleton leaf of every vertex. Nodes with a single child are
  // contracted, nodes are renumbered in BFS order, member counts and levels
  // are recomputed. Capacities are left at zero; call assign_capacities.
  // Throws std::invalid_argument if the input is not a rooted tree whose
  // leaves are exactly the given vertex leaves. When node_map is given it
  // receives, for every input node, the output node with the same vertex set.
  static DecompositionTree from_parents(
      Vertex num_vertices, const std::vector<std::int32_t>& parent,
      const std::vector<std::int32_t>& leaf_of,
      std::vector<std::int32_t>* node_map = nullptr);

  // Sets every node's boundary capacity to the exact cut capacity of its
  // vertex set in g, in O(m log n) total.
  void assign_capacities(const Graph& g);

  Vertex num_vertices() const { return num_vertices_; }
  std::int32_t num_nodes() const { return static_cast<std::int32_t>(nodes_.size()); }
  const ClusterNode& node(std::int32_t id) const { return nodes_[id]; }
  const std::vector<ClusterNode>& nodes() const { return nodes_; }
  std::int32_t leaf_of(Vertex v) const { return leaf_of_[v]; }
  const std::vector<std::int32_t>& leaves() const { return leaf_of_; }

  // Number of levels (a lone root has depth 1).
  std::int32_t depth() const { return depth_; }

  std::vector<std::int32_t> children(std::int32_t id) const;
  std::vector<Vertex> members(std::int32_t id) const;

  // Structural audit: leaves are singletons covering every vertex once and
  // each node's member count is the sum over its children. Together these
  // make the clusters of every level a partition of V.
  bool audit_partition() const;

  // Line format: "t <node> <parent> <boundary_capacity> <member_count>" per
  // node (root parent is -1) then "l <vertex> <leaf_node>" per vertex, with
  // 1-based vertex ids.
  void write(std::ostream& out) const;
  static DecompositionTree read(std::istream& in);

 private:
  Vertex num_vertices_ = 0;
  std::vector<ClusterNode> nodes_;
  std::vector<std::int32_t> leaf_of_;
  std::int32_t depth_ = 0;
};

// Linear operator R whose rows are b(S) / u(S) over the non-root clusters S of
// a decomposition tree. apply and transpose_apply each take one pass over the
// tree. Rows are true cut ratios of the graph the tree was priced on, so
// ||R b||_inf <= opt(b) on that graph.
class CongestionApproximator {
 public:
  CongestionApproximator() = default;
  CongestionApproximator(DecompositionTree tree, double quality);

  CongestionApproximator(const CongestionApproximator& other);
  CongestionApproximator& operator=(const CongestionApproximator& other);
  CongestionApproximator(CongestionApproximator&&) noexcept;
  CongestionApproximator& operator=(CongestionApproximator&&) noexcept;

  Vertex num_vertices() const { return tree_.num_vertices(); }
  std::int32_t num_rows() const { return tree_.num_nodes() - 1; }

  // Row i belongs to tree node i + 1. A row whose cluster has zero boundary
  // capacity evaluates to +/-infinity when its demand is non-zero, which
  // signals that b cannot be routed at all.
  void apply(std::span<const double> b, std::span<double> rows) const;
  std::vector<double> apply(std::span<const double> b) const;

  // (R^T y)_v = sum over clusters S containing v of y_S / u(S).
  void transpose_apply(std::span<const double> y, std::span<double> out) const;
  std::vector<double> transpose_apply(std::span<const double> y) const;

  // ||R b||_inf together with the row that attains it (-1 when R has no rows).
  struct RowMax {
    double value = 0.0;
    std::int32_t row = -1;
  };
  RowMax max_abs_row(std::span<const double> b) const;

  CutSet row_cut(std::int32_t row) const;

  // Tracked approximation factor alpha (bookkeeping; not a proof).
  double quality() const { return quality_; }
  void set_quality(double q) { quality_ = q; }

  const DecompositionTree& tree() const { return tree_; }

  // Elementary steps performed by apply / transpose_apply so far.
  std::uint64_t operation_count() const {
    return ops_.load(std::memory_order_relaxed);
  }

 private:
  void validate(std::size_t got, std::size_t want, const char* what) const;

  DecompositionTree tree_;
  std::vector<double> inv_capacity_;
  double quality_ = 1.0;
  mutable std::atomic<std::uint64_t> ops_{0};
};

// The base-case approximator: all singleton cuts plus the subtree cuts of a
// maximum-capacity spanning tree rooted at vertex 0. Its quality field is the
// provable bound max over tree edges e of u(subtree below e) / u_e. Requires
// a connected graph.
CongestionApproximator spanning_tree_approximator(const Graph& g);

// Dense matrix with one row per cluster (row-major, num_rows x n); testing aid.
std::vector<double> materialize(const CongestionApproximator& r);

}  // namespace approxflow
