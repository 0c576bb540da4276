#pragma once

#include <cstdint>
#include <vector>

#include "approxflow/graph.hpp"

namespace approxflow {

enum class TreeStrategy { kMaxCapacity, kLowStretchHeuristic };

// Edge ids of a spanning tree of g, sorted ascending. kMaxCapacity is Kruskal
// on decreasing capacity (ties by edge id) and ignores the seed.
// kLowStretchHeuristic grows balls around random centers, keeps a
// max-capacity attachment edge for every vertex absorbed into a ball, then
// contracts the balls and repeats. Throws std::invalid_argument when g is
// disconnected.
std::vector<EdgeId> spanning_tree(const Graph& g, TreeStrategy strategy,
                                  std::uint64_t seed = 0);

// Rooted view of a spanning tree: parent vertex and parent edge per vertex
// (-1 at the root) plus a BFS order starting at the root.
struct RootedTree {
  std::vector<Vertex> parent;
  std::vector<EdgeId> parent_edge;
  std::vector<Vertex> order;
};

RootedTree root_tree(const Graph& g, const std::vector<EdgeId>& tree_edges,
                     Vertex root = 0);

// For every edge (a, b) of g, the minimum capacity on the tree path a..b,
// answered with binary lifting. Tree edges get their own capacity.
std::vector<double> tree_path_bottleneck(const Graph& g, const RootedTree& t);

// Routes b exactly along the tree (each vertex sends its subtree's net
// demand to its parent). Requires b to sum to zero on the tree's component.
Flow route_on_tree(const Graph& g, const RootedTree& t,
                   std::span<const double> b);

struct SparsifyParams {
  double oversample = 4.0;
  TreeStrategy tree = TreeStrategy::kMaxCapacity;
  int max_resamples = 3;
};

struct UltraSparsifier {
  Graph h;
  std::vector<EdgeId> tree_edges;  // ids in h
  std::vector<EdgeId> source_edge;  // id in g of every edge of h
  double kappa_target = 0.0;
  EdgeId off_tree_count = 0;
  double expected_off_tree = 0.0;
  double budget = 0.0;  // allowed off-tree count, ceil'ed
  int attempts = 0;
};

// Spanning tree plus stretch-sampled off-tree edges: edge e is kept with
// probability p = min(1, oversample * stretch_e / kappa) and capacity u_e / p,
// where stretch_e = u_e / (bottleneck of the tree path between its ends).
// Tree edges keep their capacities. The edge count is checked against
// n - 1 + ceil(oversample * m * log2(n)^2 / kappa); a violating sample is
// redrawn with a derived seed up to max_resamples times before throwing
// std::runtime_error. Throws std::invalid_argument for kappa <= 1 or a
// disconnected graph.
UltraSparsifier ultra_sparsify(const Graph& g, double kappa, std::uint64_t seed,
                               const SparsifyParams& params = {});

// Smallest kappa with u_G(S) ~_kappa u_H(S) over all proper cuts:
// (max_S u_H(S)/u_G(S)) / (min_S u_H(S)/u_G(S)). Infinite when some cut is
// empty in exactly one of the graphs. Throws std::domain_error for n > 20 or
// mismatched vertex counts.
double measure_cut_distortion(const Graph& g, const Graph& h);

}  // namespace approxflow
