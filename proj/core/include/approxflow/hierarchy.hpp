#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "approxflow/approximator.hpp"
#include "approxflow/graph.hpp"

namespace approxflow {

// Approximate flow/cut solver used by the partitioner: (graph, demand,
// error) -> solution.
using FlowCutOracle = std::function<FlowCutSolution(
    const Graph&, std::span<const double>, double)>;

struct HierarchyParams {
  int round_cap = 0;  // 0: ceil(10 log2(n)^2) with n = reference_vertices
  Vertex min_cluster = 3;  // smaller clusters refine straight to singletons
  double balance_target = 0.5;  // volume fraction of the low side of a bisection
  double conductance_threshold = 0.2;
  double inner_epsilon = 0.1;
  int depth_cap = 0;  // 0: 4 ceil(log2 n)
  Vertex reference_vertices = 0;  // 0: the graph's own vertex count
};

// Cluster members plus, when the cluster has boundary edges, one extra vertex
// (the last one) standing for everything outside.
struct ClusterGraph {
  Graph graph;
  std::vector<Vertex> members;  // local id -> id in the parent graph
  Vertex external = -1;
};

ClusterGraph build_cluster_graph(const Graph& g, std::span<const Vertex> members);

// u(S) / min(vol S, vol(C \ S)) where C is every vertex except `external`
// and vol is weighted degree. S must avoid `external`.
double cluster_conductance(const Graph& g, const CutSet& s, Vertex external);

struct MatchingPair {
  Vertex a = 0;
  Vertex b = 0;
  double weight = 0.0;
};
using FractionalMatching = std::vector<MatchingPair>;

struct CutMatchingResult {
  enum class Kind { kSparseCut, kExpander };
  Kind kind = Kind::kExpander;
  CutSet cut;  // the side without the external vertex
  double conductance = 0.0;
  int rounds = 0;
  int solver_calls = 0;
  bool forced = false;  // round cap reached
  std::vector<FractionalMatching> matchings;
};

// Each round walks a random centered vector through the accumulated
// matchings. If the walk has mixed (spread shrunk below 1/(2k) for k
// members) the cluster is declared an expander; otherwise the sweep over the
// walked values is checked for a sparse cut, the vertices are bisected by
// volume, the bisection demand is routed with the oracle, the oracle's cut is
// checked, and finally the flow paths become the next matching.
CutMatchingResult cut_matching_game(const Graph& cluster, Vertex external,
                                    const FlowCutOracle& solver,
                                    const HierarchyParams& params,
                                    std::uint64_t seed);

struct HierarchyStats {
  int clusters = 0;
  int sparse_splits = 0;
  int expanders = 0;
  int forced_expanders = 0;
  int rounds = 0;
  int solver_calls = 0;
  int depth = 0;
  // Sum of cluster-graph edge counts per tree level.
  std::vector<long long> level_edges;
  bool volume_audit_ok = true;
};

// Recursive partition of a connected graph. Sparse cuts split a cluster in
// two; expander clusters and clusters below min_cluster (or at the depth
// cap) are refined into singletons. Boundary capacities are assigned on g.
DecompositionTree build_hierarchy(const Graph& g, const FlowCutOracle& solver,
                                  const HierarchyParams& params,
                                  std::uint64_t seed,
                                  HierarchyStats* stats = nullptr);

// Quality recorded for hierarchy-built operators: max(1, ceil(log2 n))^2.
double hierarchy_quality(Vertex n);

CongestionApproximator hierarchy_approximator(const Graph& g,
                                              const FlowCutOracle& solver,
                                              const HierarchyParams& params,
                                              std::uint64_t seed,
                                              HierarchyStats* stats = nullptr);

// opt(b) oracle for empirical_quality.
using OptOracle = std::function<double(const Graph&, std::span<const double>)>;

// max_b (opt(b) / ||R b||) divided by min_b (opt(b) / ||R b||) over sampled
// demands: half are +-1 pairs on random vertices, half Gaussian zero-sum.
// The default oracle is exact_opt_congestion.
double empirical_quality(const CongestionApproximator& r, const Graph& g,
                         int trials, std::uint64_t seed,
                         const OptOracle& oracle = {});

}  // namespace approxflow
