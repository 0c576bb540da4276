#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "approxflow/approximator.hpp"
#include "approxflow/flow_solver.hpp"
#include "approxflow/graph.hpp"
#include "approxflow/hierarchy.hpp"

namespace approxflow {

struct RecursionConfig {
  double kappa_constant = 1.0;  // C in kappa >= C log2(n)^2
  double rho = 8.0;             // shrink target |E'| <= m / rho
  EdgeId base_case_edges = 300;
  double inner_epsilon = 0.1;
  int max_depth = 20;
  std::uint64_t seed = 1;
  double oversample = 4.0;
  int max_resamples = 3;
  Vertex reference_vertices = 0;  // n-bar; 0 means the top-level n
  SolverParams solver;            // epsilon is set per call
  HierarchyParams hierarchy;
};

struct ShrinkRecord {
  int depth = 0;
  EdgeId edges = 0;          // |E_G|
  EdgeId reduced_edges = 0;  // |E_G'|
  double kappa = 0.0;
  double rho_effective = 0.0;
  int attempts = 0;
  long long next_level_edges = 0;
};

struct RecursionStats {
  std::vector<int> instances_per_depth;
  std::vector<long long> edges_per_depth;
  long long total_recursed_edges = 0;  // all instances below depth 0
  std::vector<ShrinkRecord> shrinks;
  int base_cases = 0;
  int fallbacks = 0;  // retries exhausted, base case used instead
  int max_depth_reached = 0;
  long long solver_iterations = 0;
  int solver_calls = 0;
  int unconverged_inner_calls = 0;
  int hierarchy_rounds = 0;
  bool top_converged = false;
  double wall_seconds = 0.0;

  void add_instance(int depth, EdgeId edges);
  void merge(const RecursionStats& other);
  // Every shrink record satisfies |E_G'| <= |E_G| / rho_effective and the
  // recursed total is at most 2 m_top.
  bool shrink_ok() const;
  bool total_ok(EdgeId top_edges) const;
};

// Builds the congestion approximator for a connected graph: the spanning-tree
// base case when m <= base_case_edges or depth >= max_depth, otherwise
// sparsify and reduce, partition the reduced graph with the cut-matching
// game (whose flow problems recurse through this function) and lift the
// result back.
CongestionApproximator build_congestion_approximator(
    const Graph& g, const RecursionConfig& config,
    RecursionStats* stats = nullptr);

// Routes b with congestion within 1 + epsilon of optimal and a matching cut.
// Components are solved separately; a component with non-zero net demand
// gives an infeasible result whose cut is that component.
FlowCutSolution recursive_approx_max_flow(const Graph& g, double epsilon,
                                          std::span<const double> b,
                                          const RecursionConfig& config,
                                          RecursionStats* stats = nullptr);

struct MaxFlowValue {
  double value = 0.0;  // feasible s-t flow value, within 1 + eps of the max
  double upper_bound = 0.0;
  int bisection_steps = 0;
  FlowCutSolution solution;  // flow of `value` and its certifying cut
};

// Bisection on the flow value F with demand F (e_s - e_t). Disconnected s, t
// give value 0 with the component of s as the cut.
MaxFlowValue max_flow_value(const Graph& g, Vertex s, Vertex t, double epsilon,
                            const RecursionConfig& config,
                            RecursionStats* stats = nullptr);

std::uint64_t graph_fingerprint(const Graph& g);

}  // namespace approxflow
