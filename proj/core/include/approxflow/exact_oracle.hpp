#pragma once

#include <span>

#include "approxflow/graph.hpp"

namespace approxflow {

// Ground-truth solvers for small instances. Correctness over speed; these are
// used by tests, the `verify` command and audits, never inside the recursive
// pipeline.

struct OracleResult {
  double value = 0.0;  // opt(b), or the s-t max-flow value
  Flow witness_flow;
  CutSet witness_cut;
};

// Exact s-t max flow where every undirected edge can carry up to u_e in
// either direction (net-flow semantics). The witness cut is the set of
// vertices reachable from s in the final residual network.
OracleResult exact_max_flow_st(const Graph& g, Vertex s, Vertex t);

// opt(b): minimum congestion needed to route b. Bisection on the congestion
// t with a max-flow feasibility test on the graph augmented with a super
// source and super sink. The value is the demand/capacity ratio of the
// witness cut taken from the infeasible side of the bisection, so it is a
// true cut ratio and lies within 1e-7 (relative) of opt.
//
// A component whose demands do not sum to zero yields value +infinity with
// that component as the witness cut. Throws std::invalid_argument when the
// whole (connected) graph carries non-zero net demand.
OracleResult exact_opt_congestion(const Graph& g, std::span<const double> b);

struct RatioCut {
  CutSet cut;
  double ratio = 0.0;
};

// max over proper S of |b(S)| / u(S) by enumeration; ties resolved towards
// the shortlex-smallest set. Throws std::domain_error for n > 20.
RatioCut brute_force_min_ratio_cut(const Graph& g, std::span<const double> b);

inline constexpr Vertex kBruteForceVertexLimit = 20;

}  // namespace approxflow
