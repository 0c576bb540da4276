#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace approxflow {

using Vertex = std::int32_t;
using EdgeId = std::int32_t;

// Per-vertex demand b; positive entries are sources. Zero-sum per connected
// component is checked where routability matters, not at construction.
using DemandVector = std::vector<double>;

// Per-edge signed flow; positive means along the edge's tail -> head
// orientation.
using Flow = std::vector<double>;

struct Edge {
  Vertex tail = 0;
  Vertex head = 0;
  double capacity = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Incidence {
  EdgeId edge;
  int sign;  // +1 if the vertex is the tail, -1 if it is the head.
};

// Undirected capacitated multigraph. Each edge carries a fixed orientation
// that only serves to sign flow values. Immutable after construction.
class Graph {
 public:
  Graph() = default;

  // Throws std::invalid_argument on self-loops, out-of-range endpoints or
  // non-positive / non-finite capacities.
  Graph(Vertex num_vertices, std::vector<Edge> edges);

  Vertex num_vertices() const { return num_vertices_; }
  EdgeId num_edges() const { return static_cast<EdgeId>(edges_.size()); }

  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(EdgeId e) const { return edges_[e]; }

  std::span<const Incidence> incident(Vertex v) const {
    return {incidences_.data() + offsets_[v],
            incidences_.data() + offsets_[v + 1]};
  }

  Vertex degree(Vertex v) const { return offsets_[v + 1] - offsets_[v]; }

  // Sum of capacities of edges incident to v.
  double weighted_degree(Vertex v) const;

  double total_capacity() const;
  double min_capacity() const;

  // Rebuilds the adjacency index from the edge list and compares it with the
  // stored one.
  bool audit_adjacency() const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.num_vertices_ == b.num_vertices_ && a.edges_ == b.edges_;
  }

 private:
  void build_index();

  Vertex num_vertices_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::int32_t> offsets_{0};
  std::vector<Incidence> incidences_;
};

// Proper vertex subset, stored sorted and deduplicated.
class CutSet {
 public:
  CutSet() = default;
  CutSet(std::initializer_list<Vertex> vertices);
  explicit CutSet(std::vector<Vertex> vertices);

  // Builds the set {v : mask[v]}.
  static CutSet from_mask(const std::vector<bool>& mask);

  const std::vector<Vertex>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  bool empty() const { return vertices_.empty(); }
  bool contains(Vertex v) const;

  std::vector<bool> mask(Vertex num_vertices) const;
  CutSet complement(Vertex num_vertices) const;

  // True when non-empty, not all vertices, and every id is in range.
  bool is_proper(Vertex num_vertices) const;

  friend bool operator==(const CutSet&, const CutSet&) = default;

  // Shortlex order: smaller sets first, then lexicographic on sorted ids.
  friend bool shortlex_less(const CutSet& a, const CutSet& b);

 private:
  std::vector<Vertex> vertices_;
};

// Total capacity of edges with exactly one endpoint in S. Throws
// std::domain_error when S is not a proper subset.
double cut_capacity(const Graph& g, const CutSet& s);

// Same as cut_capacity for a membership mask; no properness check.
double cut_capacity(const Graph& g, const std::vector<bool>& in_set);

// b(S).
double cut_demand(std::span<const double> b, const CutSet& s);

struct FlowReport {
  double max_conservation_residual = 0.0;
  double congestion = 0.0;
};

// A flow paired with a cut certificate. cut_ratio <= opt(b) <= flow_congestion
// always holds; converged means flow_congestion <= (1 + eps) * cut_ratio for
// the requested eps. epsilon_achieved = flow_congestion / cut_ratio - 1.
struct FlowCutSolution {
  Flow flow;
  CutSet cut;
  double flow_congestion = 0.0;
  double cut_ratio = 0.0;
  double epsilon_achieved = 0.0;
  bool converged = false;
  bool infeasible = false;  // some component has non-zero net demand
  int iterations = 0;
};

// Residual at v is |b_v - net outflow of f at v|. Throws
// std::invalid_argument on dimension mismatch.
FlowReport validate_flow(const Graph& g, std::span<const double> f,
                         std::span<const double> b);

// Net outflow B f per vertex (tail gets +f_e, head gets -f_e).
std::vector<double> net_outflow(const Graph& g, std::span<const double> f);

// B^T p per edge: p[tail] - p[head].
std::vector<double> potential_difference(const Graph& g,
                                         std::span<const double> p);

// Congestion max_e |f_e| / u_e.
double congestion(const Graph& g, std::span<const double> f);

struct Components {
  std::vector<std::int32_t> label;  // component id per vertex
  std::int32_t count = 0;
};

Components connected_components(const Graph& g);

// Subgraph induced on `vertices` (in the given order); edges keep input
// order. `edge_map` receives the original id of every kept edge when given.
Graph induced_subgraph(const Graph& g, std::span<const Vertex> vertices,
                       std::vector<EdgeId>* edge_map = nullptr);

// Largest absolute per-component sum of b.
double max_component_imbalance(const Graph& g, const Components& comps,
                               std::span<const double> b);

}  // namespace approxflow
