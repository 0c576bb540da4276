#include "approxflow/reduce.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <stdexcept>

namespace approxflow {
namespace {

// Mutable multigraph for eliminations. Spliced edges are appended, so the
// final edge order is: surviving input edges, then splice edges by creation.
class WorkGraph {
 public:
  explicit WorkGraph(const Graph& h)
      : edges_(h.edges()),
        alive_(h.edges().size(), 1),
        adj_(static_cast<std::size_t>(h.num_vertices())),
        deg_(static_cast<std::size_t>(h.num_vertices()), 0),
        vertex_alive_(static_cast<std::size_t>(h.num_vertices()), 1) {
    for (EdgeId e = 0; e < h.num_edges(); ++e) {
      link(e);
    }
  }

  std::int32_t degree(Vertex v) const { return deg_[v]; }
  bool vertex_alive(Vertex v) const { return vertex_alive_[v]; }

  // Alive incident edges of v (compacts the list as a side effect).
  std::vector<EdgeId> incident(Vertex v) {
    auto& list = adj_[v];
    std::size_t keep = 0;
    for (EdgeId e : list) {
      if (alive_[e]) list[keep++] = e;
    }
    list.resize(keep);
    return list;
  }

  Vertex other(EdgeId e, Vertex v) const {
    return edges_[e].tail == v ? edges_[e].head : edges_[e].tail;
  }
  double capacity(EdgeId e) const { return edges_[e].capacity; }

  void kill_edge(EdgeId e) {
    alive_[e] = 0;
    --deg_[edges_[e].tail];
    --deg_[edges_[e].head];
  }

  EdgeId add_edge(Vertex a, Vertex b, double cap) {
    edges_.push_back({a, b, cap});
    alive_.push_back(1);
    const auto e = static_cast<EdgeId>(edges_.size() - 1);
    link(e);
    return e;
  }

  void kill_vertex(Vertex v) { vertex_alive_[v] = 0; }

  Graph finalize(const std::vector<Vertex>& vertex_map, Vertex count) const {
    std::vector<Edge> out;
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      if (!alive_[e]) continue;
      out.push_back({vertex_map[edges_[e].tail], vertex_map[edges_[e].head],
                     edges_[e].capacity});
    }
    return Graph(count, std::move(out));
  }

 private:
  void link(EdgeId e) {
    adj_[edges_[e].tail].push_back(e);
    adj_[edges_[e].head].push_back(e);
    ++deg_[edges_[e].tail];
    ++deg_[edges_[e].head];
  }

  std::vector<Edge> edges_;
  std::vector<char> alive_;
  std::vector<std::vector<EdgeId>> adj_;
  std::vector<std::int32_t> deg_;
  std::vector<char> vertex_alive_;
};

// Applies one record; returns the neighbors whose degree changed.
std::vector<Vertex> apply_record(WorkGraph& w, const EliminationRecord& r) {
  const std::vector<EdgeId> inc = w.incident(r.vertex);
  if (!w.vertex_alive(r.vertex)) {
    throw std::invalid_argument("replay: vertex already eliminated");
  }
  if (r.kind == EliminationRecord::Kind::kDegree1) {
    if (inc.size() != 1 || w.other(inc[0], r.vertex) != r.kept_neighbor ||
        w.capacity(inc[0]) != r.edge_capacity) {
      throw std::invalid_argument("replay: degree-1 record mismatch");
    }
    w.kill_edge(inc[0]);
    w.kill_vertex(r.vertex);
    return {r.kept_neighbor};
  }
  if (inc.size() != 2 || w.other(inc[0], r.vertex) != r.neighbors[0] ||
      w.other(inc[1], r.vertex) != r.neighbors[1] ||
      w.capacity(inc[0]) != r.original_capacities[0] ||
      w.capacity(inc[1]) != r.original_capacities[1]) {
    throw std::invalid_argument("replay: degree-2 record mismatch");
  }
  w.kill_edge(inc[0]);
  w.kill_edge(inc[1]);
  w.add_edge(r.neighbors[0], r.neighbors[1], r.merged_edge_capacity);
  w.kill_vertex(r.vertex);
  return {r.neighbors[0], r.neighbors[1]};
}

void fill_vertex_map(ReductionMap& map, const WorkGraph& w) {
  const Vertex n = map.original_vertices;
  map.vertex_map.assign(static_cast<std::size_t>(n), -1);
  map.survivors.clear();
  for (Vertex v = 0; v < n; ++v) {
    if (w.vertex_alive(v)) {
      map.vertex_map[v] = static_cast<Vertex>(map.survivors.size());
      map.survivors.push_back(v);
    }
  }
  for (auto it = map.eliminated.rbegin(); it != map.eliminated.rend(); ++it) {
    map.vertex_map[it->vertex] = map.vertex_map[it->kept_neighbor];
  }
}

}  // namespace

Reduction reduce(const Graph& h) {
  const Vertex n = h.num_vertices();
  if (connected_components(h).count > 1) {
    throw std::invalid_argument("reduce: graph is disconnected");
  }
  WorkGraph w(h);
  Reduction out;
  out.map.original_vertices = n;
  std::priority_queue<Vertex, std::vector<Vertex>, std::greater<>> heap;
  for (Vertex v = 0; v < n; ++v) {
    if (w.degree(v) <= 2) heap.push(v);
  }
  Vertex remaining = n;
  while (!heap.empty() && remaining > 1) {
    const Vertex v = heap.top();
    heap.pop();
    if (!w.vertex_alive(v) || w.degree(v) == 0 || w.degree(v) > 2) continue;
    const std::vector<EdgeId> inc = w.incident(v);
    EliminationRecord r;
    r.vertex = v;
    if (inc.size() == 1) {
      r.kind = EliminationRecord::Kind::kDegree1;
      r.kept_neighbor = w.other(inc[0], v);
      r.edge_capacity = w.capacity(inc[0]);
    } else {
      const Vertex a = w.other(inc[0], v);
      const Vertex b = w.other(inc[1], v);
      if (a == b) continue;
      r.kind = EliminationRecord::Kind::kDegree2;
      r.neighbors = {a, b};
      r.original_capacities = {w.capacity(inc[0]), w.capacity(inc[1])};
      r.merged_edge_capacity =
          std::min(r.original_capacities[0], r.original_capacities[1]);
      r.kept_neighbor =
          r.original_capacities[0] >= r.original_capacities[1] ? a : b;
    }
    for (Vertex x : apply_record(w, r)) {
      if (w.degree(x) <= 2) heap.push(x);
    }
    out.map.eliminated.push_back(r);
    --remaining;
  }
  fill_vertex_map(out.map, w);
  out.reduced = w.finalize(out.map.vertex_map,
                           static_cast<Vertex>(out.map.survivors.size()));
  const long long extra =
      static_cast<long long>(h.num_edges()) - (static_cast<long long>(n) - 1);
  if (out.reduced.num_edges() > 4 * extra) {
    throw std::logic_error("reduce: reduced graph exceeds 4 m' edges");
  }
  return out;
}

Graph replay(const Graph& h, const ReductionMap& map) {
  if (map.original_vertices != h.num_vertices()) {
    throw std::invalid_argument("replay: vertex count mismatch");
  }
  WorkGraph w(h);
  for (const EliminationRecord& r : map.eliminated) apply_record(w, r);
  ReductionMap rebuilt;
  rebuilt.original_vertices = map.original_vertices;
  rebuilt.eliminated = map.eliminated;
  fill_vertex_map(rebuilt, w);
  if (rebuilt.vertex_map != map.vertex_map) {
    throw std::invalid_argument("replay: vertex map mismatch");
  }
  return w.finalize(rebuilt.vertex_map,
                    static_cast<Vertex>(rebuilt.survivors.size()));
}

namespace {

// Laminar tree over the original vertices: lifted nodes of r_reduced, one
// group node per eliminated vertex, and a singleton leaf per vertex.
DecompositionTree lift_tree(const ReductionMap& map,
                            const CongestionApproximator& r_reduced) {
  const Vertex n = map.original_vertices;
  const DecompositionTree& rt = r_reduced.tree();
  if (rt.num_vertices() != static_cast<Vertex>(map.survivors.size())) {
    throw std::invalid_argument("convert: approximator dimension mismatch");
  }
  const std::int32_t k = rt.num_nodes();
  std::vector<std::int32_t> parent(rt.nodes().size());
  for (std::int32_t i = 0; i < k; ++i) parent[i] = rt.node(i).parent;
  // group node of every original vertex: reduced leaf for survivors
  std::vector<std::int32_t> group(static_cast<std::size_t>(n), -1);
  for (std::size_t s = 0; s < map.survivors.size(); ++s) {
    group[map.survivors[s]] = rt.leaf_of(static_cast<Vertex>(s));
  }
  for (const EliminationRecord& r : map.eliminated) {
    group[r.vertex] = static_cast<std::int32_t>(parent.size());
    parent.push_back(-2);
  }
  for (auto it = map.eliminated.rbegin(); it != map.eliminated.rend(); ++it) {
    parent[group[it->vertex]] = group[it->kept_neighbor];
  }
  std::vector<std::int32_t> leaf_of(static_cast<std::size_t>(n));
  for (Vertex v = 0; v < n; ++v) {
    leaf_of[v] = static_cast<std::int32_t>(parent.size());
    parent.push_back(group[v]);
  }
  return DecompositionTree::from_parents(n, parent, leaf_of);
}

}  // namespace

CongestionApproximator convert(const ReductionMap& map,
                               const CongestionApproximator& r_reduced,
                               const Graph& h) {
  if (h.num_vertices() != map.original_vertices) {
    throw std::invalid_argument("convert: graph dimension mismatch");
  }
  if (map.eliminated.empty() &&
      r_reduced.num_vertices() == h.num_vertices()) {
    return r_reduced;
  }
  DecompositionTree t = lift_tree(map, r_reduced);
  t.assign_capacities(h);
  return CongestionApproximator(std::move(t),
                                r_reduced.quality() * kLiftConstant);
}

SparsifiedReduction ultra_sparsify_and_reduce(const Graph& g, double kappa,
                                              std::uint64_t seed,
                                              const SparsifyParams& params) {
  SparsifiedReduction out;
  out.map.ultra = ultra_sparsify(g, kappa, seed, params);
  out.map.kappa = kappa;
  Reduction red = reduce(out.map.ultra.h);
  out.reduced = std::move(red.reduced);
  out.map.reduction = std::move(red.map);
  return out;
}

CongestionApproximator convert_composed(const ComposedMap& map,
                                        const CongestionApproximator& r_reduced,
                                        const Graph& g) {
  if (g.num_vertices() != map.reduction.original_vertices) {
    throw std::invalid_argument("convert_composed: graph dimension mismatch");
  }
  if (map.reduction.eliminated.empty() &&
      r_reduced.num_vertices() == g.num_vertices()) {
    DecompositionTree t = r_reduced.tree();
    t.assign_capacities(g);
    return CongestionApproximator(
        std::move(t), map.kappa * r_reduced.quality() * kLiftConstant);
  }
  DecompositionTree t = lift_tree(map.reduction, r_reduced);
  t.assign_capacities(g);
  return CongestionApproximator(
      std::move(t), map.kappa * r_reduced.quality() * kLiftConstant);
}

}  // namespace approxflow
