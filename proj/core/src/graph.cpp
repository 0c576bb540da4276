#include "approxflow/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace approxflow {

Graph::Graph(Vertex num_vertices, std::vector<Edge> edges)
    : num_vertices_(num_vertices), edges_(std::move(edges)) {
  if (num_vertices_ < 0) {
    throw std::invalid_argument("negative vertex count");
  }
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    if (e.tail < 0 || e.tail >= num_vertices_ || e.head < 0 ||
        e.head >= num_vertices_) {
      throw std::invalid_argument("edge " + std::to_string(i) +
                                  " has an endpoint out of range");
    }
    if (e.tail == e.head) {
      throw std::invalid_argument("edge " + std::to_string(i) +
                                  " is a self-loop");
    }
    if (!(e.capacity > 0.0) || !std::isfinite(e.capacity)) {
      throw std::invalid_argument("edge " + std::to_string(i) +
                                  " has a non-positive or non-finite capacity");
    }
  }
  build_index();
}

void Graph::build_index() {
  offsets_.assign(static_cast<std::size_t>(num_vertices_) + 1, 0);
  for (const Edge& e : edges_) {
    ++offsets_[e.tail + 1];
    ++offsets_[e.head + 1];
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
  incidences_.resize(2 * edges_.size());
  std::vector<std::int32_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (EdgeId id = 0; id < num_edges(); ++id) {
    const Edge& e = edges_[id];
    incidences_[cursor[e.tail]++] = {id, +1};
    incidences_[cursor[e.head]++] = {id, -1};
  }
}

double Graph::weighted_degree(Vertex v) const {
  double sum = 0.0;
  for (const Incidence& inc : incident(v)) sum += edges_[inc.edge].capacity;
  return sum;
}

double Graph::total_capacity() const {
  double sum = 0.0;
  for (const Edge& e : edges_) sum += e.capacity;
  return sum;
}

double Graph::min_capacity() const {
  double lo = std::numeric_limits<double>::infinity();
  for (const Edge& e : edges_) lo = std::min(lo, e.capacity);
  return lo;
}

bool Graph::audit_adjacency() const {
  Graph rebuilt;
  rebuilt.num_vertices_ = num_vertices_;
  rebuilt.edges_ = edges_;
  rebuilt.build_index();
  if (rebuilt.offsets_ != offsets_) return false;
  for (std::size_t i = 0; i < incidences_.size(); ++i) {
    if (rebuilt.incidences_[i].edge != incidences_[i].edge ||
        rebuilt.incidences_[i].sign != incidences_[i].sign) {
      return false;
    }
  }
  return true;
}

CutSet::CutSet(std::initializer_list<Vertex> vertices)
    : CutSet(std::vector<Vertex>(vertices)) {}

CutSet::CutSet(std::vector<Vertex> vertices) : vertices_(std::move(vertices)) {
  std::sort(vertices_.begin(), vertices_.end());
  vertices_.erase(std::unique(vertices_.begin(), vertices_.end()),
                  vertices_.end());
}

CutSet CutSet::from_mask(const std::vector<bool>& mask) {
  CutSet s;
  for (std::size_t v = 0; v < mask.size(); ++v) {
    if (mask[v]) s.vertices_.push_back(static_cast<Vertex>(v));
  }
  return s;
}

bool CutSet::contains(Vertex v) const {
  return std::binary_search(vertices_.begin(), vertices_.end(), v);
}

std::vector<bool> CutSet::mask(Vertex num_vertices) const {
  std::vector<bool> m(static_cast<std::size_t>(num_vertices), false);
  for (Vertex v : vertices_) m[v] = true;
  return m;
}

CutSet CutSet::complement(Vertex num_vertices) const {
  std::vector<bool> m = mask(num_vertices);
  m.flip();
  return from_mask(m);
}

bool CutSet::is_proper(Vertex num_vertices) const {
  if (vertices_.empty() ||
      vertices_.size() >= static_cast<std::size_t>(num_vertices)) {
    return false;
  }
  return vertices_.front() >= 0 && vertices_.back() < num_vertices;
}

bool shortlex_less(const CutSet& a, const CutSet& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a.vertices_ < b.vertices_;
}

double cut_capacity(const Graph& g, const std::vector<bool>& in_set) {
  double sum = 0.0;
  for (const Edge& e : g.edges()) {
    if (in_set[e.tail] != in_set[e.head]) sum += e.capacity;
  }
  return sum;
}

double cut_capacity(const Graph& g, const CutSet& s) {
  if (!s.is_proper(g.num_vertices())) {
    throw std::domain_error("cut_capacity requires a proper vertex subset");
  }
  return cut_capacity(g, s.mask(g.num_vertices()));
}

double cut_demand(std::span<const double> b, const CutSet& s) {
  double sum = 0.0;
  for (Vertex v : s.vertices()) sum += b[v];
  return sum;
}

std::vector<double> net_outflow(const Graph& g, std::span<const double> f) {
  std::vector<double> out(static_cast<std::size_t>(g.num_vertices()), 0.0);
  for (EdgeId id = 0; id < g.num_edges(); ++id) {
    const Edge& e = g.edge(id);
    out[e.tail] += f[id];
    out[e.head] -= f[id];
  }
  return out;
}

std::vector<double> potential_difference(const Graph& g,
                                         std::span<const double> p) {
  std::vector<double> out(static_cast<std::size_t>(g.num_edges()));
  for (EdgeId id = 0; id < g.num_edges(); ++id) {
    const Edge& e = g.edge(id);
    out[id] = p[e.tail] - p[e.head];
  }
  return out;
}

double congestion(const Graph& g, std::span<const double> f) {
  double worst = 0.0;
  for (EdgeId id = 0; id < g.num_edges(); ++id) {
    worst = std::max(worst, std::abs(f[id]) / g.edge(id).capacity);
  }
  return worst;
}

FlowReport validate_flow(const Graph& g, std::span<const double> f,
                         std::span<const double> b) {
  if (f.size() != static_cast<std::size_t>(g.num_edges()) ||
      b.size() != static_cast<std::size_t>(g.num_vertices())) {
    throw std::invalid_argument("validate_flow: dimension mismatch");
  }
  FlowReport report;
  const std::vector<double> out = net_outflow(g, f);
  for (std::size_t v = 0; v < out.size(); ++v) {
    report.max_conservation_residual =
        std::max(report.max_conservation_residual, std::abs(b[v] - out[v]));
  }
  report.congestion = congestion(g, f);
  return report;
}

Components connected_components(const Graph& g) {
  Components comps;
  comps.label.assign(static_cast<std::size_t>(g.num_vertices()), -1);
  std::vector<Vertex> stack;
  for (Vertex root = 0; root < g.num_vertices(); ++root) {
    if (comps.label[root] >= 0) continue;
    comps.label[root] = comps.count;
    stack.push_back(root);
    while (!stack.empty()) {
      const Vertex v = stack.back();
      stack.pop_back();
      for (const Incidence& inc : g.incident(v)) {
        const Edge& e = g.edge(inc.edge);
        const Vertex w = inc.sign > 0 ? e.head : e.tail;
        if (comps.label[w] < 0) {
          comps.label[w] = comps.count;
          stack.push_back(w);
        }
      }
    }
    ++comps.count;
  }
  return comps;
}

Graph induced_subgraph(const Graph& g, std::span<const Vertex> vertices,
                       std::vector<EdgeId>* edge_map) {
  std::vector<Vertex> local(static_cast<std::size_t>(g.num_vertices()), -1);
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    local[vertices[i]] = static_cast<Vertex>(i);
  }
  std::vector<Edge> edges;
  if (edge_map) edge_map->clear();
  for (EdgeId id = 0; id < g.num_edges(); ++id) {
    const Edge& e = g.edge(id);
    if (local[e.tail] >= 0 && local[e.head] >= 0) {
      edges.push_back({local[e.tail], local[e.head], e.capacity});
      if (edge_map) edge_map->push_back(id);
    }
  }
  return Graph(static_cast<Vertex>(vertices.size()), std::move(edges));
}

double max_component_imbalance(const Graph& g, const Components& comps,
                               std::span<const double> b) {
  std::vector<double> sums(static_cast<std::size_t>(comps.count), 0.0);
  for (Vertex v = 0; v < g.num_vertices(); ++v) sums[comps.label[v]] += b[v];
  double worst = 0.0;
  for (double s : sums) worst = std::max(worst, std::abs(s));
  return worst;
}

}  // namespace approxflow
