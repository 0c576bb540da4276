#include "approxflow/exact_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace approxflow {
namespace {

// Dinic's blocking-flow max flow on real capacities. Arcs are stored in
// pairs (2k, 2k+1) that are each other's reverse.
class Dinic {
 public:
  explicit Dinic(int num_nodes) : adj_(static_cast<std::size_t>(num_nodes)) {}

  // Returns the index of the forward arc.
  int add_arc_pair(int a, int b, double cap_ab, double cap_ba) {
    const int id = static_cast<int>(to_.size());
    to_.push_back(b);
    residual_.push_back(cap_ab);
    to_.push_back(a);
    residual_.push_back(cap_ba);
    adj_[a].push_back(id);
    adj_[b].push_back(id + 1);
    max_cap_ = std::max({max_cap_, cap_ab, cap_ba});
    return id;
  }

  double max_flow(int s, int t) {
    tol_ = 1e-13 * std::max(max_cap_, 1e-300);
    double total = 0.0;
    level_.assign(adj_.size(), -1);
    while (bfs(s, t)) {
      cursor_.assign(adj_.size(), 0);
      while (true) {
        const double pushed =
            dfs(s, t, std::numeric_limits<double>::infinity());
        if (pushed <= tol_) break;
        total += pushed;
      }
    }
    return total;
  }

  double residual(int arc) const { return residual_[arc]; }

  // Nodes reachable from s through arcs with residual above tolerance.
  std::vector<bool> reachable(int s) const {
    std::vector<bool> seen(adj_.size(), false);
    std::vector<int> stack{s};
    seen[s] = true;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int arc : adj_[v]) {
        if (residual_[arc] > tol_ && !seen[to_[arc]]) {
          seen[to_[arc]] = true;
          stack.push_back(to_[arc]);
        }
      }
    }
    return seen;
  }

 private:
  bool bfs(int s, int t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<int> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      for (int arc : adj_[v]) {
        if (residual_[arc] > tol_ && level_[to_[arc]] < 0) {
          level_[to_[arc]] = level_[v] + 1;
          q.push(to_[arc]);
        }
      }
    }
    return level_[t] >= 0;
  }

  double dfs(int v, int t, double limit) {
    if (v == t) return limit;
    for (std::size_t& i = cursor_[v]; i < adj_[v].size(); ++i) {
      const int arc = adj_[v][i];
      const int w = to_[arc];
      if (residual_[arc] <= tol_ || level_[w] != level_[v] + 1) continue;
      const double pushed = dfs(w, t, std::min(limit, residual_[arc]));
      if (pushed > tol_) {
        residual_[arc] -= pushed;
        residual_[arc ^ 1] += pushed;
        return pushed;
      }
    }
    return 0.0;
  }

  std::vector<std::vector<int>> adj_;
  std::vector<int> to_;
  std::vector<double> residual_;
  std::vector<int> level_;
  std::vector<std::size_t> cursor_;
  double max_cap_ = 0.0;
  double tol_ = 0.0;
};

// Adds the undirected edges of g, scaled by `scale`, as coupled arc pairs.
std::vector<int> add_graph_arcs(Dinic& net, const Graph& g, double scale) {
  std::vector<int> arcs;
  arcs.reserve(static_cast<std::size_t>(g.num_edges()));
  for (const Edge& e : g.edges()) {
    const double c = e.capacity * scale;
    arcs.push_back(net.add_arc_pair(e.tail, e.head, c, c));
  }
  return arcs;
}

// Net flow along each edge's orientation, recovered from the coupled arcs.
Flow edge_flows(const Dinic& net, const std::vector<int>& arcs) {
  Flow f(arcs.size());
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    f[i] = 0.5 * (net.residual(arcs[i] ^ 1) - net.residual(arcs[i]));
  }
  return f;
}

double ratio_of(const Graph& g, std::span<const double> b, const CutSet& s) {
  const double cap = cut_capacity(g, s.mask(g.num_vertices()));
  const double dem = std::abs(cut_demand(b, s));
  if (cap <= 0.0) {
    return dem > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return dem / cap;
}

}  // namespace

OracleResult exact_max_flow_st(const Graph& g, Vertex s, Vertex t) {
  const Vertex n = g.num_vertices();
  if (s < 0 || s >= n || t < 0 || t >= n) {
    throw std::out_of_range("exact_max_flow_st: vertex out of range");
  }
  if (s == t) throw std::invalid_argument("exact_max_flow_st: s == t");
  Dinic net(n);
  const std::vector<int> arcs = add_graph_arcs(net, g, 1.0);
  OracleResult result;
  result.value = net.max_flow(s, t);
  result.witness_flow = edge_flows(net, arcs);
  std::vector<bool> side = net.reachable(s);
  result.witness_cut = CutSet::from_mask(side);
  return result;
}

OracleResult exact_opt_congestion(const Graph& g, std::span<const double> b) {
  const Vertex n = g.num_vertices();
  if (b.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("exact_opt_congestion: dimension mismatch");
  }
  OracleResult result;
  result.witness_flow.assign(static_cast<std::size_t>(g.num_edges()), 0.0);

  const Components comps = connected_components(g);
  std::vector<double> sums(static_cast<std::size_t>(comps.count), 0.0);
  double scale = 0.0;
  for (Vertex v = 0; v < n; ++v) {
    sums[comps.label[v]] += b[v];
    scale = std::max(scale, std::abs(b[v]));
  }
  for (std::int32_t c = 0; c < comps.count; ++c) {
    if (std::abs(sums[c]) > 1e-9) {
      if (comps.count == 1) {
        throw std::invalid_argument(
            "exact_opt_congestion: demands do not sum to zero");
      }
      std::vector<bool> mask(static_cast<std::size_t>(n));
      for (Vertex v = 0; v < n; ++v) mask[v] = comps.label[v] == c;
      result.witness_cut = CutSet::from_mask(mask);
      result.value = std::numeric_limits<double>::infinity();
      return result;
    }
  }
  if (scale == 0.0 || n < 2) {
    result.witness_cut = n >= 2 ? CutSet{0} : CutSet{};
    result.value = 0.0;
    return result;
  }

  double supply = 0.0;
  double abs_sum = 0.0;
  for (Vertex v = 0; v < n; ++v) {
    supply += std::max(b[v], 0.0);
    abs_sum += std::abs(b[v]);
  }
  const double tol = 1e-11 * supply;
  const int source = n;
  const int sink = n + 1;

  // Returns true when b can be routed with capacities t * u. On success the
  // edge flows are stored in *flow; on failure the source side of the min
  // cut is stored in *cut.
  auto feasible = [&](double t, Flow* flow, std::vector<bool>* cut) {
    Dinic net(n + 2);
    const std::vector<int> arcs = add_graph_arcs(net, g, t);
    for (Vertex v = 0; v < n; ++v) {
      if (b[v] > 0) net.add_arc_pair(source, v, b[v], 0.0);
      if (b[v] < 0) net.add_arc_pair(v, sink, -b[v], 0.0);
    }
    const double value = net.max_flow(source, sink);
    if (value >= supply - tol) {
      *flow = edge_flows(net, arcs);
      return true;
    }
    std::vector<bool> side = net.reachable(source);
    side.resize(static_cast<std::size_t>(n));
    *cut = std::move(side);
    return false;
  };

  double lo = 0.0;
  double hi = abs_sum / (2.0 * g.min_capacity()) * n;
  Flow flow;
  std::vector<bool> cut_mask;
  bool have_flow = feasible(hi, &flow, &cut_mask);
  if (!have_flow) {
    throw std::logic_error("exact_opt_congestion: upper bound infeasible");
  }
  Flow best_flow = flow;
  std::vector<bool> best_cut;
  for (int iter = 0; iter < 60; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid, &flow, &cut_mask)) {
      hi = mid;
      best_flow = flow;
    } else {
      lo = mid;
      best_cut = cut_mask;
    }
  }

  CutSet cut;
  if (!best_cut.empty()) {
    cut = CutSet::from_mask(best_cut);
  }
  if (!cut.is_proper(n)) {
    // Degenerate bisection; fall back to the best singleton.
    double best = -1.0;
    for (Vertex v = 0; v < n; ++v) {
      const double r = std::abs(b[v]) / g.weighted_degree(v);
      if (r > best) {
        best = r;
        cut = CutSet{v};
      }
    }
  }
  result.witness_cut = cut;
  result.witness_flow = std::move(best_flow);
  result.value = ratio_of(g, b, cut);
  return result;
}

RatioCut brute_force_min_ratio_cut(const Graph& g, std::span<const double> b) {
  const Vertex n = g.num_vertices();
  if (n > kBruteForceVertexLimit) {
    throw std::domain_error("brute_force_min_ratio_cut: n exceeds limit");
  }
  if (n < 2) throw std::domain_error("brute_force_min_ratio_cut: n < 2");
  if (b.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("brute_force_min_ratio_cut: dimension mismatch");
  }
  const std::uint32_t full = (1u << n) - 1u;
  RatioCut best;
  best.ratio = -1.0;
  std::vector<std::uint32_t> endpoint_bits;
  for (const Edge& e : g.edges()) {
    endpoint_bits.push_back((1u << e.tail) | (1u << e.head));
  }
  for (std::uint32_t mask = 1; mask < full; ++mask) {
    double cap = 0.0;
    for (std::size_t i = 0; i < endpoint_bits.size(); ++i) {
      const std::uint32_t both = mask & endpoint_bits[i];
      if (both != 0 && both != endpoint_bits[i]) cap += g.edge(i).capacity;
    }
    double dem = 0.0;
    for (Vertex v = 0; v < n; ++v) {
      if (mask & (1u << v)) dem += b[v];
    }
    dem = std::abs(dem);
    const double ratio = cap > 0.0 ? dem / cap
                         : dem > 0.0 ? std::numeric_limits<double>::infinity()
                                     : 0.0;
    const double slack =
        std::isinf(best.ratio) ? 0.0 : 1e-12 * std::max(best.ratio, 1e-300);
    if (ratio > best.ratio + slack) {
      best.ratio = ratio;
      std::vector<Vertex> verts;
      for (Vertex v = 0; v < n; ++v) {
        if (mask & (1u << v)) verts.push_back(v);
      }
      best.cut = CutSet(std::move(verts));
    } else if (ratio >= best.ratio - slack) {
      std::vector<Vertex> verts;
      for (Vertex v = 0; v < n; ++v) {
        if (mask & (1u << v)) verts.push_back(v);
      }
      CutSet candidate(std::move(verts));
      if (shortlex_less(candidate, best.cut)) best.cut = std::move(candidate);
    }
  }
  return best;
}

}  // namespace approxflow
