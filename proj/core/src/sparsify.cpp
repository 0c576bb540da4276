#include "approxflow/sparsify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "approxflow/rng.hpp"

namespace approxflow {
namespace {

class UnionFind {
 public:
  explicit UnionFind(Vertex n) : parent_(static_cast<std::size_t>(n)) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  Vertex find(Vertex x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  bool unite(Vertex a, Vertex b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[a] = b;
    return true;
  }

 private:
  std::vector<Vertex> parent_;
};

std::vector<EdgeId> kruskal_max(const Graph& g) {
  std::vector<EdgeId> order(static_cast<std::size_t>(g.num_edges()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](EdgeId a, EdgeId b) {
    return g.edge(a).capacity > g.edge(b).capacity;
  });
  UnionFind uf(g.num_vertices());
  std::vector<EdgeId> tree;
  for (EdgeId e : order) {
    if (uf.unite(g.edge(e).tail, g.edge(e).head)) tree.push_back(e);
  }
  return tree;
}

// One contraction round at a time: balls are grown in hop layers around
// random centers among the unassigned super vertices.
std::vector<EdgeId> ball_growing(const Graph& g, std::uint64_t seed) {
  const Vertex n = g.num_vertices();
  Rng rng(seed);
  UnionFind uf(n);
  std::vector<EdgeId> tree;
  std::vector<EdgeId> alive(static_cast<std::size_t>(g.num_edges()));
  std::iota(alive.begin(), alive.end(), 0);
  Vertex supers = n;
  while (supers > 1) {
    // super-vertex adjacency over alive edges
    std::vector<Vertex> id(static_cast<std::size_t>(n), -1);
    std::vector<Vertex> reps;
    for (Vertex v = 0; v < n; ++v) {
      const Vertex r = uf.find(v);
      if (id[r] < 0) {
        id[r] = static_cast<Vertex>(reps.size());
        reps.push_back(r);
      }
    }
    const auto k = static_cast<Vertex>(reps.size());
    std::vector<std::vector<EdgeId>> adj(static_cast<std::size_t>(k));
    std::vector<EdgeId> next_alive;
    for (EdgeId e : alive) {
      const Vertex a = id[uf.find(g.edge(e).tail)];
      const Vertex b = id[uf.find(g.edge(e).head)];
      if (a == b) continue;
      next_alive.push_back(e);
      adj[a].push_back(e);
      adj[b].push_back(e);
    }
    alive.swap(next_alive);
    auto other = [&](EdgeId e, Vertex a) {
      const Vertex x = id[uf.find(g.edge(e).tail)];
      return x == a ? id[uf.find(g.edge(e).head)] : x;
    };
    std::vector<Vertex> order(static_cast<std::size_t>(k));
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    std::vector<std::int32_t> ball(static_cast<std::size_t>(k), -1);
    std::vector<std::int32_t> slot(static_cast<std::size_t>(k), -1);
    std::vector<EdgeId> chosen;
    const int max_radius =
        std::max(1, static_cast<int>(std::ceil(std::log2(std::max(k, 2)))));
    for (Vertex c : order) {
      if (ball[c] >= 0) continue;
      ball[c] = c;
      std::vector<Vertex> layer{c};
      double inside = 0.0;
      for (int radius = 0; radius < max_radius && !layer.empty(); ++radius) {
        // best attachment edge per newly reached super vertex
        std::vector<Vertex> next;
        std::vector<EdgeId> attach;
        double boundary = 0.0;
        for (Vertex a : layer) {
          for (EdgeId e : adj[a]) {
            const Vertex w = other(e, a);
            if (ball[w] == c) continue;
            if (ball[w] >= 0) continue;
            boundary += g.edge(e).capacity;
            if (slot[w] < 0) {
              slot[w] = static_cast<std::int32_t>(next.size());
              next.push_back(w);
              attach.push_back(e);
            } else {
              EdgeId& cur = attach[slot[w]];
              if (g.edge(e).capacity > g.edge(cur).capacity) cur = e;
            }
          }
        }
        for (Vertex w : next) slot[w] = -1;
        if (next.empty()) break;
        if (radius > 0 && boundary <= 0.5 * inside) break;
        for (std::size_t i = 0; i < next.size(); ++i) {
          ball[next[i]] = c;
          chosen.push_back(attach[i]);
          inside += g.edge(attach[i]).capacity;
        }
        layer.swap(next);
      }
    }
    for (EdgeId e : chosen) {
      if (uf.unite(g.edge(e).tail, g.edge(e).head)) {
        tree.push_back(e);
        --supers;
      }
    }
    if (chosen.empty()) break;
  }
  return tree;
}

}  // namespace

std::vector<EdgeId> spanning_tree(const Graph& g, TreeStrategy strategy,
                                  std::uint64_t seed) {
  std::vector<EdgeId> tree = strategy == TreeStrategy::kMaxCapacity
                                 ? kruskal_max(g)
                                 : ball_growing(g, seed);
  if (static_cast<Vertex>(tree.size()) + 1 != g.num_vertices()) {
    throw std::invalid_argument("spanning_tree: graph is disconnected");
  }
  std::sort(tree.begin(), tree.end());
  return tree;
}

RootedTree root_tree(const Graph& g, const std::vector<EdgeId>& tree_edges,
                     Vertex root) {
  const Vertex n = g.num_vertices();
  std::vector<std::vector<EdgeId>> adj(static_cast<std::size_t>(n));
  for (EdgeId e : tree_edges) {
    adj[g.edge(e).tail].push_back(e);
    adj[g.edge(e).head].push_back(e);
  }
  RootedTree t;
  t.parent.assign(static_cast<std::size_t>(n), -1);
  t.parent_edge.assign(static_cast<std::size_t>(n), -1);
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  if (n == 0) return t;
  t.order.push_back(root);
  seen[root] = 1;
  for (std::size_t i = 0; i < t.order.size(); ++i) {
    const Vertex v = t.order[i];
    for (EdgeId e : adj[v]) {
      const Vertex w = g.edge(e).tail == v ? g.edge(e).head : g.edge(e).tail;
      if (seen[w]) continue;
      seen[w] = 1;
      t.parent[w] = v;
      t.parent_edge[w] = e;
      t.order.push_back(w);
    }
  }
  if (static_cast<Vertex>(t.order.size()) != n) {
    throw std::invalid_argument("root_tree: edges do not span the graph");
  }
  return t;
}

std::vector<double> tree_path_bottleneck(const Graph& g, const RootedTree& t) {
  const Vertex n = g.num_vertices();
  std::vector<std::int32_t> depth(static_cast<std::size_t>(n), 0);
  for (Vertex v : t.order) {
    if (t.parent[v] >= 0) depth[v] = depth[t.parent[v]] + 1;
  }
  int lg = 1;
  while ((1 << lg) < std::max<Vertex>(n, 2)) ++lg;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<Vertex>> up(static_cast<std::size_t>(lg),
                                      std::vector<Vertex>(n));
  std::vector<std::vector<double>> low(static_cast<std::size_t>(lg),
                                       std::vector<double>(n, inf));
  for (Vertex v = 0; v < n; ++v) {
    up[0][v] = t.parent[v] >= 0 ? t.parent[v] : v;
    if (t.parent[v] >= 0) low[0][v] = g.edge(t.parent_edge[v]).capacity;
  }
  for (int j = 1; j < lg; ++j) {
    for (Vertex v = 0; v < n; ++v) {
      up[j][v] = up[j - 1][up[j - 1][v]];
      low[j][v] = std::min(low[j - 1][v], low[j - 1][up[j - 1][v]]);
    }
  }
  std::vector<double> out(static_cast<std::size_t>(g.num_edges()));
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    Vertex a = g.edge(e).tail;
    Vertex b = g.edge(e).head;
    double m = inf;
    if (depth[a] < depth[b]) std::swap(a, b);
    int diff = depth[a] - depth[b];
    for (int j = 0; diff > 0; ++j, diff >>= 1) {
      if (diff & 1) {
        m = std::min(m, low[j][a]);
        a = up[j][a];
      }
    }
    if (a != b) {
      for (int j = lg - 1; j >= 0; --j) {
        if (up[j][a] != up[j][b]) {
          m = std::min({m, low[j][a], low[j][b]});
          a = up[j][a];
          b = up[j][b];
        }
      }
      m = std::min({m, low[0][a], low[0][b]});
    }
    out[e] = m;
  }
  return out;
}

Flow route_on_tree(const Graph& g, const RootedTree& t,
                   std::span<const double> b) {
  Flow f(static_cast<std::size_t>(g.num_edges()), 0.0);
  std::vector<double> acc(b.begin(), b.end());
  for (auto it = t.order.rbegin(); it != t.order.rend(); ++it) {
    const Vertex v = *it;
    if (t.parent[v] < 0) continue;
    const EdgeId e = t.parent_edge[v];
    f[e] += g.edge(e).tail == v ? acc[v] : -acc[v];
    acc[t.parent[v]] += acc[v];
  }
  return f;
}

UltraSparsifier ultra_sparsify(const Graph& g, double kappa, std::uint64_t seed,
                               const SparsifyParams& params) {
  if (!(kappa > 1.0)) throw std::invalid_argument("ultra_sparsify: kappa <= 1");
  const Vertex n = g.num_vertices();
  const EdgeId m = g.num_edges();
  const std::vector<EdgeId> tree = spanning_tree(g, params.tree, seed);
  const RootedTree rt = root_tree(g, tree, 0);
  const std::vector<double> bottleneck = tree_path_bottleneck(g, rt);
  std::vector<char> in_tree(static_cast<std::size_t>(m), 0);
  for (EdgeId e : tree) in_tree[e] = 1;

  std::vector<double> prob(static_cast<std::size_t>(m), 1.0);
  double expected = 0.0;
  for (EdgeId e = 0; e < m; ++e) {
    if (in_tree[e]) continue;
    const double stretch = g.edge(e).capacity / bottleneck[e];
    prob[e] = std::min(1.0, params.oversample * stretch / kappa);
    expected += prob[e];
  }
  const double lg = n > 1 ? std::log2(static_cast<double>(n)) : 0.0;
  const double budget =
      std::ceil(params.oversample * static_cast<double>(m) * lg * lg / kappa);

  for (int attempt = 0; attempt <= params.max_resamples; ++attempt) {
    Rng rng(derive_seed(seed, 0x5a17u + static_cast<std::uint64_t>(attempt)));
    UltraSparsifier out;
    std::vector<Edge> edges;
    for (EdgeId e = 0; e < m; ++e) {
      if (in_tree[e]) {
        out.tree_edges.push_back(static_cast<EdgeId>(edges.size()));
        out.source_edge.push_back(e);
        edges.push_back(g.edge(e));
        continue;
      }
      const double u = rng.uniform();
      if (u < prob[e]) {
        Edge kept = g.edge(e);
        kept.capacity /= prob[e];
        out.source_edge.push_back(e);
        edges.push_back(kept);
      }
    }
    out.off_tree_count =
        static_cast<EdgeId>(edges.size()) - static_cast<EdgeId>(tree.size());
    if (out.off_tree_count > budget) continue;
    out.h = Graph(n, std::move(edges));
    out.kappa_target = kappa;
    out.expected_off_tree = expected;
    out.budget = budget;
    out.attempts = attempt + 1;
    return out;
  }
  throw std::runtime_error("ultra_sparsify: edge budget exceeded");
}

double measure_cut_distortion(const Graph& g, const Graph& h) {
  const Vertex n = g.num_vertices();
  if (h.num_vertices() != n) {
    throw std::domain_error("measure_cut_distortion: vertex counts differ");
  }
  if (n > 20) throw std::domain_error("measure_cut_distortion: n > 20");
  if (n < 2) return 1.0;
  auto bits = [](const Graph& x) {
    std::vector<std::pair<std::uint32_t, double>> out;
    for (const Edge& e : x.edges()) {
      out.emplace_back((1u << e.tail) | (1u << e.head), e.capacity);
    }
    return out;
  };
  const auto gb = bits(g);
  const auto hb = bits(h);
  auto cut = [](const std::vector<std::pair<std::uint32_t, double>>& eb,
                std::uint32_t mask) {
    double s = 0.0;
    for (const auto& [b, c] : eb) {
      const std::uint32_t both = mask & b;
      if (both != 0 && both != b) s += c;
    }
    return s;
  };
  const double inf = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  double lo = inf;
  // the top vertex stays outside; complements give the same cut
  const std::uint32_t limit = 1u << (n - 1);
  for (std::uint32_t mask = 1; mask < limit; ++mask) {
    const double cg = cut(gb, mask);
    const double ch = cut(hb, mask);
    if (cg == 0.0 && ch == 0.0) continue;
    if (cg == 0.0 || ch == 0.0) return inf;
    hi = std::max(hi, ch / cg);
    lo = std::min(lo, ch / cg);
  }
  return lo == inf ? 1.0 : hi / lo;
}

}  // namespace approxflow
