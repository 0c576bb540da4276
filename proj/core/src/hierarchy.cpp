#include "approxflow/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "approxflow/exact_oracle.hpp"
#include "approxflow/generators.hpp"
#include "approxflow/rng.hpp"

namespace approxflow {
namespace {

int ceil_log2(double x) {
  return x <= 1.0 ? 0 : static_cast<int>(std::ceil(std::log2(x) - 1e-12));
}

// Walk one vector through every matching, each applied simultaneously.
void walk(std::vector<double>& r, const std::vector<FractionalMatching>& ms) {
  std::vector<double> delta(r.size());
  for (const FractionalMatching& m : ms) {
    std::fill(delta.begin(), delta.end(), 0.0);
    for (const MatchingPair& p : m) {
      const double d = p.weight * (r[p.b] - r[p.a]);
      delta[p.a] += d;
      delta[p.b] -= d;
    }
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += delta[i];
  }
}

struct Prefix {
  Vertex length = 0;
  double conductance = std::numeric_limits<double>::infinity();
};

// Lowest-conductance prefix of `order` (members only).
Prefix sweep_conductance(const Graph& g, const std::vector<Vertex>& order,
                         const std::vector<double>& vol, double total_vol) {
  std::vector<char> in(static_cast<std::size_t>(g.num_vertices()), 0);
  Prefix best;
  double cap = 0.0;
  double v_in = 0.0;
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    const Vertex v = order[i];
    in[v] = 1;
    v_in += vol[v];
    for (const Incidence& inc : g.incident(v)) {
      const Edge& e = g.edge(inc.edge);
      const Vertex w = inc.sign > 0 ? e.head : e.tail;
      cap += in[w] ? -e.capacity : e.capacity;
    }
    const double denom = std::min(v_in, total_vol - v_in);
    if (denom <= 0.0) continue;
    const double phi = std::max(cap, 0.0) / denom;
    if (phi < best.conductance) {
      best.conductance = phi;
      best.length = static_cast<Vertex>(i + 1);
    }
  }
  return best;
}

// Splits a conserving flow into source-sink paths (cycles met on the way are
// cancelled) and returns (source, sink, amount) triples.
std::vector<MatchingPair> decompose_paths(const Graph& g, Flow flow,
                                          std::vector<double> excess) {
  const Vertex n = g.num_vertices();
  double supply = 0.0;
  for (double x : excess) supply += std::max(x, 0.0);
  const double tol = 1e-9 * std::max(supply, 1e-300);
  std::vector<std::size_t> cursor(static_cast<std::size_t>(n), 0);
  std::vector<std::int32_t> pos(static_cast<std::size_t>(n), -1);
  auto out_amount = [&](const Incidence& inc) {
    return inc.sign * flow[inc.edge];  // positive when leaving the vertex
  };
  std::vector<MatchingPair> pairs;
  std::vector<Vertex> path;
  std::vector<Incidence> arcs;
  for (Vertex s = 0; s < n; ++s) {
    int guard = 0;
    while (excess[s] > tol && guard++ < 4 * (g.num_edges() + n) + 16) {
      path.assign(1, s);
      arcs.clear();
      pos[s] = 0;
      bool stuck = false;
      while (true) {
        const Vertex v = path.back();
        if (v != s && excess[v] < -tol) break;
        const auto inc_list = g.incident(v);
        std::size_t& c = cursor[v];
        while (c < inc_list.size() && out_amount(inc_list[c]) <= tol) ++c;
        if (c == inc_list.size()) {
          stuck = true;
          break;
        }
        const Incidence inc = inc_list[c];
        const Edge& e = g.edge(inc.edge);
        const Vertex w = inc.sign > 0 ? e.head : e.tail;
        if (pos[w] >= 0) {
          // cancel the cycle w .. v -> w
          double amt = out_amount(inc);
          for (std::size_t i = pos[w]; i < arcs.size(); ++i) {
            amt = std::min(amt, out_amount(arcs[i]));
          }
          flow[inc.edge] -= inc.sign * amt;
          for (std::size_t i = pos[w]; i < arcs.size(); ++i) {
            flow[arcs[i].edge] -= arcs[i].sign * amt;
          }
          while (path.back() != w) {
            pos[path.back()] = -1;
            path.pop_back();
            arcs.pop_back();
          }
          continue;
        }
        pos[w] = static_cast<std::int32_t>(path.size());
        path.push_back(w);
        arcs.push_back(inc);
      }
      for (Vertex v : path) pos[v] = -1;
      if (stuck) {
        excess[s] = 0.0;
        break;
      }
      const Vertex t = path.back();
      double amt = std::min(excess[s], -excess[t]);
      for (const Incidence& a : arcs) amt = std::min(amt, out_amount(a));
      for (const Incidence& a : arcs) flow[a.edge] -= a.sign * amt;
      excess[s] -= amt;
      excess[t] += amt;
      pairs.push_back({s, t, amt});
    }
  }
  return pairs;
}

}  // namespace

ClusterGraph build_cluster_graph(const Graph& g,
                                 std::span<const Vertex> members) {
  ClusterGraph out;
  out.members.assign(members.begin(), members.end());
  const auto k = static_cast<Vertex>(members.size());
  std::vector<Vertex> local(static_cast<std::size_t>(g.num_vertices()), -1);
  for (Vertex i = 0; i < k; ++i) local[members[i]] = i;
  std::vector<Edge> edges;
  bool boundary = false;
  for (Vertex i = 0; i < k; ++i) {
    for (const Incidence& inc : g.incident(members[i])) {
      const Edge& e = g.edge(inc.edge);
      const Vertex w = inc.sign > 0 ? e.head : e.tail;
      if (local[w] < 0) {
        boundary = true;
        edges.push_back(inc.sign > 0 ? Edge{i, k, e.capacity}
                                     : Edge{k, i, e.capacity});
      } else if (inc.sign > 0) {
        edges.push_back({i, local[w], e.capacity});
      }
    }
  }
  out.external = boundary ? k : -1;
  out.graph = Graph(boundary ? k + 1 : k, std::move(edges));
  return out;
}

double cluster_conductance(const Graph& g, const CutSet& s, Vertex external) {
  if (external >= 0 && s.contains(external)) {
    throw std::invalid_argument("cluster_conductance: S holds the external vertex");
  }
  const std::vector<bool> mask = s.mask(g.num_vertices());
  double vol_s = 0.0;
  double vol_rest = 0.0;
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    if (v == external) continue;
    (mask[v] ? vol_s : vol_rest) += g.weighted_degree(v);
  }
  const double denom = std::min(vol_s, vol_rest);
  if (denom <= 0.0) return std::numeric_limits<double>::infinity();
  return cut_capacity(g, mask) / denom;
}

CutMatchingResult cut_matching_game(const Graph& cluster, Vertex external,
                                    const FlowCutOracle& solver,
                                    const HierarchyParams& params,
                                    std::uint64_t seed) {
  const Vertex total = cluster.num_vertices();
  std::vector<Vertex> members;
  for (Vertex v = 0; v < total; ++v) {
    if (v != external) members.push_back(v);
  }
  const auto k = static_cast<Vertex>(members.size());
  if (k < 2) throw std::invalid_argument("cut_matching_game: cluster size < 2");
  CutMatchingResult res;
  if (k == 2) {
    res.kind = CutMatchingResult::Kind::kExpander;
    res.rounds = 1;
    res.matchings.push_back({{members[0], members[1], 0.5}});
    return res;
  }
  const Vertex ref = params.reference_vertices > 0 ? params.reference_vertices
                                                   : total;
  const double lg = std::log2(std::max<double>(ref, 2.0));
  const int round_cap = params.round_cap > 0
                            ? params.round_cap
                            : static_cast<int>(std::ceil(10.0 * lg * lg));
  std::vector<double> vol(static_cast<std::size_t>(total), 0.0);
  double total_vol = 0.0;
  for (Vertex v : members) {
    vol[v] = cluster.weighted_degree(v);
    total_vol += vol[v];
  }
  Rng rng(seed);
  const double mix_target = 1.0 / (2.0 * k);
  for (int round = 1; round <= round_cap; ++round) {
    res.rounds = round;
    std::vector<double> r(static_cast<std::size_t>(total), 0.0);
    double mean = 0.0;
    for (Vertex v : members) {
      r[v] = rng.normal();
      mean += r[v];
    }
    mean /= k;
    double lo0 = std::numeric_limits<double>::infinity();
    double hi0 = -lo0;
    for (Vertex v : members) {
      r[v] -= mean;
      lo0 = std::min(lo0, r[v]);
      hi0 = std::max(hi0, r[v]);
    }
    walk(r, res.matchings);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (Vertex v : members) {
      lo = std::min(lo, r[v]);
      hi = std::max(hi, r[v]);
    }
    if (!res.matchings.empty() && hi - lo <= mix_target * (hi0 - lo0)) {
      res.kind = CutMatchingResult::Kind::kExpander;
      return res;
    }
    std::vector<Vertex> order = members;
    std::stable_sort(order.begin(), order.end(),
                     [&](Vertex a, Vertex c) { return r[a] < r[c]; });
    const Prefix pre = sweep_conductance(cluster, order, vol, total_vol);
    if (pre.conductance < params.conductance_threshold) {
      res.kind = CutMatchingResult::Kind::kSparseCut;
      res.cut = CutSet(std::vector<Vertex>(order.begin(),
                                           order.begin() + pre.length));
      res.conductance = pre.conductance;
      return res;
    }
    // bisection by volume
    Vertex split = 0;
    double acc = 0.0;
    while (split < k - 1 &&
           (split == 0 || acc + vol[order[split]] <=
                              params.balance_target * total_vol)) {
      acc += vol[order[split]];
      ++split;
    }
    const double vol_a = acc;
    const double vol_b = total_vol - acc;
    const double minvol = std::min(vol_a, vol_b);
    std::vector<double> b(static_cast<std::size_t>(total), 0.0);
    for (Vertex i = 0; i < k; ++i) {
      const Vertex v = order[i];
      b[v] = i < split ? vol[v] * minvol / vol_a : -vol[v] * minvol / vol_b;
    }
    const FlowCutSolution sol = solver(cluster, b, params.inner_epsilon);
    ++res.solver_calls;
    if (sol.cut.is_proper(total)) {
      CutSet side = sol.cut;
      if (external >= 0 && side.contains(external)) {
        side = side.complement(total);
      }
      if (!side.empty() && side.size() < static_cast<std::size_t>(k)) {
        const double phi = cluster_conductance(cluster, side, external);
        if (phi < params.conductance_threshold) {
          res.kind = CutMatchingResult::Kind::kSparseCut;
          res.cut = side;
          res.conductance = phi;
          return res;
        }
      }
    }
    FractionalMatching m;
    for (const MatchingPair& p :
         decompose_paths(cluster, sol.flow, std::vector<double>(b))) {
      if (p.a == p.b) continue;
      m.push_back({p.a, p.b, p.weight / (2.0 * std::max(vol[p.a], vol[p.b]))});
    }
    res.matchings.push_back(std::move(m));
  }
  res.kind = CutMatchingResult::Kind::kExpander;
  res.forced = true;
  return res;
}

double hierarchy_quality(Vertex n) {
  const double l = std::max(1, ceil_log2(static_cast<double>(n)));
  return l * l;
}

DecompositionTree build_hierarchy(const Graph& g, const FlowCutOracle& solver,
                                  const HierarchyParams& params,
                                  std::uint64_t seed, HierarchyStats* stats) {
  const Vertex n = g.num_vertices();
  if (n == 0) throw std::invalid_argument("build_hierarchy: empty graph");
  if (connected_components(g).count > 1) {
    throw std::invalid_argument("build_hierarchy: graph is disconnected");
  }
  HierarchyParams p = params;
  if (p.reference_vertices <= 0) p.reference_vertices = n;
  const int depth_cap =
      p.depth_cap > 0 ? p.depth_cap : std::max(1, 4 * ceil_log2(n));
  HierarchyStats st;

  struct Task {
    std::vector<Vertex> members;
    std::int32_t node;
    int level;
  };
  std::vector<std::int32_t> parent{-1};
  std::vector<std::int32_t> leaf_of(static_cast<std::size_t>(n), -1);
  std::vector<Task> stack;
  {
    std::vector<Vertex> all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), 0);
    stack.push_back({std::move(all), 0, 0});
  }
  auto add_node = [&](std::int32_t par) {
    parent.push_back(par);
    return static_cast<std::int32_t>(parent.size() - 1);
  };
  auto refine = [&](const Task& t) {
    for (Vertex v : t.members) {
      leaf_of[v] = t.members.size() == 1 ? t.node : add_node(t.node);
    }
  };
  while (!stack.empty()) {
    Task t = std::move(stack.back());
    stack.pop_back();
    ++st.clusters;
    st.depth = std::max(st.depth, t.level + 1);
    const auto size = static_cast<Vertex>(t.members.size());
    if (size <= 1) {
      refine(t);
      continue;
    }
    ClusterGraph cg = build_cluster_graph(g, t.members);
    if (static_cast<std::size_t>(t.level) >= st.level_edges.size()) {
      st.level_edges.resize(static_cast<std::size_t>(t.level) + 1, 0);
    }
    st.level_edges[t.level] += cg.graph.num_edges();
    if (size < p.min_cluster || t.level >= depth_cap) {
      refine(t);
      continue;
    }
    const CutMatchingResult res = cut_matching_game(
        cg.graph, cg.external, solver, p,
        derive_seed(seed, static_cast<std::uint64_t>(t.node)));
    st.rounds += res.rounds;
    st.solver_calls += res.solver_calls;
    if (res.kind == CutMatchingResult::Kind::kExpander) {
      ++st.expanders;
      if (res.forced) ++st.forced_expanders;
      refine(t);
      continue;
    }
    ++st.sparse_splits;
    std::vector<char> in(static_cast<std::size_t>(size), 0);
    for (Vertex v : res.cut.vertices()) in[v] = 1;
    std::vector<Vertex> left;
    std::vector<Vertex> right;
    for (Vertex i = 0; i < size; ++i) {
      (in[i] ? left : right).push_back(t.members[i]);
    }
    const std::int32_t ln = add_node(t.node);
    const std::int32_t rn = add_node(t.node);
    stack.push_back({std::move(right), rn, t.level + 1});
    stack.push_back({std::move(left), ln, t.level + 1});
  }
  for (long long e : st.level_edges) {
    if (e > 2LL * g.num_edges()) st.volume_audit_ok = false;
  }
  DecompositionTree tree = DecompositionTree::from_parents(n, parent, leaf_of);
  tree.assign_capacities(g);
  st.depth = tree.depth();
  if (stats) *stats = st;
  return tree;
}

CongestionApproximator hierarchy_approximator(const Graph& g,
                                              const FlowCutOracle& solver,
                                              const HierarchyParams& params,
                                              std::uint64_t seed,
                                              HierarchyStats* stats) {
  return CongestionApproximator(build_hierarchy(g, solver, params, seed, stats),
                                hierarchy_quality(g.num_vertices()));
}

double empirical_quality(const CongestionApproximator& r, const Graph& g,
                         int trials, std::uint64_t seed,
                         const OptOracle& oracle) {
  const Vertex n = g.num_vertices();
  if (n < 2 || trials < 1) return 1.0;
  Rng rng(seed);
  double hi = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  for (int i = 0; i < trials; ++i) {
    DemandVector b;
    if (i % 2 == 0) {
      const auto s = static_cast<Vertex>(rng.below(static_cast<std::uint64_t>(n)));
      auto t = static_cast<Vertex>(rng.below(static_cast<std::uint64_t>(n - 1)));
      if (t >= s) ++t;
      b = st_demand(n, s, t, 1.0);
    } else {
      b = gaussian_demand(n, rng.next());
    }
    const double opt = oracle ? oracle(g, b) : exact_opt_congestion(g, b).value;
    const double rb = r.max_abs_row(b).value;
    if (!(opt > 0.0) || !(rb > 0.0)) continue;
    hi = std::max(hi, opt / rb);
    lo = std::min(lo, opt / rb);
  }
  return hi > 0.0 ? hi / lo : 1.0;
}

}  // namespace approxflow
