#include "approxflow/driver.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <memory>
#include <stdexcept>

#include "approxflow/generators.hpp"
#include "approxflow/reduce.hpp"
#include "approxflow/rng.hpp"
#include "approxflow/sparsify.hpp"

namespace approxflow {

void RecursionStats::add_instance(int depth, EdgeId edges) {
  const auto d = static_cast<std::size_t>(depth);
  if (instances_per_depth.size() <= d) {
    instances_per_depth.resize(d + 1, 0);
    edges_per_depth.resize(d + 1, 0);
  }
  ++instances_per_depth[d];
  edges_per_depth[d] += edges;
  if (depth > 0) total_recursed_edges += edges;
  max_depth_reached = std::max(max_depth_reached, depth);
}

void RecursionStats::merge(const RecursionStats& o) {
  if (instances_per_depth.size() < o.instances_per_depth.size()) {
    instances_per_depth.resize(o.instances_per_depth.size(), 0);
    edges_per_depth.resize(o.edges_per_depth.size(), 0);
  }
  for (std::size_t d = 0; d < o.instances_per_depth.size(); ++d) {
    instances_per_depth[d] += o.instances_per_depth[d];
    edges_per_depth[d] += o.edges_per_depth[d];
  }
  total_recursed_edges += o.total_recursed_edges;
  shrinks.insert(shrinks.end(), o.shrinks.begin(), o.shrinks.end());
  base_cases += o.base_cases;
  fallbacks += o.fallbacks;
  max_depth_reached = std::max(max_depth_reached, o.max_depth_reached);
  solver_iterations += o.solver_iterations;
  solver_calls += o.solver_calls;
  unconverged_inner_calls += o.unconverged_inner_calls;
  hierarchy_rounds += o.hierarchy_rounds;
}

bool RecursionStats::shrink_ok() const {
  for (const ShrinkRecord& s : shrinks) {
    if (!(s.rho_effective > 2.0)) return false;
    if (s.reduced_edges > s.edges / s.rho_effective) return false;
    if (2 * s.next_level_edges > s.edges) return false;
  }
  for (std::size_t d = 1; d + 1 < edges_per_depth.size(); ++d) {
    if (2 * edges_per_depth[d + 1] > edges_per_depth[d]) return false;
  }
  return true;
}

bool RecursionStats::total_ok(EdgeId top_edges) const {
  return total_recursed_edges <= 2LL * top_edges;
}

std::uint64_t graph_fingerprint(const Graph& g) {
  std::uint64_t h = splitmix64(static_cast<std::uint64_t>(g.num_vertices()));
  h = splitmix64(h ^ static_cast<std::uint64_t>(g.num_edges()));
  for (const Edge& e : g.edges()) {
    h = splitmix64(h ^ (static_cast<std::uint64_t>(e.tail) << 32 |
                        static_cast<std::uint32_t>(e.head)));
    h = splitmix64(h ^ std::bit_cast<std::uint64_t>(e.capacity));
  }
  return h;
}

namespace {

int ceil_log2(double x) {
  return x <= 1.0 ? 0 : static_cast<int>(std::ceil(std::log2(x) - 1e-12));
}

// Smallest kappa (at least kappa_min) whose expected off-tree sample count
// is at most `target`.
double choose_kappa(const Graph& g, double oversample, double kappa_min,
                    double target) {
  const std::vector<EdgeId> tree = spanning_tree(g, TreeStrategy::kMaxCapacity);
  const RootedTree rt = root_tree(g, tree, 0);
  const std::vector<double> bottleneck = tree_path_bottleneck(g, rt);
  std::vector<char> in_tree(static_cast<std::size_t>(g.num_edges()), 0);
  for (EdgeId e : tree) in_tree[e] = 1;
  std::vector<double> stretch;
  double total = 0.0;
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    if (in_tree[e]) continue;
    stretch.push_back(g.edge(e).capacity / bottleneck[e]);
    total += stretch.back();
  }
  auto expected = [&](double kappa) {
    double s = 0.0;
    for (double x : stretch) s += std::min(1.0, oversample * x / kappa);
    return s;
  };
  if (expected(kappa_min) <= target) return kappa_min;
  double lo = kappa_min;
  double hi = std::max(kappa_min * 2.0, oversample * total / std::max(target, 1e-9));
  for (int i = 0; i < 60 && hi / lo > 1.0 + 1e-6; ++i) {
    const double mid = std::sqrt(lo * hi);
    (expected(mid) <= target ? hi : lo) = mid;
  }
  return hi;
}

CongestionApproximator single_vertex_approximator() {
  return CongestionApproximator(
      DecompositionTree::from_parents(1, {-1}, {0}), 1.0);
}

class Recursion {
 public:
  Recursion(const RecursionConfig& cfg, Vertex nbar) : cfg_(cfg), nbar_(nbar) {}

  CongestionApproximator build(const Graph& g, int depth, RecursionStats& st);
  FlowCutSolution solve(const Graph& g, std::span<const double> b, double eps,
                        int depth, RecursionStats& st);

 private:
  struct CacheEntry {
    std::uint64_t key = 0;
    std::shared_ptr<const Graph> graph;
    std::shared_ptr<const CongestionApproximator> r;
  };

  const RecursionConfig& cfg_;
  Vertex nbar_;
  std::vector<CacheEntry> cache_;  // one entry per depth
};

CongestionApproximator Recursion::build(const Graph& g, int depth,
                                        RecursionStats& st) {
  const EdgeId m = g.num_edges();
  if (g.num_vertices() <= 1) return single_vertex_approximator();
  if (m <= cfg_.base_case_edges || depth >= cfg_.max_depth ||
      g.num_vertices() <= 2) {
    ++st.base_cases;
    return spanning_tree_approximator(g);
  }
  const double rho_eff = std::max(
      cfg_.rho, 4.0 * (ceil_log2(static_cast<double>(m) / cfg_.rho) + 1));
  const double lgn = std::log2(std::max<double>(nbar_, 2.0));
  const double kappa_min =
      std::max(1.01, cfg_.kappa_constant * lgn * lgn);
  SparsifyParams sp;
  sp.oversample = cfg_.oversample;
  sp.max_resamples = cfg_.max_resamples;
  double kappa = choose_kappa(g, cfg_.oversample, kappa_min,
                              static_cast<double>(m) / (3.0 * rho_eff));
  const std::uint64_t key = graph_fingerprint(g);
  HierarchyParams hp = cfg_.hierarchy;
  hp.reference_vertices = nbar_;
  hp.inner_epsilon = cfg_.inner_epsilon;
  for (int attempt = 0; attempt <= cfg_.max_resamples; ++attempt) {
    const std::uint64_t seed =
        derive_seed(cfg_.seed, key + static_cast<std::uint64_t>(attempt));
    SparsifiedReduction sr;
    try {
      sr = ultra_sparsify_and_reduce(g, kappa, seed, sp);
    } catch (const std::runtime_error&) {
      kappa *= 2.0;
      continue;
    }
    const EdgeId reduced = sr.reduced.num_edges();
    if (reduced > m / rho_eff) {
      kappa *= 2.0;
      continue;
    }
    RecursionStats local;
    CongestionApproximator r_reduced;
    if (sr.reduced.num_vertices() >= 2) {
      const FlowCutOracle oracle = [&](const Graph& c,
                                       std::span<const double> b, double eps) {
        return solve(c, b, eps, depth + 1, local);
      };
      HierarchyStats hs;
      r_reduced = hierarchy_approximator(sr.reduced, oracle, hp, seed, &hs);
      local.hierarchy_rounds += hs.rounds;
    } else {
      r_reduced = single_vertex_approximator();
    }
    const auto next = static_cast<std::size_t>(depth + 1);
    const long long next_edges =
        next < local.edges_per_depth.size() ? local.edges_per_depth[next] : 0;
    if (2 * next_edges > m) {
      kappa *= 2.0;
      continue;
    }
    ShrinkRecord rec;
    rec.depth = depth;
    rec.edges = m;
    rec.reduced_edges = reduced;
    rec.kappa = kappa;
    rec.rho_effective = rho_eff;
    rec.attempts = attempt + 1;
    rec.next_level_edges = next_edges;
    st.merge(local);
    st.shrinks.push_back(rec);
    return convert_composed(sr.map, r_reduced, g);
  }
  ++st.fallbacks;
  ++st.base_cases;
  return spanning_tree_approximator(g);
}

FlowCutSolution Recursion::solve(const Graph& g, std::span<const double> b,
                                 double eps, int depth, RecursionStats& st) {
  const auto d = static_cast<std::size_t>(depth);
  if (cache_.size() <= d) cache_.resize(d + 1);
  CacheEntry& entry = cache_[d];
  const std::uint64_t key = graph_fingerprint(g);
  if (!entry.r || entry.key != key || !(*entry.graph == g)) {
    st.add_instance(depth, g.num_edges());
    auto r = std::make_shared<const CongestionApproximator>(build(g, depth, st));
    CacheEntry& fresh = cache_[d];  // build may have grown cache_
    fresh.key = key;
    fresh.graph = std::make_shared<const Graph>(g);
    fresh.r = std::move(r);
  }
  SolverParams sp = cfg_.solver;
  sp.epsilon = eps;
  sp.trace = depth == 0 ? cfg_.solver.trace : nullptr;
  const FlowCutSolution sol = approximator_max_flow(g, *cache_[d].r, sp, b);
  st.solver_iterations += sol.iterations;
  ++st.solver_calls;
  if (depth > 0 && !sol.converged) ++st.unconverged_inner_calls;
  return sol;
}

struct ComponentView {
  Graph graph;
  std::vector<Vertex> vertices;
  std::vector<EdgeId> edge_map;
};

ComponentView component_of(const Graph& g, const Components& comps,
                           std::int32_t c) {
  ComponentView view;
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    if (comps.label[v] == c) view.vertices.push_back(v);
  }
  view.graph = induced_subgraph(g, view.vertices, &view.edge_map);
  return view;
}

}  // namespace

CongestionApproximator build_congestion_approximator(
    const Graph& g, const RecursionConfig& config, RecursionStats* stats) {
  if (connected_components(g).count > 1) {
    throw std::invalid_argument("build_congestion_approximator: disconnected");
  }
  const auto start = std::chrono::steady_clock::now();
  RecursionStats st;
  Recursion rec(config, config.reference_vertices > 0
                            ? config.reference_vertices
                            : g.num_vertices());
  st.add_instance(0, g.num_edges());
  CongestionApproximator r = rec.build(g, 0, st);
  st.wall_seconds = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - start)
                        .count();
  if (stats) *stats = st;
  return r;
}

FlowCutSolution recursive_approx_max_flow(const Graph& g, double epsilon,
                                          std::span<const double> b,
                                          const RecursionConfig& config,
                                          RecursionStats* stats) {
  const auto start = std::chrono::steady_clock::now();
  const Vertex n = g.num_vertices();
  if (b.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("recursive_approx_max_flow: dimension mismatch");
  }
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("recursive_approx_max_flow: epsilon <= 0");
  }
  const double inf = std::numeric_limits<double>::infinity();
  RecursionStats st;
  FlowCutSolution out;
  out.flow.assign(static_cast<std::size_t>(g.num_edges()), 0.0);
  const Components comps = connected_components(g);
  std::vector<double> sums(static_cast<std::size_t>(comps.count), 0.0);
  std::vector<char> active(static_cast<std::size_t>(comps.count), 0);
  double scale = 0.0;
  for (Vertex v = 0; v < n; ++v) {
    sums[comps.label[v]] += b[v];
    if (b[v] != 0.0) active[comps.label[v]] = 1;
    scale = std::max(scale, std::abs(b[v]));
  }
  for (std::int32_t c = 0; c < comps.count; ++c) {
    if (std::abs(sums[c]) > 1e-9 * std::max(1.0, scale)) {
      std::vector<bool> mask(static_cast<std::size_t>(n));
      for (Vertex v = 0; v < n; ++v) mask[v] = comps.label[v] == c;
      out.cut = CutSet::from_mask(mask);
      out.flow_congestion = inf;
      out.cut_ratio = inf;
      out.epsilon_achieved = inf;
      out.infeasible = true;
      if (stats) *stats = st;
      return out;
    }
  }
  const Vertex nbar =
      config.reference_vertices > 0 ? config.reference_vertices : n;
  bool any = false;
  for (std::int32_t c = 0; c < comps.count; ++c) {
    if (!active[c]) continue;
    ComponentView view = component_of(g, comps, c);
    std::vector<double> bc(view.vertices.size());
    for (std::size_t i = 0; i < view.vertices.size(); ++i) {
      bc[i] = b[view.vertices[i]];
    }
    Recursion rec(config, nbar);
    const FlowCutSolution sol = rec.solve(view.graph, bc, epsilon, 0, st);
    out.iterations += sol.iterations;
    for (std::size_t i = 0; i < view.edge_map.size(); ++i) {
      out.flow[view.edge_map[i]] = sol.flow[i];
    }
    out.flow_congestion = std::max(out.flow_congestion, sol.flow_congestion);
    if (!any || sol.cut_ratio > out.cut_ratio) {
      std::vector<Vertex> cut;
      for (Vertex v : sol.cut.vertices()) cut.push_back(view.vertices[v]);
      out.cut = CutSet(std::move(cut));
      out.cut_ratio = sol.cut_ratio;
    }
    any = true;
  }
  if (!any) {
    out.cut = n >= 2 ? CutSet{0} : CutSet{};
    out.converged = true;
  } else {
    out.epsilon_achieved = out.flow_congestion / out.cut_ratio - 1.0;
    out.converged = out.flow_congestion <= (1.0 + epsilon) * out.cut_ratio;
  }
  st.top_converged = out.converged;
  st.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  if (stats) *stats = st;
  return out;
}

MaxFlowValue max_flow_value(const Graph& g, Vertex s, Vertex t, double epsilon,
                            const RecursionConfig& config,
                            RecursionStats* stats) {
  const auto start = std::chrono::steady_clock::now();
  const Vertex n = g.num_vertices();
  if (s < 0 || s >= n || t < 0 || t >= n) {
    throw std::out_of_range("max_flow_value: vertex out of range");
  }
  if (s == t) throw std::invalid_argument("max_flow_value: s == t");
  MaxFlowValue out;
  out.solution.flow.assign(static_cast<std::size_t>(g.num_edges()), 0.0);
  const Components comps = connected_components(g);
  if (comps.label[s] != comps.label[t]) {
    std::vector<bool> mask(static_cast<std::size_t>(n));
    for (Vertex v = 0; v < n; ++v) mask[v] = comps.label[v] == comps.label[s];
    out.solution.cut = CutSet::from_mask(mask);
    out.solution.converged = true;
    if (stats) *stats = RecursionStats{};
    return out;
  }
  RecursionStats st;
  ComponentView view = component_of(g, comps, comps.label[s]);
  const auto local_of = [&](Vertex v) {
    return static_cast<Vertex>(
        std::lower_bound(view.vertices.begin(), view.vertices.end(), v) -
        view.vertices.begin());
  };
  const Vertex ls = local_of(s);
  const Vertex lt = local_of(t);
  const Graph& h = view.graph;
  Recursion rec(config, config.reference_vertices > 0
                            ? config.reference_vertices
                            : n);

  // warm bounds: a max-bottleneck tree path and the smaller endpoint degree
  const RootedTree rt =
      root_tree(h, spanning_tree(h, TreeStrategy::kMaxCapacity), ls);
  double lo = std::numeric_limits<double>::infinity();
  for (Vertex v = lt; rt.parent[v] >= 0; v = rt.parent[v]) {
    lo = std::min(lo, h.edge(rt.parent_edge[v]).capacity);
  }
  double hi = std::min(h.weighted_degree(ls), h.weighted_degree(lt));
  FlowCutSolution best_flow;
  CutSet best_cut = CutSet{ls};
  double best_lo = 0.0;
  double flow_scale = 0.0;
  double f_value = std::sqrt(lo * hi);
  for (int step = 0; step < 60; ++step) {
    ++out.bisection_steps;
    const DemandVector b = st_demand(h.num_vertices(), ls, lt, f_value);
    const FlowCutSolution sol = rec.solve(h, b, epsilon, 0, st);
    const double feasible = f_value / sol.flow_congestion;
    if (feasible > best_lo) {
      best_lo = feasible;
      best_flow = sol;
      flow_scale = 1.0 / sol.flow_congestion;
    }
    const double cut_bound = f_value / sol.cut_ratio;
    if (cut_bound < hi) {
      hi = cut_bound;
      best_cut = sol.cut;
    }
    if (hi <= (1.0 + epsilon) * best_lo) break;
    f_value = std::sqrt(std::max(best_lo, lo) * hi);
  }
  out.value = best_lo;
  out.upper_bound = hi;
  FlowCutSolution& res = out.solution;
  for (std::size_t i = 0; i < view.edge_map.size(); ++i) {
    res.flow[view.edge_map[i]] = best_flow.flow[i] * flow_scale;
  }
  std::vector<Vertex> cut;
  for (Vertex v : best_cut.vertices()) cut.push_back(view.vertices[v]);
  res.cut = CutSet(std::move(cut));
  res.iterations = static_cast<int>(st.solver_iterations);
  res.flow_congestion = congestion(g, res.flow);
  const DemandVector b = st_demand(n, s, t, out.value);
  res.cut_ratio = std::abs(cut_demand(b, res.cut)) / cut_capacity(g, res.cut);
  res.epsilon_achieved = res.flow_congestion / res.cut_ratio - 1.0;
  res.converged = hi <= (1.0 + epsilon) * best_lo;
  st.top_converged = res.converged;
  st.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  if (stats) *stats = st;
  return out;
}

}  // namespace approxflow
