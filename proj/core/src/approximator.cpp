#include "approxflow/approximator.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "approxflow/io.hpp"
#include "approxflow/sparsify.hpp"

namespace approxflow {

DecompositionTree DecompositionTree::from_parents(
    Vertex num_vertices, const std::vector<std::int32_t>& parent,
    const std::vector<std::int32_t>& leaf_of,
    std::vector<std::int32_t>* node_map) {
  const auto k = static_cast<std::int32_t>(parent.size());
  if (leaf_of.size() != static_cast<std::size_t>(num_vertices) || k == 0) {
    throw std::invalid_argument("from_parents: bad sizes");
  }
  std::int32_t root = -1;
  std::vector<std::vector<std::int32_t>> kids(static_cast<std::size_t>(k));
  for (std::int32_t i = 0; i < k; ++i) {
    if (parent[i] < 0) {
      if (root >= 0) throw std::invalid_argument("from_parents: two roots");
      root = i;
    } else {
      if (parent[i] >= k) throw std::invalid_argument("from_parents: bad parent");
      kids[parent[i]].push_back(i);
    }
  }
  if (root < 0) throw std::invalid_argument("from_parents: no root");

  std::vector<char> is_leaf(static_cast<std::size_t>(k), 0);
  for (Vertex v = 0; v < num_vertices; ++v) {
    const std::int32_t l = leaf_of[v];
    if (l < 0 || l >= k || is_leaf[l]) {
      throw std::invalid_argument("from_parents: leaf assignment invalid");
    }
    is_leaf[l] = 1;
  }
  // reachability, cycle check, leaf check
  std::vector<std::int32_t> order{root};
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::int32_t c : kids[order[i]]) order.push_back(c);
  }
  if (static_cast<std::int32_t>(order.size()) != k) {
    throw std::invalid_argument("from_parents: not a tree");
  }
  for (std::int32_t i = 0; i < k; ++i) {
    if (kids[i].empty() != static_cast<bool>(is_leaf[i])) {
      throw std::invalid_argument("from_parents: leaves must be vertex leaves");
    }
  }

  // Single-child nodes collapse onto their child.
  std::vector<std::int32_t> rep(static_cast<std::size_t>(k), -1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const std::int32_t x = *it;
    rep[x] = kids[x].size() == 1 ? rep[kids[x][0]] : x;
  }

  DecompositionTree t;
  t.num_vertices_ = num_vertices;
  std::vector<std::int32_t> new_id(static_cast<std::size_t>(k), -1);
  std::vector<std::int32_t> queue{rep[root]};
  new_id[rep[root]] = 0;
  t.nodes_.push_back({-1, 0.0, 0, 0});
  for (std::size_t i = 0; i < queue.size(); ++i) {
    const std::int32_t x = queue[i];
    for (std::int32_t c : kids[x]) {
      const std::int32_t r = rep[c];
      new_id[r] = static_cast<std::int32_t>(t.nodes_.size());
      t.nodes_.push_back(
          {new_id[x], 0.0, 0, t.nodes_[new_id[x]].level + 1});
      queue.push_back(r);
    }
  }
  t.leaf_of_.resize(static_cast<std::size_t>(num_vertices));
  for (Vertex v = 0; v < num_vertices; ++v) {
    t.leaf_of_[v] = new_id[leaf_of[v]];
    t.nodes_[t.leaf_of_[v]].member_count = 1;
  }
  for (auto i = t.num_nodes() - 1; i > 0; --i) {
    t.nodes_[t.nodes_[i].parent].member_count += t.nodes_[i].member_count;
  }
  t.depth_ = 0;
  for (const ClusterNode& c : t.nodes_) t.depth_ = std::max(t.depth_, c.level + 1);
  if (node_map) {
    node_map->assign(static_cast<std::size_t>(k), -1);
    for (std::int32_t i = 0; i < k; ++i) (*node_map)[i] = new_id[rep[i]];
  }
  return t;
}

void DecompositionTree::assign_capacities(const Graph& g) {
  if (g.num_vertices() != num_vertices_) {
    throw std::invalid_argument("assign_capacities: vertex count mismatch");
  }
  const std::int32_t k = num_nodes();
  int lg = 1;
  while ((1 << lg) < std::max(depth_, 2)) ++lg;
  std::vector<std::vector<std::int32_t>> up(
      static_cast<std::size_t>(lg), std::vector<std::int32_t>(k, 0));
  for (std::int32_t i = 0; i < k; ++i) up[0][i] = std::max(nodes_[i].parent, 0);
  for (int j = 1; j < lg; ++j) {
    for (std::int32_t i = 0; i < k; ++i) up[j][i] = up[j - 1][up[j - 1][i]];
  }
  auto lca = [&](std::int32_t a, std::int32_t b) {
    if (nodes_[a].level < nodes_[b].level) std::swap(a, b);
    int diff = nodes_[a].level - nodes_[b].level;
    for (int j = 0; diff > 0; ++j, diff >>= 1) {
      if (diff & 1) a = up[j][a];
    }
    if (a == b) return a;
    for (int j = lg - 1; j >= 0; --j) {
      if (up[j][a] != up[j][b]) {
        a = up[j][a];
        b = up[j][b];
      }
    }
    return nodes_[a].parent;
  };
  std::vector<double> cap(static_cast<std::size_t>(k), 0.0);
  std::vector<double> vol(static_cast<std::size_t>(k), 0.0);
  for (const Edge& e : g.edges()) {
    const std::int32_t a = leaf_of_[e.tail];
    const std::int32_t b = leaf_of_[e.head];
    cap[a] += e.capacity;
    cap[b] += e.capacity;
    cap[lca(a, b)] -= 2.0 * e.capacity;
    vol[a] += e.capacity;
    vol[b] += e.capacity;
  }
  for (std::int32_t i = k - 1; i > 0; --i) {
    cap[nodes_[i].parent] += cap[i];
    vol[nodes_[i].parent] += vol[i];
  }
  for (std::int32_t i = 0; i < k; ++i) {
    // cancellation noise on clusters that are really closed components
    nodes_[i].boundary_capacity = cap[i] <= 1e-12 * vol[i] ? 0.0 : cap[i];
  }
  nodes_[0].boundary_capacity = 0.0;
}

std::vector<std::int32_t> DecompositionTree::children(std::int32_t id) const {
  std::vector<std::int32_t> out;
  for (std::int32_t i = id + 1; i < num_nodes(); ++i) {
    if (nodes_[i].parent == id) out.push_back(i);
  }
  return out;
}

std::vector<Vertex> DecompositionTree::members(std::int32_t id) const {
  std::vector<char> inside(nodes_.size(), 0);
  inside[id] = 1;
  for (std::int32_t i = id + 1; i < num_nodes(); ++i) {
    inside[i] = inside[nodes_[i].parent];
  }
  std::vector<Vertex> out;
  for (Vertex v = 0; v < num_vertices_; ++v) {
    if (inside[leaf_of_[v]]) out.push_back(v);
  }
  return out;
}

bool DecompositionTree::audit_partition() const {
  if (nodes_.empty() || nodes_[0].parent != -1) return false;
  std::vector<std::int32_t> count(nodes_.size(), 0);
  std::vector<std::int32_t> kid_count(nodes_.size(), 0);
  for (std::int32_t i = 1; i < num_nodes(); ++i) {
    if (nodes_[i].parent < 0 || nodes_[i].parent >= i) return false;
    ++kid_count[nodes_[i].parent];
  }
  std::vector<char> seen(nodes_.size(), 0);
  for (Vertex v = 0; v < num_vertices_; ++v) {
    const std::int32_t l = leaf_of_[v];
    if (l < 0 || l >= num_nodes() || seen[l] || kid_count[l] != 0) return false;
    seen[l] = 1;
    count[l] = 1;
  }
  for (std::int32_t i = num_nodes() - 1; i >= 0; --i) {
    if (kid_count[i] == 0 && !seen[i]) return false;
    if (count[i] != nodes_[i].member_count) return false;
    if (i > 0) count[nodes_[i].parent] += count[i];
  }
  return nodes_[0].member_count == num_vertices_;
}

void DecompositionTree::write(std::ostream& out) const {
  for (std::int32_t i = 0; i < num_nodes(); ++i) {
    out << "t " << i << ' ' << nodes_[i].parent << ' '
        << format_double(nodes_[i].boundary_capacity) << ' '
        << nodes_[i].member_count << '\n';
  }
  for (Vertex v = 0; v < num_vertices_; ++v) {
    out << "l " << v + 1 << ' ' << leaf_of_[v] << '\n';
  }
}

DecompositionTree DecompositionTree::read(std::istream& in) {
  std::vector<std::int32_t> parent;
  std::vector<double> caps;
  std::vector<std::pair<long long, std::int32_t>> leaves;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag == "c") continue;
    if (tag == "t") {
      long long id = 0, par = 0, count = 0;
      double cap = 0.0;
      if (!(ls >> id >> par >> cap >> count) ||
          id != static_cast<long long>(parent.size()) || par >= id) {
        throw ParseError(line_no, "bad tree node line");
      }
      parent.push_back(static_cast<std::int32_t>(par));
      caps.push_back(cap);
    } else if (tag == "l") {
      long long v = 0, leaf = 0;
      if (!(ls >> v >> leaf) || v < 1) throw ParseError(line_no, "bad leaf line");
      leaves.emplace_back(v - 1, static_cast<std::int32_t>(leaf));
    } else {
      throw ParseError(line_no, "unrecognized line");
    }
  }
  std::vector<std::int32_t> leaf_of(leaves.size(), -1);
  for (const auto& [v, leaf] : leaves) {
    if (v >= static_cast<long long>(leaves.size())) {
      throw ParseError(line_no, "leaf vertex out of range");
    }
    leaf_of[v] = leaf;
  }
  std::vector<std::int32_t> map;
  DecompositionTree t = from_parents(static_cast<Vertex>(leaf_of.size()),
                                     parent, leaf_of, &map);
  for (std::size_t i = 0; i < map.size(); ++i) {
    t.nodes_[map[i]].boundary_capacity = caps[i];
  }
  return t;
}

CongestionApproximator::CongestionApproximator(DecompositionTree tree,
                                               double quality)
    : tree_(std::move(tree)), quality_(quality) {
  inv_capacity_.assign(static_cast<std::size_t>(tree_.num_nodes()), 0.0);
  for (std::int32_t i = 1; i < tree_.num_nodes(); ++i) {
    const double c = tree_.node(i).boundary_capacity;
    inv_capacity_[i] = c > 0.0 ? 1.0 / c : 0.0;
  }
}

CongestionApproximator::CongestionApproximator(
    const CongestionApproximator& other)
    : tree_(other.tree_),
      inv_capacity_(other.inv_capacity_),
      quality_(other.quality_),
      ops_(other.ops_.load()) {}

CongestionApproximator& CongestionApproximator::operator=(
    const CongestionApproximator& other) {
  tree_ = other.tree_;
  inv_capacity_ = other.inv_capacity_;
  quality_ = other.quality_;
  ops_ = other.ops_.load();
  return *this;
}

CongestionApproximator::CongestionApproximator(
    CongestionApproximator&& other) noexcept
    : tree_(std::move(other.tree_)),
      inv_capacity_(std::move(other.inv_capacity_)),
      quality_(other.quality_),
      ops_(other.ops_.load()) {}

CongestionApproximator& CongestionApproximator::operator=(
    CongestionApproximator&& other) noexcept {
  tree_ = std::move(other.tree_);
  inv_capacity_ = std::move(other.inv_capacity_);
  quality_ = other.quality_;
  ops_ = other.ops_.load();
  return *this;
}

void CongestionApproximator::validate(std::size_t got, std::size_t want,
                                      const char* what) const {
  if (got != want) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
  }
}

void CongestionApproximator::apply(std::span<const double> b,
                                   std::span<double> rows) const {
  validate(b.size(), static_cast<std::size_t>(num_vertices()), "apply");
  validate(rows.size(), static_cast<std::size_t>(std::max(num_rows(), 0)),
           "apply");
  const std::int32_t k = tree_.num_nodes();
  std::vector<double> agg(static_cast<std::size_t>(k), 0.0);
  for (Vertex v = 0; v < num_vertices(); ++v) agg[tree_.leaf_of(v)] += b[v];
  for (std::int32_t i = k - 1; i > 0; --i) {
    agg[tree_.node(i).parent] += agg[i];
    if (inv_capacity_[i] > 0.0) {
      rows[i - 1] = agg[i] * inv_capacity_[i];
    } else {
      rows[i - 1] = agg[i] == 0.0 ? 0.0
                    : agg[i] > 0.0 ? std::numeric_limits<double>::infinity()
                                   : -std::numeric_limits<double>::infinity();
    }
  }
  ops_.fetch_add(static_cast<std::uint64_t>(num_vertices() + k),
                 std::memory_order_relaxed);
}

std::vector<double> CongestionApproximator::apply(
    std::span<const double> b) const {
  std::vector<double> rows(static_cast<std::size_t>(std::max(num_rows(), 0)));
  apply(b, rows);
  return rows;
}

void CongestionApproximator::transpose_apply(std::span<const double> y,
                                             std::span<double> out) const {
  validate(y.size(), static_cast<std::size_t>(std::max(num_rows(), 0)),
           "transpose_apply");
  validate(out.size(), static_cast<std::size_t>(num_vertices()),
           "transpose_apply");
  const std::int32_t k = tree_.num_nodes();
  std::vector<double> acc(static_cast<std::size_t>(k), 0.0);
  for (std::int32_t i = 1; i < k; ++i) {
    acc[i] = acc[tree_.node(i).parent] + y[i - 1] * inv_capacity_[i];
  }
  for (Vertex v = 0; v < num_vertices(); ++v) out[v] = acc[tree_.leaf_of(v)];
  ops_.fetch_add(static_cast<std::uint64_t>(num_vertices() + k),
                 std::memory_order_relaxed);
}

std::vector<double> CongestionApproximator::transpose_apply(
    std::span<const double> y) const {
  std::vector<double> out(static_cast<std::size_t>(num_vertices()));
  transpose_apply(y, out);
  return out;
}

CongestionApproximator::RowMax CongestionApproximator::max_abs_row(
    std::span<const double> b) const {
  RowMax best;
  const std::vector<double> rows = apply(b);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (best.row < 0 || std::abs(rows[i]) > best.value) {
      best.value = std::abs(rows[i]);
      best.row = static_cast<std::int32_t>(i);
    }
  }
  return best;
}

CutSet CongestionApproximator::row_cut(std::int32_t row) const {
  if (row < 0 || row >= num_rows()) {
    throw std::out_of_range("row_cut: row out of range");
  }
  return CutSet(tree_.members(row + 1));
}

CongestionApproximator spanning_tree_approximator(const Graph& g) {
  const Vertex n = g.num_vertices();
  const std::vector<EdgeId> tree =
      spanning_tree(g, TreeStrategy::kMaxCapacity);
  const RootedTree rt = root_tree(g, tree, 0);
  // node v: subtree of vertex v (node 0 = all of V); node n + v: leaf {v}
  std::vector<std::int32_t> parent(2 * static_cast<std::size_t>(n));
  std::vector<std::int32_t> leaf_of(static_cast<std::size_t>(n));
  for (Vertex v = 0; v < n; ++v) {
    parent[v] = rt.parent[v];
    parent[n + v] = v;
    leaf_of[v] = n + v;
  }
  std::vector<std::int32_t> map;
  DecompositionTree t =
      DecompositionTree::from_parents(n, parent, leaf_of, &map);
  t.assign_capacities(g);
  double quality = 1.0;
  for (Vertex v = 0; v < n; ++v) {
    if (rt.parent[v] < 0) continue;
    const double ue = g.edge(rt.parent_edge[v]).capacity;
    quality = std::max(quality, t.node(map[v]).boundary_capacity / ue);
  }
  return CongestionApproximator(std::move(t), quality);
}

std::vector<double> materialize(const CongestionApproximator& r) {
  const auto n = static_cast<std::size_t>(r.num_vertices());
  const auto rows = static_cast<std::size_t>(std::max(r.num_rows(), 0));
  std::vector<double> dense(rows * n, 0.0);
  std::vector<double> e(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    e[v] = 1.0;
    const std::vector<double> col = r.apply(e);
    for (std::size_t i = 0; i < rows; ++i) dense[i * n + v] = col[i];
    e[v] = 0.0;
  }
  return dense;
}

}  // namespace approxflow
