#include "approxflow/generators.hpp"

#include <charconv>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "approxflow/rng.hpp"

namespace approxflow {
namespace {

struct EndpointPair {
  Vertex a;
  Vertex b;
};

// Links the components of (n, pairs) by appending one edge between random
// members of consecutive components.
void connect_components(Vertex n, std::vector<EndpointPair>& pairs, Rng& rng) {
  std::vector<Vertex> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](Vertex x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const EndpointPair& p : pairs) parent[find(p.a)] = find(p.b);
  std::vector<std::vector<Vertex>> members(static_cast<std::size_t>(n));
  for (Vertex v = 0; v < n; ++v) members[find(v)].push_back(v);
  std::vector<const std::vector<Vertex>*> comps;
  for (const auto& m : members) {
    if (!m.empty()) comps.push_back(&m);
  }
  for (std::size_t i = 1; i < comps.size(); ++i) {
    const auto& prev = *comps[i - 1];
    const auto& cur = *comps[i];
    pairs.push_back({prev[rng.below(prev.size())], cur[rng.below(cur.size())]});
  }
}

Graph assemble(Vertex n, const std::vector<EndpointPair>& pairs,
               const CapacitySpec& caps, Rng& rng) {
  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    double cap = 1.0;
    switch (caps.kind) {
      case CapacitySpec::Kind::kUnit:
        break;
      case CapacitySpec::Kind::kUniform:
        cap = rng.uniform(caps.lo, caps.hi);
        break;
      case CapacitySpec::Kind::kList:
        if (i >= caps.values.size()) {
          throw std::invalid_argument("capacity list shorter than edge count");
        }
        cap = caps.values[i];
        break;
    }
    edges.push_back({pairs[i].a, pairs[i].b, cap});
  }
  return Graph(n, std::move(edges));
}

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

std::vector<EndpointPair> path_pairs(long long n) {
  std::vector<EndpointPair> pairs;
  for (Vertex v = 0; v + 1 < n; ++v) pairs.push_back({v, v + 1});
  return pairs;
}

std::vector<EndpointPair> grid_pairs(long long rows, long long cols) {
  std::vector<EndpointPair> pairs;
  for (long long r = 0; r < rows; ++r) {
    for (long long c = 0; c < cols; ++c) {
      const auto v = static_cast<Vertex>(r * cols + c);
      if (c + 1 < cols) pairs.push_back({v, v + 1});
      if (r + 1 < rows) pairs.push_back({v, static_cast<Vertex>(v + cols)});
    }
  }
  return pairs;
}

std::vector<EndpointPair> random_tree_pairs(Vertex n, Rng& rng) {
  std::vector<Vertex> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  std::vector<EndpointPair> pairs;
  for (Vertex i = 1; i < n; ++i) {
    pairs.push_back({order[rng.below(static_cast<std::uint64_t>(i))], order[i]});
  }
  return pairs;
}

void add_random_pairs(Vertex n, long long count,
                      std::vector<EndpointPair>& pairs, Rng& rng) {
  for (long long k = 0; k < count;) {
    const auto a = static_cast<Vertex>(rng.below(static_cast<std::uint64_t>(n)));
    const auto b = static_cast<Vertex>(rng.below(static_cast<std::uint64_t>(n)));
    if (a == b) continue;
    pairs.push_back({a, b});
    ++k;
  }
}

double parse_double_token(std::string_view tok) {
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw std::invalid_argument("invalid number '" + std::string(tok) + "'");
  }
  return value;
}

std::vector<std::string_view> split_any(std::string_view text,
                                        std::string_view seps) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || seps.find(text[i]) != std::string_view::npos) {
      if (i > start) out.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

}  // namespace

Graph generate(const GeneratorSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  const auto& p = spec.params;
  switch (spec.family) {
    case Family::kPath: {
      require(p.size() == 1 && p[0] >= 2, "path needs n >= 2");
      return assemble(static_cast<Vertex>(p[0]), path_pairs(p[0]),
                      spec.capacities, rng);
    }
    case Family::kGrid2d: {
      require(p.size() == 2 && p[0] >= 2 && p[1] >= 2,
              "grid2d needs rows, cols >= 2");
      return assemble(static_cast<Vertex>(p[0] * p[1]), grid_pairs(p[0], p[1]),
                      spec.capacities, rng);
    }
    case Family::kRandomGnm: {
      require(p.size() == 2 && p[0] >= 2 && p[1] >= 1,
              "random_gnm needs n >= 2, m >= 1");
      const auto n = static_cast<Vertex>(p[0]);
      std::vector<EndpointPair> pairs;
      add_random_pairs(n, p[1], pairs, rng);
      connect_components(n, pairs, rng);
      return assemble(n, pairs, spec.capacities, rng);
    }
    case Family::kExpanderLike: {
      require(p.size() == 2 && p[0] >= 3 && p[1] >= 2 && p[1] % 2 == 0,
              "expander_like needs n >= 3 and an even degree >= 2");
      const auto n = static_cast<Vertex>(p[0]);
      std::vector<EndpointPair> pairs;
      std::vector<Vertex> order(static_cast<std::size_t>(n));
      for (long long c = 0; c < p[1] / 2; ++c) {
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(order);
        for (Vertex i = 0; i < n; ++i) {
          pairs.push_back({order[i], order[(i + 1) % n]});
        }
      }
      return assemble(n, pairs, spec.capacities, rng);
    }
    case Family::kTreePlusNoise: {
      require(p.size() == 2 && p[0] >= 2 && p[1] >= 0,
              "tree_plus_noise needs n >= 2, extra >= 0");
      const auto n = static_cast<Vertex>(p[0]);
      std::vector<EndpointPair> pairs = random_tree_pairs(n, rng);
      add_random_pairs(n, p[1], pairs, rng);
      return assemble(n, pairs, spec.capacities, rng);
    }
  }
  throw std::invalid_argument("unknown family");
}

std::string family_name(Family family) {
  switch (family) {
    case Family::kPath:
      return "path";
    case Family::kGrid2d:
      return "grid2d";
    case Family::kRandomGnm:
      return "random_gnm";
    case Family::kExpanderLike:
      return "expander_like";
    case Family::kTreePlusNoise:
      return "tree_plus_noise";
  }
  return "unknown";
}

GeneratorSpec parse_generator_spec(std::string_view text) {
  GeneratorSpec spec;
  const std::size_t at = text.find('@');
  std::string_view head = text.substr(0, at);
  const std::size_t colon = head.find(':');
  if (colon == std::string_view::npos) {
    throw std::invalid_argument("generator spec must be FAMILY:PARAMS");
  }
  const std::string_view name = head.substr(0, colon);
  bool found = false;
  for (Family f : {Family::kPath, Family::kGrid2d, Family::kRandomGnm,
                   Family::kExpanderLike, Family::kTreePlusNoise}) {
    if (family_name(f) == name) {
      spec.family = f;
      found = true;
    }
  }
  if (!found) {
    throw std::invalid_argument("unknown family '" + std::string(name) + "'");
  }
  for (std::string_view tok : split_any(head.substr(colon + 1), ",x")) {
    spec.params.push_back(static_cast<long long>(parse_double_token(tok)));
  }
  if (at != std::string_view::npos) {
    const std::string_view caps = text.substr(at + 1);
    const auto parts = split_any(caps, ":");
    if (parts.empty()) throw std::invalid_argument("empty capacity spec");
    if (parts[0] == "unit" && parts.size() == 1) {
      spec.capacities.kind = CapacitySpec::Kind::kUnit;
    } else if (parts[0] == "uniform" && parts.size() == 3) {
      spec.capacities.kind = CapacitySpec::Kind::kUniform;
      spec.capacities.lo = parse_double_token(parts[1]);
      spec.capacities.hi = parse_double_token(parts[2]);
      require(spec.capacities.lo > 0 && spec.capacities.hi >= spec.capacities.lo,
              "uniform capacities need 0 < lo <= hi");
    } else if (parts[0] == "list" && parts.size() == 2) {
      spec.capacities.kind = CapacitySpec::Kind::kList;
      for (std::string_view tok : split_any(parts[1], ",")) {
        spec.capacities.values.push_back(parse_double_token(tok));
      }
    } else {
      throw std::invalid_argument("capacity spec must be unit, uniform:LO:HI "
                                  "or list:C1,C2,...");
    }
  }
  return spec;
}

Graph make_path(const std::vector<double>& capacities) {
  GeneratorSpec spec{Family::kPath,
                     {static_cast<long long>(capacities.size()) + 1},
                     {CapacitySpec::Kind::kList, 1.0, 1.0, capacities}};
  return generate(spec, 0);
}

Graph make_grid(int rows, int cols, double capacity) {
  GeneratorSpec spec{Family::kGrid2d,
                     {rows, cols},
                     {CapacitySpec::Kind::kUniform, capacity, capacity, {}}};
  return generate(spec, 0);
}

DemandVector st_demand(Vertex num_vertices, Vertex s, Vertex t, double amount) {
  DemandVector b(static_cast<std::size_t>(num_vertices), 0.0);
  b[s] += amount;
  b[t] -= amount;
  return b;
}

DemandVector gaussian_demand(Vertex num_vertices, std::uint64_t seed) {
  Rng rng(seed);
  DemandVector b(static_cast<std::size_t>(num_vertices));
  double mean = 0.0;
  for (double& x : b) {
    x = rng.normal();
    mean += x;
  }
  mean /= std::max<Vertex>(num_vertices, 1);
  for (double& x : b) x -= mean;
  return b;
}

}  // namespace approxflow
