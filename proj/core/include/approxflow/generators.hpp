#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "approxflow/graph.hpp"

namespace approxflow {

enum class Family { kPath, kGrid2d, kRandomGnm, kExpanderLike, kTreePlusNoise };

struct CapacitySpec {
  enum class Kind { kUnit, kUniform, kList };
  Kind kind = Kind::kUnit;
  double lo = 1.0;
  double hi = 1.0;
  std::vector<double> values;  // kList: one per edge in generation order
};

// Family parameters:
//   path:            {n}
//   grid2d:          {rows, cols}
//   random_gnm:      {n, m}
//   expander_like:   {n, degree}   (union of degree/2 random Hamiltonian cycles)
//   tree_plus_noise: {n, extra_edges}
struct GeneratorSpec {
  Family family = Family::kPath;
  std::vector<long long> params;
  CapacitySpec capacities;
};

// Deterministic for a fixed (spec, seed). Outputs are connected: random
// families are augmented with linking edges when sampling leaves several
// components. Throws std::invalid_argument on invalid parameters.
Graph generate(const GeneratorSpec& spec, std::uint64_t seed);

// "FAMILY:PARAMS[@CAPS]", e.g. "grid2d:4x4", "path:3@list:2,1",
// "random_gnm:10,20@uniform:0.1:10". PARAMS are separated by ',' or 'x'.
GeneratorSpec parse_generator_spec(std::string_view text);

std::string family_name(Family family);

Graph make_path(const std::vector<double>& capacities);
Graph make_grid(int rows, int cols, double capacity = 1.0);

// Zero-sum demand helpers used by tests, the CLI and benchmarks.
DemandVector st_demand(Vertex num_vertices, Vertex s, Vertex t,
                       double amount = 1.0);
DemandVector gaussian_demand(Vertex num_vertices, std::uint64_t seed);

}  // namespace approxflow
