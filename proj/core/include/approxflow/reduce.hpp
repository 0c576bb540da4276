#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "approxflow/approximator.hpp"
#include "approxflow/graph.hpp"
#include "approxflow/sparsify.hpp"

namespace approxflow {

struct EliminationRecord {
  enum class Kind { kDegree1, kDegree2 };
  Kind kind = Kind::kDegree1;
  Vertex vertex = 0;
  // Degree1: the only neighbor. Degree2: the neighbor across the
  // larger-capacity edge, which absorbs the vertex.
  Vertex kept_neighbor = 0;
  double edge_capacity = 0.0;  // Degree1 only
  // Degree2 only; neighbors[i] is reached through original_capacities[i].
  std::array<Vertex, 2> neighbors{};
  std::array<double, 2> original_capacities{};
  double merged_edge_capacity = 0.0;
};

struct ReductionMap {
  Vertex original_vertices = 0;
  std::vector<EliminationRecord> eliminated;
  // Original vertex -> vertex of the reduced graph (surviving vertices are
  // renumbered in ascending order of their original ids).
  std::vector<Vertex> vertex_map;
  std::vector<Vertex> survivors;  // reduced id -> original id
};

struct Reduction {
  Graph reduced;
  ReductionMap map;
};

// Eliminates vertices with one incident edge and splices vertices with two
// incident edges to two distinct neighbors (the pair becomes one edge of the
// smaller capacity, and the vertex joins the neighbor across the larger
// one). A min-heap on vertex ids decides the order. Every cut of the reduced
// graph equals the cut of its preimage in h. Throws std::invalid_argument
// for a disconnected h and std::logic_error if the size bound
// |E'| <= 4 (|E_h| - n + 1) fails.
Reduction reduce(const Graph& h);

// Re-applies the records to h and rebuilds the reduced graph; the replay
// audit compares the result with reduce(h).reduced. Throws
// std::invalid_argument if a record does not match the graph state.
Graph replay(const Graph& h, const ReductionMap& map);

// Multiplier on the lifted operator's quality field.
inline constexpr double kLiftConstant = 2.0;

// Lifts an approximator of the reduced graph to h: every cluster of r_reduced
// is replaced by its preimage, and every eliminated vertex adds the cluster
// of original vertices it had absorbed when it was removed. All boundary
// capacities are recomputed on h, so every row is a true cut ratio of h.
CongestionApproximator convert(const ReductionMap& map,
                               const CongestionApproximator& r_reduced,
                               const Graph& h);

struct ComposedMap {
  UltraSparsifier ultra;
  ReductionMap reduction;
  double kappa = 0.0;
};

struct SparsifiedReduction {
  Graph reduced;
  ComposedMap map;
};

SparsifiedReduction ultra_sparsify_and_reduce(const Graph& g, double kappa,
                                              std::uint64_t seed,
                                              const SparsifyParams& params = {});

// As convert, with the clusters priced on g itself and the quality field
// multiplied by kappa.
CongestionApproximator convert_composed(const ComposedMap& map,
                                        const CongestionApproximator& r_reduced,
                                        const Graph& g);

}  // namespace approxflow
