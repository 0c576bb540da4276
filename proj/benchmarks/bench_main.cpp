#include <benchmark/benchmark.h>

#include "approxflow/driver.hpp"
#include "approxflow/exact_oracle.hpp"
#include "approxflow/generators.hpp"
#include "approxflow/reduce.hpp"
#include "approxflow/sparsify.hpp"

using namespace approxflow;

namespace {

Graph square_grid(std::int64_t side) {
  return make_grid(static_cast<int>(side), static_cast<int>(side));
}

void BM_RecursiveSolve(benchmark::State& state) {
  const Graph g = square_grid(state.range(0));
  const DemandVector b = gaussian_demand(g.num_vertices(), 1);
  RecursionConfig cfg;
  for (auto _ : state) {
    const FlowCutSolution s = recursive_approx_max_flow(g, 0.2, b, cfg);
    benchmark::DoNotOptimize(s.flow_congestion);
  }
  state.counters["m"] = g.num_edges();
}
BENCHMARK(BM_RecursiveSolve)->Arg(16)->Arg(32)->Arg(45)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_BuildApproximator(benchmark::State& state) {
  const Graph g = square_grid(state.range(0));
  RecursionConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_congestion_approximator(g, cfg).num_rows());
  }
  state.counters["m"] = g.num_edges();
}
BENCHMARK(BM_BuildApproximator)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_ApplyTranspose(benchmark::State& state) {
  const Graph g = square_grid(state.range(0));
  const CongestionApproximator r = spanning_tree_approximator(g);
  const DemandVector b = gaussian_demand(g.num_vertices(), 2);
  std::vector<double> rows(static_cast<std::size_t>(r.num_rows()));
  std::vector<double> back(static_cast<std::size_t>(g.num_vertices()));
  for (auto _ : state) {
    r.apply(b, rows);
    r.transpose_apply(rows, back);
    benchmark::DoNotOptimize(back.data());
  }
  state.SetComplexityN(g.num_vertices());
}
BENCHMARK(BM_ApplyTranspose)->RangeMultiplier(2)->Range(16, 256)->Complexity();

void BM_UltraSparsify(benchmark::State& state) {
  const Graph g = generate(parse_generator_spec("random_gnm:" + std::to_string(state.range(0)) +
                                                "," + std::to_string(5 * state.range(0))),
                           3);
  for (auto _ : state) {
    const SparsifiedReduction sr = ultra_sparsify_and_reduce(g, 32.0, 1);
    benchmark::DoNotOptimize(sr.reduced.num_edges());
  }
}
BENCHMARK(BM_UltraSparsify)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_ExactMaxFlow(benchmark::State& state) {
  const Graph g = square_grid(state.range(0));
  const Vertex t = g.num_vertices() - 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(exact_max_flow_st(g, 0, t).value);
  }
}
BENCHMARK(BM_ExactMaxFlow)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
