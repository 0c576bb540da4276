#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "approxflow/driver.hpp"
#include "approxflow/exact_oracle.hpp"
#include "approxflow/generators.hpp"

using namespace approxflow;

namespace {

RecursionConfig small_config() {
  RecursionConfig cfg;
  cfg.base_case_edges = 60;
  return cfg;
}

}  // namespace

TEST(Driver, BaseCaseMatchesOracle) {
  const Graph g = generate(parse_generator_spec("random_gnm:12,30@uniform:0.1:10"), 3);
  RecursionStats st;
  const DemandVector b = gaussian_demand(12, 5);
  const FlowCutSolution s = recursive_approx_max_flow(g, 0.1, b, {}, &st);
  ASSERT_TRUE(s.converged);
  const double opt = exact_opt_congestion(g, b).value;
  EXPECT_LE(s.flow_congestion, 1.1 * opt * (1 + 1e-9));
  EXPECT_LE(s.cut_ratio, opt * (1 + 1e-9));
  EXPECT_EQ(st.base_cases, 1);
  EXPECT_EQ(st.max_depth_reached, 0);
  EXPECT_TRUE(st.top_converged);
}

TEST(Driver, BaseCaseManySeeds) {
  int ok = 0;
  for (std::uint64_t seed = 1; seed <= 500; ++seed) {
    const int n = 4 + static_cast<int>(seed % 9);
    const int m = std::min(n * (n - 1) / 2, 2 * n);
    const Graph g = generate(parse_generator_spec("random_gnm:" + std::to_string(n) + "," +
                                                  std::to_string(m) + "@uniform:0.1:10"),
                             seed);
    const DemandVector b = gaussian_demand(n, seed + 1000);
    RecursionConfig cfg;
    cfg.seed = seed;
    const FlowCutSolution s = recursive_approx_max_flow(g, 0.1, b, cfg);
    const double opt = exact_opt_congestion(g, b).value;
    if (s.converged && s.flow_congestion <= 1.1 * opt * (1 + 1e-9) &&
        s.cut_ratio <= opt * (1 + 1e-9)) {
      ++ok;
    }
  }
  EXPECT_EQ(ok, 500);
}

TEST(Driver, GridRecursesAndConverges) {
  const Graph g = make_grid(16, 16);
  RecursionConfig cfg;
  cfg.base_case_edges = 100;
  RecursionStats st;
  const DemandVector b = st_demand(256, 0, 255, 1.0);
  const FlowCutSolution s = recursive_approx_max_flow(g, 0.1, b, cfg, &st);
  ASSERT_TRUE(s.converged);
  const double opt = exact_opt_congestion(g, b).value;
  EXPECT_NEAR(opt, 0.5, 1e-9);
  EXPECT_LE(s.flow_congestion, 1.1 * opt * (1 + 1e-9));
  EXPECT_LE(validate_flow(g, s.flow, b).max_conservation_residual, 1e-7);
  EXPECT_GE(st.max_depth_reached + 1, 2);
  EXPECT_TRUE(st.shrink_ok());
  EXPECT_TRUE(st.total_ok(g.num_edges()));
  EXPECT_FALSE(st.shrinks.empty());
}

TEST(Driver, ApproximatorIsSoundAfterLifting) {
  const Graph g = generate(parse_generator_spec("random_gnm:12,60@uniform:0.1:10"), 8);
  RecursionConfig cfg;
  cfg.base_case_edges = 20;
  RecursionStats st;
  const CongestionApproximator r = build_congestion_approximator(g, cfg, &st);
  EXPECT_TRUE(r.tree().audit_partition());
  EXPECT_GE(r.quality(), 1.0);
  for (int k = 0; k < 40; ++k) {
    const DemandVector b = gaussian_demand(12, 100 + k);
    EXPECT_LE(r.max_abs_row(b).value, exact_opt_congestion(g, b).value * (1 + 1e-7));
  }
}

TEST(Driver, StatsBookkeeping) {
  RecursionStats a;
  a.add_instance(0, 100);
  a.add_instance(1, 40);
  a.add_instance(1, 10);
  EXPECT_EQ(a.instances_per_depth, (std::vector<int>{1, 2}));
  EXPECT_EQ(a.total_recursed_edges, 50);
  EXPECT_TRUE(a.total_ok(100));
  a.add_instance(2, 200);
  EXPECT_FALSE(a.total_ok(100));
  RecursionStats b;
  b.shrinks.push_back({0, 100, 50, 4.0, 8.0, 1, 30});
  EXPECT_FALSE(b.shrink_ok());
  b.shrinks[0].reduced_edges = 10;
  EXPECT_TRUE(b.shrink_ok());
}

TEST(MaxFlowValue, SmallExamples) {
  const RecursionConfig cfg = small_config();
  const MaxFlowValue e = max_flow_value(Graph(2, {{0, 1, 5.0}}), 0, 1, 0.1, cfg);
  EXPECT_LE(e.value, 5.0 * (1 + 1e-9));
  EXPECT_GE(e.value * 1.1, 5.0 * (1 - 1e-9));
  const MaxFlowValue p = max_flow_value(make_path({2.0, 1.0}), 0, 2, 0.1, cfg);
  EXPECT_LE(p.value, 1.0 + 1e-9);
  EXPECT_GE(p.value * 1.1, 1.0 - 1e-9);
  EXPECT_GE(p.upper_bound, 1.0 - 1e-9);
}

TEST(MaxFlowValue, GridCornersAgainstExact) {
  const Graph g = make_grid(8, 8);
  const double exact = exact_max_flow_st(g, 0, 63).value;
  const MaxFlowValue r = max_flow_value(g, 0, 63, 0.1, small_config());
  EXPECT_LE(r.value, exact * (1 + 1e-9));
  EXPECT_GE(r.value * 1.1, exact * (1 - 1e-9));
  EXPECT_GE(r.upper_bound, exact * (1 - 1e-9));
  EXPECT_LE(r.upper_bound, r.value * 1.1 * (1 + 1e-9));
  EXPECT_GE(cut_capacity(g, r.solution.cut), exact * (1 - 1e-9));
  EXPECT_LE(validate_flow(g, r.solution.flow, st_demand(64, 0, 63, r.value))
                .max_conservation_residual,
            1e-7 * (1 + r.value));
}

TEST(MaxFlowValue, DisconnectedTerminals) {
  const Graph g(4, {{0, 1, 1.0}, {2, 3, 1.0}});
  const MaxFlowValue r = max_flow_value(g, 0, 3, 0.1, {});
  EXPECT_EQ(r.value, 0.0);
  EXPECT_EQ(r.solution.cut, (CutSet{0, 1}));
  EXPECT_THROW(max_flow_value(g, 1, 1, 0.1, {}), std::invalid_argument);
}

TEST(Driver, DisconnectedGraphPerComponent) {
  const Graph g(4, {{0, 1, 1.0}, {2, 3, 2.0}});
  const DemandVector b{1, -1, 1, -1};
  const FlowCutSolution s = recursive_approx_max_flow(g, 0.1, b, {});
  ASSERT_TRUE(s.converged);
  EXPECT_NEAR(s.flow_congestion, 1.0, 0.1);
  EXPECT_LE(validate_flow(g, s.flow, b).max_conservation_residual, 1e-7);
  const FlowCutSolution bad = recursive_approx_max_flow(g, 0.1, DemandVector{1, 0, -1, 0}, {});
  EXPECT_TRUE(bad.infeasible);
  EXPECT_THROW(build_congestion_approximator(g, {}), std::invalid_argument);
}

TEST(Driver, Deterministic) {
  const Graph g = make_grid(12, 12);
  RecursionConfig cfg;
  cfg.base_case_edges = 80;
  cfg.seed = 42;
  const DemandVector b = gaussian_demand(144, 1);
  const FlowCutSolution a = recursive_approx_max_flow(g, 0.2, b, cfg);
  const FlowCutSolution c = recursive_approx_max_flow(g, 0.2, b, cfg);
  EXPECT_EQ(a.flow, c.flow);
  EXPECT_EQ(a.cut, c.cut);
  EXPECT_EQ(a.iterations, c.iterations);
  EXPECT_EQ(graph_fingerprint(g), graph_fingerprint(make_grid(12, 12)));
  EXPECT_NE(graph_fingerprint(g), graph_fingerprint(make_grid(12, 12, 2.0)));
}
