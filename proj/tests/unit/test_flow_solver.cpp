#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "approxflow/exact_oracle.hpp"
#include "approxflow/flow_solver.hpp"
#include "approxflow/generators.hpp"
#include "approxflow/rng.hpp"

using namespace approxflow;

namespace {

FlowCutSolution solve(const Graph& g, const DemandVector& b, double eps,
                      SolverStats* st = nullptr) {
  SolverParams p;
  p.epsilon = eps;
  return approximator_max_flow(g, spanning_tree_approximator(g), p, b, st);
}

void expect_certified(const Graph& g, const DemandVector& b, const FlowCutSolution& s,
                      double eps) {
  const double opt = exact_opt_congestion(g, b).value;
  ASSERT_TRUE(s.converged);
  EXPECT_LE(s.flow_congestion, (1 + eps) * opt * (1 + 1e-9));
  EXPECT_LE(s.cut_ratio, opt * (1 + 1e-9));
  EXPECT_GE(s.flow_congestion, opt * (1 - 1e-9));
  const FlowReport fr = validate_flow(g, s.flow, b);
  EXPECT_LE(fr.max_conservation_residual, 1e-7);
  EXPECT_NEAR(fr.congestion, s.flow_congestion, 1e-9 * (1 + fr.congestion));
  ASSERT_TRUE(s.cut.is_proper(g.num_vertices()));
  EXPECT_NEAR(std::abs(cut_demand(b, s.cut)) / cut_capacity(g, s.cut), s.cut_ratio,
              1e-9 * (1 + s.cut_ratio));
}

}  // namespace

TEST(Lmax, Values) {
  EXPECT_NEAR(lmax(std::vector<double>{0.0}), std::log(2.0), 1e-15);
  const std::vector<double> big{1000.0, -3.0};
  EXPECT_NEAR(lmax(big), 1000.0, 1e-9);
  const std::vector<double> x{0.3, -1.2, 2.0};
  double direct = 0.0;
  for (double v : x) direct += std::exp(v) + std::exp(-v);
  EXPECT_NEAR(lmax(x), std::log(direct), 1e-12);
  EXPECT_GE(lmax(x), 2.0);
  EXPECT_LE(lmax(x), 2.0 + std::log(6.0));
}

TEST(Lmax, GradientMatchesFiniteDifferences) {
  Rng rng(3);
  std::vector<double> x(12);
  for (double& v : x) v = 3.0 * rng.normal();
  std::vector<double> g(12);
  lmax_gradient(x, g);
  double l1 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    l1 += std::abs(g[i]);
    auto up = x;
    auto dn = x;
    up[i] += 1e-6;
    dn[i] -= 1e-6;
    EXPECT_NEAR(g[i], (lmax(up) - lmax(dn)) / 2e-6, 1e-6);
  }
  EXPECT_LE(l1, 1.0 + 1e-12);
}

TEST(Solver, SingleEdge) {
  const Graph e(2, {{0, 1, 1.0}});
  const FlowCutSolution s = solve(e, DemandVector{1, -1}, 0.1);
  EXPECT_TRUE(s.converged);
  EXPECT_NEAR(s.flow[0], 1.0, 1e-7);
  EXPECT_GE(s.flow_congestion, 1.0 - 1e-9);
  EXPECT_LE(s.flow_congestion, 1.1);
  EXPECT_TRUE(s.cut == CutSet{0} || s.cut == CutSet{1});
  EXPECT_DOUBLE_EQ(s.cut_ratio, 1.0);
}

TEST(Solver, FourCycleOppositeCorners) {
  const Graph c(4, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {3, 0, 1.0}});
  const DemandVector b{2, 0, -2, 0};
  const FlowCutSolution s = solve(c, b, 0.1);
  expect_certified(c, b, s, 0.1);
  EXPECT_GE(s.flow_congestion, 1.0 - 1e-9);
  EXPECT_LE(s.flow_congestion, 1.1);
}

TEST(Solver, RandomSmallInstancesAgainstOracle) {
  int converged = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Rng rng(seed);
    const int n = 4 + static_cast<int>(rng.below(9));
    const int m = std::min(n * (n - 1) / 2, n - 1 + static_cast<int>(rng.below(2 * n)));
    const std::string spec = "random_gnm:" + std::to_string(n) + "," + std::to_string(m) +
                             "@uniform:0.1:10";
    const Graph g = generate(parse_generator_spec(spec), seed);
    const DemandVector b = gaussian_demand(n, seed + 7);
    const FlowCutSolution s = solve(g, b, 0.1);
    if (!s.converged) continue;
    ++converged;
    expect_certified(g, b, s, 0.1);
  }
  EXPECT_EQ(converged, 100);
}

TEST(Solver, ConstantDemandAndScaling) {
  const Graph g = make_grid(3, 3);
  const FlowCutSolution z = solve(g, DemandVector(9, 0.0), 0.1);
  EXPECT_TRUE(z.converged);
  EXPECT_EQ(z.flow_congestion, 0.0);
  const DemandVector b = st_demand(9, 0, 8, 1.0);
  const DemandVector b3 = st_demand(9, 0, 8, 3.0);
  EXPECT_NEAR(solve(g, b3, 0.05).flow_congestion / solve(g, b, 0.05).flow_congestion, 3.0,
              0.3);
}

TEST(Solver, PotentialNeverIncreases) {
  const Graph g = make_grid(8, 8);
  SolverStats st;
  std::ostringstream trace;
  SolverParams p;
  p.epsilon = 0.1;
  p.trace = &trace;
  const DemandVector b = st_demand(64, 0, 63, 1.0);
  const FlowCutSolution s = approximator_max_flow(g, spanning_tree_approximator(g), p, b, &st);
  EXPECT_TRUE(s.converged);
  EXPECT_EQ(st.potential_increases, 0);
  EXPECT_GE(st.alpha_final, 1.0);
  std::istringstream rows(trace.str());
  std::string line;
  int lines = 0;
  while (std::getline(rows, line)) {
    ++lines;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 3) << line;
  }
  EXPECT_GT(lines, 0);
  EXPECT_NEAR(s.flow_congestion, 0.5, 0.05 + 1e-9);
}

TEST(Solver, GradientRuleAlsoConverges) {
  const Graph g = make_grid(4, 4);
  SolverParams p;
  p.epsilon = 0.2;
  p.rule = DescentRule::kGradient;
  p.max_iters = 50000;
  const DemandVector b = gaussian_demand(16, 4);
  const FlowCutSolution s = approximator_max_flow(g, spanning_tree_approximator(g), p, b);
  expect_certified(g, b, s, 0.2);
}

TEST(Solver, InfeasibleAndDisconnected) {
  const Graph g(4, {{0, 1, 1.0}, {2, 3, 1.0}});
  CongestionApproximator dummy;
  const FlowCutSolution s = approximator_max_flow(g, dummy, {}, DemandVector{1, 0, -1, 0});
  EXPECT_TRUE(s.infeasible);
  EXPECT_FALSE(s.converged);
  EXPECT_EQ(s.cut, (CutSet{0, 1}));
  EXPECT_THROW(approximator_max_flow(g, dummy, {}, DemandVector{1, -1, 0, 0}),
               std::invalid_argument);
  const Graph e(2, {{0, 1, 1.0}});
  EXPECT_THROW(approximator_max_flow(e, spanning_tree_approximator(e), {}, DemandVector{1}),
               std::invalid_argument);
}

TEST(SweepCut, Examples) {
  const Graph p = make_path({2.0, 1.0});
  const SweepCut a = extract_sweep_cut(p, std::vector<double>{3, 2, 1}, DemandVector{1, 0, -1});
  EXPECT_TRUE(a.cut == (CutSet{0, 1}) || a.cut == CutSet{2});
  EXPECT_DOUBLE_EQ(a.ratio, 1.0);
  const SweepCut c = extract_sweep_cut(p, std::vector<double>{0, 0, 0}, DemandVector{1, 0, -1});
  EXPECT_EQ(c.cut, CutSet{2});
  EXPECT_DOUBLE_EQ(c.ratio, 1.0);
  EXPECT_THROW(extract_sweep_cut(p, std::vector<double>{0, NAN, 0}, DemandVector{1, 0, -1}),
               std::invalid_argument);
  EXPECT_THROW(extract_sweep_cut(p, std::vector<double>{0, 0}, DemandVector{1, 0, -1}),
               std::invalid_argument);
}

TEST(SweepCut, DominatedByBestCut) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const Graph g = generate(parse_generator_spec("random_gnm:9,18@uniform:0.1:10"), seed);
    const DemandVector b = gaussian_demand(9, seed + 40);
    const DemandVector pot = gaussian_demand(9, seed + 80);
    const SweepCut sc = extract_sweep_cut(g, pot, b);
    EXPECT_LE(sc.ratio, brute_force_min_ratio_cut(g, b).ratio * (1 + 1e-12));
    EXPECT_NEAR(sc.ratio, std::abs(cut_demand(b, sc.cut)) / cut_capacity(g, sc.cut), 1e-12);
  }
}

TEST(Solver, StallScheduleParameters) {
  const Graph g = make_grid(6, 6);
  const DemandVector b = gaussian_demand(36, 11);
  const CongestionApproximator r = spanning_tree_approximator(g);
  for (double flat : {0.0, 1e-3}) {
    for (double growth : {2.0, 4.0}) {
      SolverParams p;
      p.epsilon = 0.1;
      p.flat_tol = flat;
      p.alpha_growth = growth;
      expect_certified(g, b, approximator_max_flow(g, r, p, b), 0.1);
    }
  }
  SolverParams bad;
  bad.alpha_growth = 1.0;
  EXPECT_THROW(approximator_max_flow(g, r, bad, b), std::invalid_argument);
}
