#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "json.hpp"

using namespace approxflow;
using json = nlohmann::ordered_json;

namespace {

const std::string kFixtures = APPROXFLOW_FIXTURE_DIR;

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "approxflow");
  std::vector<char*> argv;
  for (std::string& a : args) argv.push_back(a.data());
  return cli::run(static_cast<int>(argv.size()), argv.data());
}

std::string tmp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("approxflow_test_" + name)).string();
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  return json::parse(in);
}

}  // namespace

TEST(Cli, PathExampleCongestion) {
  const std::string out = tmp_path("path.json");
  ASSERT_EQ(run_cli({"solve", "--generate", "path:3", "--demand", "+1@1,-1@3", "--eps",
                     "0.1", "--report", out}),
            cli::kOk);
  const json r = read_json(out);
  const double c = r["result"]["congestion"].get<double>();
  EXPECT_GE(c, 1.0 - 1e-9);
  EXPECT_LE(c, 1.1);
  EXPECT_TRUE(r["result"]["converged"].get<bool>());
  EXPECT_LE(r["result"]["conservation_residual"].get<double>(), 1e-7);
  for (const char* key : {"instance", "config", "result", "stats", "timing"}) {
    EXPECT_TRUE(r.contains(key)) << key;
  }
}

TEST(Cli, VerifyGridCorners) {
  const std::string out = tmp_path("verify.json");
  ASSERT_EQ(run_cli({"verify", "--input", kFixtures + "/grid4x4.dimacs", "--st", "1", "16",
                     "--report", out}),
            cli::kOk);
  const json r = read_json(out);
  EXPECT_TRUE(r["verify"]["passed"].get<bool>());
  EXPECT_NEAR(r["verify"]["opt"].get<double>(), 2.0, 1e-9);
  EXPECT_EQ(r["result"]["s"].get<int>(), 1);
  EXPECT_EQ(r["result"]["t"].get<int>(), 16);
}

TEST(Cli, DemandFileAndConfig) {
  EXPECT_EQ(run_cli({"verify", "--input", kFixtures + "/cycle4.dimacs", "--demand",
                     kFixtures + "/cycle4.demand", "--config", kFixtures + "/small.conf"}),
            cli::kOk);
  EXPECT_EQ(run_cli({"solve", "--generate", "grid2d:3x3", "--demand", "gaussian", "--config",
                     "rho=12,max_iters=4000", "--report", tmp_path("inline.json")}),
            cli::kOk);
  EXPECT_EQ(read_json(tmp_path("inline.json"))["config"]["rho"].get<double>(), 12.0);
  EXPECT_EQ(run_cli({"solve", "--generate", "grid2d:4x4", "--demand", "gaussian", "--config",
                     "flat_tol=0,alpha_growth=3", "--report", tmp_path("sched.json")}),
            cli::kOk);
  const json sched = read_json(tmp_path("sched.json"))["config"];
  EXPECT_EQ(sched["flat_tol"].get<double>(), 0.0);
  EXPECT_EQ(sched["alpha_growth"].get<double>(), 3.0);
  EXPECT_EQ(run_cli({"solve", "--generate", "grid2d:4x4", "--demand", "gaussian", "--config",
                     "alpha_growth=1"}),
            cli::kInputError);
}

TEST(Cli, InputErrors) {
  EXPECT_EQ(run_cli({"solve", "--generate", "path:3"}), cli::kInputError);
  EXPECT_EQ(run_cli({"solve", "--generate", "path:3", "--input", "x", "--demand", "gaussian"}),
            cli::kInputError);
  EXPECT_EQ(run_cli({"solve", "--input", kFixtures + "/zero_capacity.dimacs", "--demand",
                     "gaussian"}),
            cli::kInputError);
  EXPECT_EQ(run_cli({"solve", "--generate", "path:3", "--demand", "+1@1,-1@9"}),
            cli::kInputError);
  EXPECT_EQ(run_cli({"solve", "--generate", "path:3", "--demand", "gaussian", "--config",
                     kFixtures + "/bad.conf"}),
            cli::kInputError);
  EXPECT_EQ(run_cli({"solve", "--generate", "path:3", "--st", "1", "1"}), cli::kInputError);
  EXPECT_EQ(run_cli({"nonsense"}), cli::kInputError);
}

TEST(Cli, NotConvergedExitCode) {
  EXPECT_EQ(run_cli({"solve", "--generate", "grid2d:6x6", "--demand", "gaussian", "--eps",
                     "0.01", "--config", "max_iters=1"}),
            cli::kNotConverged);
}

TEST(Cli, ReportDeterministicApartFromTiming) {
  const std::string a = tmp_path("det_a.json");
  const std::string b = tmp_path("det_b.json");
  for (const std::string& path : {a, b}) {
    ASSERT_EQ(run_cli({"solve", "--generate", "random_gnm:40,120@uniform:0.1:10", "--seed", "7",
                       "--demand", "gaussian", "--report", path}),
              cli::kOk);
  }
  json ja = read_json(a);
  json jb = read_json(b);
  ja.erase("timing");
  jb.erase("timing");
  EXPECT_EQ(ja.dump(), jb.dump());
}

TEST(Cli, BuildAndSparsifyCommands) {
  const std::string tree = tmp_path("tree.txt");
  const std::string rep = tmp_path("build.json");
  ASSERT_EQ(run_cli({"build-approximator", "--generate", "grid2d:6x6", "--out", tree,
                     "--alpha-trials", "10", "--report", rep}),
            cli::kOk);
  const json r = read_json(rep);
  EXPECT_TRUE(r["result"]["partition_ok"].get<bool>());
  EXPECT_GE(r["result"]["alpha_emp"].get<double>(), 1.0);
  EXPECT_TRUE(std::filesystem::exists(tree));
  const std::string g = tmp_path("sparse.dimacs");
  ASSERT_EQ(run_cli({"sparsify", "--generate", "random_gnm:12,40", "--kappa", "4", "--reduce",
                     "--out", g, "--report", tmp_path("sparse.json")}),
            cli::kOk);
  EXPECT_TRUE(std::filesystem::exists(g));
  EXPECT_EQ(run_cli({"sparsify", "--generate", "path:4", "--tree", "bogus"}), cli::kInputError);
}

TEST(Cli, BinaryExitCodes) {
  const std::string bin = APPROXFLOW_CLI_PATH;
  const std::string quiet = " >/dev/null 2>&1";
  EXPECT_EQ(WEXITSTATUS(std::system((bin + " solve --generate path:3 --demand +1@1,-1@3" +
                                     quiet).c_str())),
            0);
  EXPECT_EQ(WEXITSTATUS(std::system((bin + " solve --generate path:3" + quiet).c_str())), 1);
}

TEST(Cli, Helpers) {
  EXPECT_NEAR(cli::loglog_slope({1, 2, 4, 8}, {3, 6, 12, 24}), 1.0, 1e-12);
  EXPECT_NEAR(cli::loglog_slope({1, 2, 4}, {1, 4, 16}), 2.0, 1e-12);
  const DemandVector d = cli::parse_demand("+1@1,-1@3", 3, 1);
  EXPECT_EQ(d, (DemandVector{1, 0, -1}));
  EXPECT_THROW(cli::parse_demand("+1@1,-1@4", 3, 1), cli::InputError);
}
