#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "approxflow/driver.hpp"
#include "approxflow/graph.hpp"

namespace approxflow::cli {

enum ExitCode : int { kOk = 0, kInputError = 1, kNotConverged = 2 };

// Bad files, specs or flags. Mapped to exit code 1.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Instance {
  Graph graph;
  std::string family;  // generator family, or "file"
  std::string source;  // generator spec or path
};

Instance load_instance(const std::string& input, const std::string& generate,
                       std::uint64_t seed);

// "+1@1,-1@3" (1-based vertices), "gaussian", or a demand file path.
DemandVector parse_demand(const std::string& spec, Vertex n, std::uint64_t seed);

// "s,t" or "s t", 1-based. Returns 0-based ids.
std::pair<Vertex, Vertex> parse_st(const std::vector<std::string>& parts, Vertex n);

// key=value lines ('#' comments) or, when `text` is not a readable file, a
// comma separated list of key=value pairs. Unknown keys are input errors.
void apply_config(const std::string& text, RecursionConfig& config);
void apply_config_entry(const std::string& key, const std::string& value,
                        RecursionConfig& config);

nlohmann::ordered_json config_json(const RecursionConfig& config);
nlohmann::ordered_json stats_json(const RecursionStats& stats);
nlohmann::ordered_json instance_json(const Instance& inst);
nlohmann::ordered_json result_json(const FlowCutSolution& sol);

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// Generator spec with roughly `edges` edges for a family.
std::string sized_spec(const std::string& family, long long edges);

int run(int argc, char** argv);

}  // namespace approxflow::cli
