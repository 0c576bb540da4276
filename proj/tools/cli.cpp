#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "approxflow/exact_oracle.hpp"
#include "approxflow/generators.hpp"
#include "approxflow/hierarchy.hpp"
#include "approxflow/io.hpp"
#include "approxflow/reduce.hpp"
#include "approxflow/rng.hpp"
#include "approxflow/sparsify.hpp"

namespace approxflow::cli {

using json = nlohmann::ordered_json;
using clk = std::chrono::steady_clock;

namespace {

std::string trim(std::string s) {
  const auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

std::vector<std::string> split(const std::string& s, const std::string& seps) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (seps.find(c) != std::string::npos) {
      if (!trim(cur).empty()) out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty()) out.push_back(trim(cur));
  return out;
}

double to_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InputError("bad number for " + what + ": '" + s + "'");
  }
}

long long to_int(const std::string& s, const std::string& what) {
  const double v = to_double(s, what);
  if (v != std::floor(v)) throw InputError("expected an integer for " + what);
  return static_cast<long long>(v);
}

double seconds_since(clk::time_point t) {
  return std::chrono::duration<double>(clk::now() - t).count();
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

Instance load_instance(const std::string& input, const std::string& generate,
                       std::uint64_t seed) {
  if (input.empty() == generate.empty()) {
    throw InputError("give exactly one of --input and --generate");
  }
  Instance inst;
  try {
    if (!input.empty()) {
      if (!std::filesystem::exists(input)) {
        throw InputError("no such file: " + input);
      }
      inst.graph = load_graph_file(input);
      inst.family = "file";
      inst.source = input;
    } else {
      const GeneratorSpec spec = parse_generator_spec(generate);
      inst.graph = approxflow::generate(spec, seed);
      inst.family = family_name(spec.family);
      inst.source = generate;
    }
  } catch (const InputError&) {
    throw;
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }
  return inst;
}

DemandVector parse_demand(const std::string& spec, Vertex n, std::uint64_t seed) {
  if (spec == "gaussian") return gaussian_demand(n, derive_seed(seed, 0xd3));
  if (spec.find('@') == std::string::npos) {
    if (!std::filesystem::exists(spec)) {
      throw InputError("no such demand file: " + spec);
    }
    try {
      return load_demand_file(spec, n);
    } catch (const std::exception& e) {
      throw InputError(e.what());
    }
  }
  DemandVector b(static_cast<std::size_t>(n), 0.0);
  for (const std::string& item : split(spec, ",;")) {
    const auto at = item.find('@');
    if (at == std::string::npos) throw InputError("demand item needs VALUE@VERTEX");
    const double value = to_double(item.substr(0, at), "demand value");
    const long long v = to_int(item.substr(at + 1), "demand vertex");
    if (v < 1 || v > n) throw InputError("demand vertex out of range");
    b[static_cast<std::size_t>(v - 1)] += value;
  }
  return b;
}

std::pair<Vertex, Vertex> parse_st(const std::vector<std::string>& parts, Vertex n) {
  std::vector<std::string> tok;
  for (const std::string& p : parts) {
    for (const std::string& t : split(p, ", ")) tok.push_back(t);
  }
  if (tok.size() != 2) throw InputError("--st needs two vertices");
  const long long s = to_int(tok[0], "s");
  const long long t = to_int(tok[1], "t");
  if (s < 1 || s > n || t < 1 || t > n) throw InputError("--st vertex out of range");
  if (s == t) throw InputError("--st needs distinct vertices");
  return {static_cast<Vertex>(s - 1), static_cast<Vertex>(t - 1)};
}

void apply_config_entry(const std::string& key, const std::string& value,
                        RecursionConfig& c) {
  auto d = [&] { return to_double(value, key); };
  auto i = [&] { return to_int(value, key); };
  if (key == "kappa_constant") c.kappa_constant = d();
  else if (key == "rho") c.rho = d();
  else if (key == "base_case_edges") c.base_case_edges = static_cast<EdgeId>(i());
  else if (key == "inner_epsilon") c.inner_epsilon = d();
  else if (key == "max_depth") c.max_depth = static_cast<int>(i());
  else if (key == "seed") c.seed = static_cast<std::uint64_t>(i());
  else if (key == "oversample") c.oversample = d();
  else if (key == "max_resamples") c.max_resamples = static_cast<int>(i());
  else if (key == "reference_vertices") c.reference_vertices = static_cast<Vertex>(i());
  else if (key == "max_iters") c.solver.max_iters = static_cast<int>(i());
  else if (key == "alpha_hint") c.solver.alpha_hint = d();
  else if (key == "alpha_cap") c.solver.alpha_cap = d();
  else if (key == "alpha_start") c.solver.alpha_start = d();
  else if (key == "lbfgs_memory") c.solver.lbfgs_memory = static_cast<int>(i());
  else if (key == "check_every") c.solver.check_every = static_cast<int>(i());
  else if (key == "beta_constant") c.solver.beta_constant = d();
  else if (key == "stall_checks") c.solver.stall_checks = static_cast<int>(i());
  else if (key == "flat_tol") c.solver.flat_tol = d();
  else if (key == "alpha_growth") c.solver.alpha_growth = d();
  else if (key == "descent") {
    if (value == "lbfgs") c.solver.rule = DescentRule::kLbfgs;
    else if (value == "gradient") c.solver.rule = DescentRule::kGradient;
    else throw InputError("descent must be lbfgs or gradient");
  }
  else if (key == "round_cap") c.hierarchy.round_cap = static_cast<int>(i());
  else if (key == "min_cluster") c.hierarchy.min_cluster = static_cast<Vertex>(i());
  else if (key == "balance_target") c.hierarchy.balance_target = d();
  else if (key == "conductance_threshold") c.hierarchy.conductance_threshold = d();
  else if (key == "depth_cap") c.hierarchy.depth_cap = static_cast<int>(i());
  else throw InputError("unknown config key '" + key + "'");
  if (!(c.rho > 2.0)) throw InputError("rho must exceed 2");
  if (c.base_case_edges < 1) throw InputError("base_case_edges must be >= 1");
}

void apply_config(const std::string& text, RecursionConfig& config) {
  std::vector<std::string> entries;
  if (std::filesystem::is_regular_file(text)) {
    std::ifstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      if (!trim(line).empty()) entries.push_back(trim(line));
    }
  } else if (text.find('=') != std::string::npos) {
    entries = split(text, ",;");
  } else {
    throw InputError("no such config file: " + text);
  }
  for (const std::string& e : entries) {
    const auto eq = e.find('=');
    if (eq == std::string::npos) throw InputError("config entry needs key=value: " + e);
    apply_config_entry(trim(e.substr(0, eq)), trim(e.substr(eq + 1)), config);
  }
}

json config_json(const RecursionConfig& c) {
  json j;
  j["kappa_constant"] = c.kappa_constant;
  j["rho"] = c.rho;
  j["base_case_edges"] = c.base_case_edges;
  j["inner_epsilon"] = c.inner_epsilon;
  j["max_depth"] = c.max_depth;
  j["seed"] = c.seed;
  j["oversample"] = c.oversample;
  j["max_resamples"] = c.max_resamples;
  j["reference_vertices"] = c.reference_vertices;
  j["max_iters"] = c.solver.max_iters;
  j["alpha_hint"] = c.solver.alpha_hint;
  j["alpha_cap"] = c.solver.alpha_cap;
  j["alpha_start"] = c.solver.alpha_start;
  j["descent"] = c.solver.rule == DescentRule::kLbfgs ? "lbfgs" : "gradient";
  j["lbfgs_memory"] = c.solver.lbfgs_memory;
  j["check_every"] = c.solver.check_every;
  j["beta_constant"] = c.solver.beta_constant;
  j["stall_checks"] = c.solver.stall_checks;
  j["flat_tol"] = c.solver.flat_tol;
  j["alpha_growth"] = c.solver.alpha_growth;
  j["round_cap"] = c.hierarchy.round_cap;
  j["min_cluster"] = c.hierarchy.min_cluster;
  j["balance_target"] = c.hierarchy.balance_target;
  j["conductance_threshold"] = c.hierarchy.conductance_threshold;
  j["depth_cap"] = c.hierarchy.depth_cap;
  return j;
}

json stats_json(const RecursionStats& s) {
  json j;
  j["instances_per_depth"] = s.instances_per_depth;
  j["edges_per_depth"] = s.edges_per_depth;
  j["total_recursed_edges"] = s.total_recursed_edges;
  json shrinks = json::array();
  for (const ShrinkRecord& r : s.shrinks) {
    shrinks.push_back({{"depth", r.depth},
                       {"edges", r.edges},
                       {"reduced_edges", r.reduced_edges},
                       {"kappa", r.kappa},
                       {"rho_effective", r.rho_effective},
                       {"attempts", r.attempts},
                       {"next_level_edges", r.next_level_edges}});
  }
  j["shrinks"] = shrinks;
  j["base_cases"] = s.base_cases;
  j["fallbacks"] = s.fallbacks;
  j["max_depth_reached"] = s.max_depth_reached;
  j["solver_iterations"] = s.solver_iterations;
  j["solver_calls"] = s.solver_calls;
  j["unconverged_inner_calls"] = s.unconverged_inner_calls;
  j["hierarchy_rounds"] = s.hierarchy_rounds;
  j["top_converged"] = s.top_converged;
  j["shrink_ok"] = s.shrink_ok();
  return j;
}

json instance_json(const Instance& inst) {
  return {{"n", inst.graph.num_vertices()},
          {"m", inst.graph.num_edges()},
          {"family", inst.family},
          {"source", inst.source}};
}

json result_json(const FlowCutSolution& sol) {
  json j;
  j["congestion"] = number_or_null(sol.flow_congestion);
  j["cut_ratio"] = number_or_null(sol.cut_ratio);
  j["epsilon_achieved"] = number_or_null(sol.epsilon_achieved);
  j["converged"] = sol.converged;
  j["infeasible"] = sol.infeasible;
  j["iterations"] = sol.iterations;
  j["cut_size"] = sol.cut.size();
  return j;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("loglog_slope: need two or more points");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

std::string sized_spec(const std::string& family, long long edges) {
  edges = std::max(edges, 4LL);
  if (family == "grid2d") {
    const auto r = static_cast<long long>(
        std::llround(0.5 + std::sqrt(0.25 + edges / 2.0)));
    return "grid2d:" + std::to_string(r) + "x" + std::to_string(r);
  }
  if (family == "path") return "path:" + std::to_string(edges + 1);
  if (family == "random_gnm") {
    return "random_gnm:" + std::to_string(std::max(4LL, edges / 5)) + "," +
           std::to_string(edges);
  }
  if (family == "expander_like") {
    return "expander_like:" + std::to_string(std::max(4LL, edges / 3)) + ",6";
  }
  if (family == "tree_plus_noise") {
    return "tree_plus_noise:" + std::to_string(edges / 2 + 1) + "," +
           std::to_string(edges / 2);
  }
  throw InputError("unknown family '" + family + "'");
}

namespace {

struct Common {
  std::string input;
  std::string generate;
  std::string demand;
  std::vector<std::string> st;
  double eps = 0.1;
  std::uint64_t seed = 1;
  std::string config;
  std::string report;
  std::string trace;
};

void add_instance_flags(CLI::App* app, Common& c) {
  app->add_option("--input", c.input, "DIMACS graph file");
  app->add_option("--generate", c.generate, "FAMILY:PARAMS[@CAPS]");
  app->add_option("--seed", c.seed, "seed for every random choice");
  app->add_option("--config", c.config, "key=value file or inline list");
  app->add_option("--report", c.report, "JSON report path");
}

void add_solve_flags(CLI::App* app, Common& c) {
  add_instance_flags(app, c);
  app->add_option("--demand", c.demand, "\"+1@1,-1@3\", gaussian, or a file");
  app->add_option("--st", c.st, "source and sink, \"s,t\" or s t")->expected(1, 2);
  app->add_option("--eps", c.eps, "target error")->check(CLI::PositiveNumber);
  app->add_option("--trace", c.trace, "convergence CSV");
}

RecursionConfig make_config(const Common& c) {
  RecursionConfig cfg;
  cfg.seed = c.seed;
  if (!c.config.empty()) apply_config(c.config, cfg);
  return cfg;
}

void emit(const json& report, const std::string& path) {
  if (path.empty()) {
    std::cout << report.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << report.dump(2) << '\n';
}

struct SolveOutcome {
  FlowCutSolution solution;
  RecursionStats stats;
  DemandVector demand;
  std::optional<std::pair<Vertex, Vertex>> st;
  double value = 0.0;
  double upper_bound = 0.0;
  double seconds = 0.0;
};

SolveOutcome solve_instance(const Instance& inst, const Common& c,
                            RecursionConfig cfg) {
  SolveOutcome out;
  std::ofstream trace;
  if (!c.trace.empty()) {
    trace.open(c.trace);
    if (!trace) throw InputError("cannot write " + c.trace);
    trace << "iter,potential,congestion,best_cut_ratio\n";
    cfg.solver.trace = &trace;
  }
  const Vertex n = inst.graph.num_vertices();
  if (!c.st.empty() == !c.demand.empty()) {
    throw InputError("give exactly one of --demand and --st");
  }
  const auto start = clk::now();
  if (!c.st.empty()) {
    out.st = parse_st(c.st, n);
    const MaxFlowValue mf = max_flow_value(inst.graph, out.st->first,
                                           out.st->second, c.eps, cfg, &out.stats);
    out.solution = mf.solution;
    out.value = mf.value;
    out.upper_bound = mf.upper_bound;
    out.demand = st_demand(n, out.st->first, out.st->second, mf.value);
  } else {
    out.demand = parse_demand(c.demand, n, c.seed);
    out.solution =
        recursive_approx_max_flow(inst.graph, c.eps, out.demand, cfg, &out.stats);
    if (out.solution.infeasible) {
      throw InputError("demand does not sum to zero on every component");
    }
  }
  out.seconds = seconds_since(start);
  return out;
}

json solve_report(const Instance& inst, const Common& c, const RecursionConfig& cfg,
                  const SolveOutcome& o) {
  json report;
  report["instance"] = instance_json(inst);
  json config = config_json(cfg);
  config["epsilon"] = c.eps;
  report["config"] = config;
  json result = result_json(o.solution);
  if (o.st) {
    result["s"] = o.st->first + 1;
    result["t"] = o.st->second + 1;
    result["value"] = o.value;
    result["upper_bound"] = o.upper_bound;
  }
  const FlowReport fr = validate_flow(inst.graph, o.solution.flow, o.demand);
  result["conservation_residual"] = fr.max_conservation_residual;
  report["result"] = result;
  json stats = stats_json(o.stats);
  stats["total_ok"] = o.stats.total_ok(inst.graph.num_edges());
  report["stats"] = stats;
  report["timing"] = {{"solve_seconds", o.seconds},
                      {"recursion_wall_seconds", o.stats.wall_seconds}};
  return report;
}

int cmd_solve(const Common& c) {
  const Instance inst = load_instance(c.input, c.generate, c.seed);
  const RecursionConfig cfg = make_config(c);
  const SolveOutcome o = solve_instance(inst, c, cfg);
  emit(solve_report(inst, c, cfg, o), c.report);
  if (!o.solution.converged) {
    std::cerr << "not converged: epsilon_achieved " << o.solution.epsilon_achieved
              << '\n';
    return kNotConverged;
  }
  return kOk;
}

constexpr Vertex kVerifyVertexLimit = 5000;

int cmd_verify(const Common& c) {
  const Instance inst = load_instance(c.input, c.generate, c.seed);
  const Graph& g = inst.graph;
  if (g.num_vertices() > kVerifyVertexLimit) {
    throw InputError("verify accepts at most " + std::to_string(kVerifyVertexLimit) +
                     " vertices");
  }
  const RecursionConfig cfg = make_config(c);
  const SolveOutcome o = solve_instance(inst, c, cfg);
  const FlowCutSolution& sol = o.solution;
  const double tol = 1e-9;
  json checks = json::array();
  bool all = true;
  auto check = [&](const std::string& name, bool ok, double lhs, double rhs) {
    checks.push_back({{"check", name}, {"ok", ok}, {"lhs", number_or_null(lhs)},
                      {"rhs", number_or_null(rhs)}});
    std::cout << (ok ? "PASS " : "FAIL ") << name << " (" << lhs << " vs " << rhs
              << ")\n";
    all = all && ok;
  };
  double scale = 0.0;
  for (double v : o.demand) scale = std::max(scale, std::abs(v));
  const FlowReport fr = validate_flow(g, sol.flow, o.demand);
  check("conservation", fr.max_conservation_residual <= 1e-7 * scale,
        fr.max_conservation_residual, 1e-7 * scale);
  double opt = 0.0;
  if (o.st) {
    opt = exact_max_flow_st(g, o.st->first, o.st->second).value;
    check("value_feasible", o.value <= opt * (1 + tol) + tol, o.value, opt);
    check("cut_certificate", cut_capacity(g, sol.cut) >= opt * (1 - tol) - tol,
          cut_capacity(g, sol.cut), opt);
    check("value_within_eps", o.value * (1 + c.eps) >= opt * (1 - tol), o.value,
          opt / (1 + c.eps));
  } else {
    opt = exact_opt_congestion(g, o.demand).value;
    check("cut_below_opt", sol.cut_ratio <= opt * (1 + tol) + tol, sol.cut_ratio, opt);
    check("opt_below_flow", opt <= sol.flow_congestion * (1 + tol) + tol, opt,
          sol.flow_congestion);
    if (sol.converged) {
      check("flow_within_eps", sol.flow_congestion <= (1 + c.eps) * opt * (1 + tol),
            sol.flow_congestion, (1 + c.eps) * opt);
    }
    if (g.num_vertices() <= 12) {
      const double brute = brute_force_min_ratio_cut(g, o.demand).ratio;
      check("duality", std::abs(brute - opt) <= 1e-6 * std::max(1.0, opt), brute, opt);
    }
  }
  json report = solve_report(inst, c, cfg, o);
  report["verify"] = {{"opt", opt}, {"checks", checks}, {"passed", all}};
  if (!c.report.empty()) emit(report, c.report);
  return all ? kOk : kNotConverged;
}

struct BenchArgs {
  std::string family = "grid2d";
  std::vector<long long> sizes{2000, 4000, 8000, 16000};
  int seeds = 1;
  double eps = 0.2;
  std::string caps;
  int alpha_trials = 0;
  std::string csv;
};

int cmd_bench(const Common& c, const BenchArgs& a) {
  const RecursionConfig cfg = make_config(c);
  if (a.seeds < 1) throw InputError("--seeds must be >= 1");
  std::ofstream csv;
  if (!a.csv.empty()) {
    csv.open(a.csv);
    if (!csv) throw InputError("cannot write " + a.csv);
    csv << "family,n,m,seed,seconds,iterations,converged,epsilon_achieved,alpha_emp\n";
  }
  json rows = json::array();
  std::vector<double> ms;
  std::vector<double> times;
  bool all_converged = true;
  for (std::size_t si = 0; si < a.sizes.size(); ++si) {
    std::vector<double> size_times;
    double m_used = 0.0;
    for (int k = 0; k < a.seeds; ++k) {
      const std::uint64_t seed = derive_seed(c.seed, si * 1000 + k);
      std::string spec = sized_spec(a.family, a.sizes[si]);
      if (!a.caps.empty()) spec += "@" + a.caps;
      const Instance inst = load_instance("", spec, seed);
      const Graph& g = inst.graph;
      const DemandVector b = gaussian_demand(g.num_vertices(), derive_seed(seed, 7));
      RecursionConfig run_cfg = cfg;
      run_cfg.seed = seed;
      RecursionStats st;
      const auto start = clk::now();
      const FlowCutSolution sol = recursive_approx_max_flow(g, a.eps, b, run_cfg, &st);
      const double secs = seconds_since(start);
      double alpha_emp = std::numeric_limits<double>::quiet_NaN();
      if (a.alpha_trials > 0) {
        const CongestionApproximator r = build_congestion_approximator(g, run_cfg);
        alpha_emp = empirical_quality(r, g, a.alpha_trials, derive_seed(seed, 11));
      }
      all_converged = all_converged && sol.converged;
      size_times.push_back(secs);
      m_used = g.num_edges();
      rows.push_back({{"family", inst.family},
                      {"spec", spec},
                      {"n", g.num_vertices()},
                      {"m", g.num_edges()},
                      {"seed", seed},
                      {"seconds", secs},
                      {"iterations", sol.iterations},
                      {"converged", sol.converged},
                      {"epsilon_achieved", number_or_null(sol.epsilon_achieved)},
                      {"alpha_emp", number_or_null(alpha_emp)},
                      {"max_depth", st.max_depth_reached},
                      {"total_recursed_edges", st.total_recursed_edges},
                      {"shrink_ok", st.shrink_ok()}});
      if (csv) {
        csv << inst.family << ',' << g.num_vertices() << ',' << g.num_edges() << ','
            << seed << ',' << secs << ',' << sol.iterations << ',' << sol.converged
            << ',' << sol.epsilon_achieved << ',' << alpha_emp << '\n';
      }
      std::cerr << inst.family << " m=" << g.num_edges() << " seconds=" << secs
                << " iterations=" << sol.iterations
                << " converged=" << sol.converged << '\n';
    }
    std::sort(size_times.begin(), size_times.end());
    ms.push_back(m_used);
    times.push_back(size_times[size_times.size() / 2]);
  }
  json report;
  report["config"] = config_json(cfg);
  report["config"]["epsilon"] = a.eps;
  report["family"] = a.family;
  report["rows"] = rows;
  double slope = std::numeric_limits<double>::quiet_NaN();
  if (ms.size() >= 2) slope = loglog_slope(ms, times);
  report["timing"] = {{"median_seconds", times}, {"edges", ms},
                      {"loglog_slope", number_or_null(slope)}};
  emit(report, c.report.empty() ? std::string() : c.report);
  std::cerr << "slope " << slope << '\n';
  return all_converged ? kOk : kNotConverged;
}

int cmd_build(const Common& c, const std::string& out_path, int alpha_trials) {
  const Instance inst = load_instance(c.input, c.generate, c.seed);
  const RecursionConfig cfg = make_config(c);
  RecursionStats st;
  const auto start = clk::now();
  const CongestionApproximator r = build_congestion_approximator(inst.graph, cfg, &st);
  const double secs = seconds_since(start);
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw InputError("cannot write " + out_path);
    r.tree().write(out);
  }
  json report;
  report["instance"] = instance_json(inst);
  report["config"] = config_json(cfg);
  json result;
  result["rows"] = r.num_rows();
  result["depth"] = r.tree().depth();
  result["quality"] = r.quality();
  result["partition_ok"] = r.tree().audit_partition();
  if (alpha_trials > 0) {
    result["alpha_emp"] = empirical_quality(r, inst.graph, alpha_trials,
                                            derive_seed(c.seed, 11));
  }
  report["result"] = result;
  report["stats"] = stats_json(st);
  report["timing"] = {{"build_seconds", secs}};
  emit(report, c.report);
  return kOk;
}

int cmd_sparsify(const Common& c, double kappa, double oversample, bool reduce_too,
                 const std::string& tree, const std::string& out_path) {
  const Instance inst = load_instance(c.input, c.generate, c.seed);
  SparsifyParams sp;
  sp.oversample = oversample;
  if (tree == "maxcap") sp.tree = TreeStrategy::kMaxCapacity;
  else if (tree == "lowstretch") sp.tree = TreeStrategy::kLowStretchHeuristic;
  else throw InputError("--tree must be maxcap or lowstretch");
  const auto start = clk::now();
  const UltraSparsifier us = ultra_sparsify(inst.graph, kappa, c.seed, sp);
  json result;
  result["kappa"] = kappa;
  result["edges"] = us.h.num_edges();
  result["off_tree"] = us.off_tree_count;
  result["expected_off_tree"] = us.expected_off_tree;
  result["budget"] = us.budget;
  result["attempts"] = us.attempts;
  if (inst.graph.num_vertices() <= 16) {
    result["cut_distortion"] = number_or_null(measure_cut_distortion(inst.graph, us.h));
  }
  Graph out_graph = us.h;
  if (reduce_too) {
    const Reduction red = reduce(us.h);
    result["reduced_vertices"] = red.reduced.num_vertices();
    result["reduced_edges"] = red.reduced.num_edges();
    out_graph = red.reduced;
  }
  const double secs = seconds_since(start);
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw InputError("cannot write " + out_path);
    out << serialize_graph(out_graph);
  }
  json report;
  report["instance"] = instance_json(inst);
  report["config"] = {{"seed", c.seed}, {"oversample", oversample}, {"tree", tree}};
  report["result"] = result;
  report["timing"] = {{"seconds", secs}};
  emit(report, c.report);
  return kOk;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"approximate max flow and min ratio cut"};
  app.require_subcommand(1);
  Common solve_c, verify_c, bench_c, build_c, sparsify_c;
  CLI::App* solve = app.add_subcommand("solve", "route a demand or an s-t flow");
  add_solve_flags(solve, solve_c);
  CLI::App* verify = app.add_subcommand("verify", "solve and check against the exact oracle");
  add_solve_flags(verify, verify_c);

  BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand("bench", "timing sweep over a generator family");
  bench->add_option("--family", bench_args.family);
  bench->add_option("--sizes", bench_args.sizes, "target edge counts")->delimiter(',');
  bench->add_option("--seeds", bench_args.seeds);
  bench->add_option("--eps", bench_args.eps)->check(CLI::PositiveNumber);
  bench->add_option("--caps", bench_args.caps, "capacity spec, e.g. uniform:0.1:10");
  bench->add_option("--alpha-trials", bench_args.alpha_trials);
  bench->add_option("--csv", bench_args.csv);
  bench->add_option("--seed", bench_c.seed);
  bench->add_option("--config", bench_c.config);
  bench->add_option("--report", bench_c.report);

  std::string tree_out;
  int alpha_trials = 0;
  CLI::App* build = app.add_subcommand("build-approximator", "build and export the decomposition tree");
  add_instance_flags(build, build_c);
  build->add_option("--out", tree_out, "tree file");
  build->add_option("--alpha-trials", alpha_trials);

  double kappa = 4.0;
  double oversample = 4.0;
  bool reduce_too = false;
  std::string tree_kind = "maxcap";
  std::string graph_out;
  CLI::App* sparsify = app.add_subcommand("sparsify", "ultra-sparsify (and optionally reduce)");
  add_instance_flags(sparsify, sparsify_c);
  sparsify->add_option("--kappa", kappa)->check(CLI::PositiveNumber);
  sparsify->add_option("--oversample", oversample)->check(CLI::PositiveNumber);
  sparsify->add_option("--tree", tree_kind);
  sparsify->add_flag("--reduce", reduce_too);
  sparsify->add_option("--out", graph_out, "DIMACS output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }
  try {
    if (*solve) return cmd_solve(solve_c);
    if (*verify) return cmd_verify(verify_c);
    if (*bench) return cmd_bench(bench_c, bench_args);
    if (*build) return cmd_build(build_c, tree_out, alpha_trials);
    if (*sparsify) {
      return cmd_sparsify(sparsify_c, kappa, oversample, reduce_too, tree_kind, graph_out);
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

}  // namespace approxflow::cli
