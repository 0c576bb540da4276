#include "approxflow/io.hpp"

#include <cctype>
#include <charconv>
#include <limits>
#include <cmath>
#include <fstream>
#include <sstream>

namespace approxflow {
namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    const std::size_t start = i;
    while (i < line.size() &&
           !std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

long long parse_int(std::string_view tok, int line, const char* what) {
  long long value = 0;
  const auto [ptr, ec] =
      std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(line, std::string("invalid ") + what + " '" +
                               std::string(tok) + "'");
  }
  return value;
}

double parse_real(std::string_view tok, int line, const char* what) {
  // from_chars rejects a leading '+', which demand files commonly use.
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size() ||
      !std::isfinite(value)) {
    throw ParseError(line, std::string("invalid ") + what + " '" +
                               std::string(tok) + "'");
  }
  return value;
}

std::string read_all(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

Graph load_graph(std::istream& in) {
  std::string line;
  int line_no = 0;
  int problem_line = 0;
  long long n = -1;
  long long m = -1;
  std::vector<Edge> edges;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tok = split_ws(line);
    if (tok.empty() || tok[0] == "c") continue;
    if (tok[0] == "p") {
      if (problem_line != 0) throw ParseError(line_no, "duplicate problem line");
      if (tok.size() != 4 || tok[1] != "max") {
        throw ParseError(line_no, "expected 'p max <n> <m>'");
      }
      n = parse_int(tok[2], line_no, "vertex count");
      m = parse_int(tok[3], line_no, "edge count");
      if (n < 1 || m < 0 || n > std::numeric_limits<Vertex>::max()) {
        throw ParseError(line_no, "vertex/edge counts out of range");
      }
      problem_line = line_no;
      edges.reserve(static_cast<std::size_t>(m));
      continue;
    }
    if (tok[0] == "a") {
      if (problem_line == 0) {
        throw ParseError(line_no, "edge line before problem line");
      }
      if (tok.size() != 4) throw ParseError(line_no, "expected 'a <u> <v> <cap>'");
      const long long u = parse_int(tok[1], line_no, "vertex id");
      const long long v = parse_int(tok[2], line_no, "vertex id");
      const double cap = parse_real(tok[3], line_no, "capacity");
      if (u < 1 || u > n || v < 1 || v > n) {
        throw ParseError(line_no, "vertex id out of range");
      }
      if (u == v) throw ParseError(line_no, "self-loop");
      if (!(cap > 0.0)) throw ParseError(line_no, "capacity must be positive");
      edges.push_back({static_cast<Vertex>(u - 1), static_cast<Vertex>(v - 1),
                       cap});
      continue;
    }
    throw ParseError(line_no, "unrecognized line '" + line + "'");
  }
  if (problem_line == 0) throw ParseError(line_no, "missing problem line");
  if (static_cast<long long>(edges.size()) != m) {
    throw ParseError(problem_line, "problem line declares " +
                                       std::to_string(m) + " edges, found " +
                                       std::to_string(edges.size()));
  }
  return Graph(static_cast<Vertex>(n), std::move(edges));
}

Graph load_graph_string(std::string_view text) {
  std::istringstream in{std::string(text)};
  return load_graph(in);
}

Graph load_graph_file(const std::string& path) {
  return load_graph_string(read_all(path));
}

std::string serialize_graph(const Graph& g) {
  std::string out = "p max " + std::to_string(g.num_vertices()) + " " +
                    std::to_string(g.num_edges()) + "\n";
  for (const Edge& e : g.edges()) {
    out += "a " + std::to_string(e.tail + 1) + " " + std::to_string(e.head + 1) +
           " " + format_double(e.capacity) + "\n";
  }
  return out;
}

DemandVector load_demand(std::istream& in, Vertex num_vertices) {
  DemandVector b(static_cast<std::size_t>(num_vertices), 0.0);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tok = split_ws(line);
    if (tok.empty() || tok[0] == "c") continue;
    if (tok[0] != "d" || tok.size() != 3) {
      throw ParseError(line_no, "expected 'd <v> <value>'");
    }
    const long long v = parse_int(tok[1], line_no, "vertex id");
    if (v < 1 || v > num_vertices) {
      throw ParseError(line_no, "vertex id out of range");
    }
    b[v - 1] += parse_real(tok[2], line_no, "demand");
  }
  return b;
}

DemandVector load_demand_string(std::string_view text, Vertex num_vertices) {
  std::istringstream in{std::string(text)};
  return load_demand(in, num_vertices);
}

DemandVector load_demand_file(const std::string& path, Vertex num_vertices) {
  return load_demand_string(read_all(path), num_vertices);
}

std::string serialize_demand(std::span<const double> b) {
  std::string out;
  for (std::size_t v = 0; v < b.size(); ++v) {
    if (b[v] != 0.0) {
      out += "d " + std::to_string(v + 1) + " " + format_double(b[v]) + "\n";
    }
  }
  return out;
}

}  // namespace approxflow
