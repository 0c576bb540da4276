#pragma once

#include <istream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "approxflow/graph.hpp"

namespace approxflow {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

// DIMACS-style undirected graph:
//   c <comment>
//   p max <n> <m>
//   a <u> <v> <capacity>      (1-based vertex ids)
Graph load_graph(std::istream& in);
Graph load_graph_string(std::string_view text);
Graph load_graph_file(const std::string& path);

std::string serialize_graph(const Graph& g);

// Demand file: "d <v> <value>" lines (1-based), comments allowed; vertices
// not listed get demand 0. Repeated vertices accumulate.
DemandVector load_demand(std::istream& in, Vertex num_vertices);
DemandVector load_demand_string(std::string_view text, Vertex num_vertices);
DemandVector load_demand_file(const std::string& path, Vertex num_vertices);

std::string serialize_demand(std::span<const double> b);

// Shortest decimal text that parses back to exactly x.
std::string format_double(double x);

}  // namespace approxflow
