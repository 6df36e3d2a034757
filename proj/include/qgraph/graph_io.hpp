#pragma once

#include <string>
#include <string_view>

#include "qgraph/graph.hpp"

namespace qgraph {

// Line-oriented graph description:
//   vertex <id> internal|boundary_D|boundary_K
//   edge <id> <u> <v> length <float> potential <spec>
//   ray <id> <v> support <float> potential <spec>
//   root <vertex-id>
// where <spec> is zero | const <v> | pw <b0> <v0> ... | grid <h> <v0> ...
// '#' starts a comment; declaration order fixes all orderings.
MetricGraph parse_graph_file(std::string_view text);

MetricGraph load_graph_file(const std::string& path);

// Canonical text form; parse(emit(g)) reproduces g and emit is idempotent.
std::string emit_graph_file(const MetricGraph& g);

// Potential override file, same grammar minus topology:
//   edge <id> potential <spec>
//   ray <id> support <float> potential <spec>
MetricGraph apply_potential_file(const MetricGraph& g, std::string_view text);

MetricGraph apply_potential_path(const MetricGraph& g, const std::string& path);

}  // namespace qgraph
