#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qgraph/aedges.hpp"
#include "qgraph/graph.hpp"

namespace qgraph {

struct SurgeryResult {
  MetricGraph graph;
  // old id -> new id; a split vertex maps to several entries.
  std::vector<std::pair<std::string, std::string>> vertex_map;
  std::vector<std::pair<std::string, std::string>> edge_map;
  std::vector<std::string> created;  // ids of new vertices
};

// E(g, v): replace v by one D-type boundary vertex per incidence (a self-loop
// contributes two). New vertices are appended after all existing ones, in the
// order of the corresponding edges; edge orientations and potentials carry over.
SurgeryResult split_vertex(const MetricGraph& g, int v);

// C_K(g, part): drop `part`, keep the complement; the single shared vertex is
// retyped K when it becomes a boundary vertex. The shared vertex must be
// internal or K-type in g. The complement may degenerate to the bare vertex.
MetricGraph cut_keep(const MetricGraph& g, const std::vector<EdgeRef>& part);

// C_D(g, part) = E(C_K(g, part), v).
MetricGraph cut_dirichlet(const MetricGraph& g, const std::vector<EdgeRef>& part);

// Variants with the shared vertex given explicitly; these also accept cuts
// whose complement degenerates to the bare vertex v.
MetricGraph cut_keep_at(const MetricGraph& g, const std::vector<EdgeRef>& part, int v);
MetricGraph cut_dirichlet_at(const MetricGraph& g, const std::vector<EdgeRef>& part, int v);

// G_c: replace the chain-closing edge's incidence at the anchor with a fresh
// K-type boundary vertex v_c; lengths, orientations and potentials unchanged.
SurgeryResult unroll_cycle(const MetricGraph& g, const AEdge& c);

// Shared vertex of a part/rest split, or throws when the split is invalid.
int split_site(const MetricGraph& g, const std::vector<EdgeRef>& part);

// Components hanging at v, each reattached through its incidences there. In
// an A-graph every component carries exactly one a-edge through v; grouping
// subsets of them (plus v) builds valid decompositions at v.
std::vector<std::vector<EdgeRef>> components_at(const MetricGraph& g, int v);

}  // namespace qgraph
