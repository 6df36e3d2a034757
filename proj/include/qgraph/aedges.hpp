#pragma once

#include <vector>

#include "qgraph/graph.hpp"

namespace qgraph {

// An a-edge is either a simple edge (compact edge or ray outside every cycle)
// or a whole cycle. Cycle members are listed as a closed chain; the chain
// starts at the anchor vertex once orders are computed.
struct AEdge {
  enum class Kind { SimpleEdge, Cycle };
  Kind kind;
  std::vector<EdgeRef> members;
  int order = -1;   // omega_a; -1 until compute_orders ran
  int anchor = -1;  // vertex nearest the root (u_c for cycles); -1 until rooted
};

struct AEdgeSet {
  std::vector<AEdge> a_edges;
  int graph_order = 0;  // omega = max order
  int rooted = -1;      // index of the order-0 a-edge
};

// All cycles of the graph: exactly the biconnected blocks that are simple
// cycles. Deterministic order (by smallest member edge). Requires validity.
std::vector<AEdge> enumerate_cycles(const MetricGraph& g);

// Decomposition of every edge and ray into a-edges, unordered (order = -1).
std::vector<AEdge> a_edge_partition(const MetricGraph& g);

// Orders from the rooted edge via BFS on a-edge adjacency (sharing a vertex).
AEdgeSet compute_orders(const MetricGraph& g);

// Which a-edge of the set contains the given edge/ray.
int a_edge_of(const std::vector<AEdge>& a_edges, EdgeRef ref);

// G+(a): union of all edges r such that any path through r and the rooted
// edge meets a. Vertices that lose their other edges become K-type boundary.
MetricGraph subgraph_beyond(const MetricGraph& g, const AEdge& a);

// Edge set of subgraph_beyond without building the graph.
std::vector<EdgeRef> edges_beyond(const MetricGraph& g, const AEdge& a);

bool is_boundary_cycle(const MetricGraph& g, const AEdge& c);

// Vertex -> BFS edge-count distance from the root.
std::vector<int> vertex_distances_from_root(const MetricGraph& g);

// Sub-graph of g induced by the given edges/rays, with inherited orderings.
// Vertices that become isolated are dropped; internal vertices whose degree
// falls to one become K-type boundary vertices (retype_new_boundary).
MetricGraph edge_subgraph(const MetricGraph& g, const std::vector<EdgeRef>& keep,
                          bool retype_new_boundary);

}  // namespace qgraph
