#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qgraph/potential.hpp"

namespace qgraph {

enum class VertexKind { Internal, BoundaryD, BoundaryK };

std::string_view to_string(VertexKind k);

struct Vertex {
  std::string id;
  VertexKind kind;
};

// A compact edge keeps an orientation: arc length runs from `initial` (s = 0)
// to `terminal` (s = length). For freshly built graphs the initial end is the
// endpoint that comes first in the vertex ordering; surgery preserves each
// edge's orientation so local solution anchors stay put.
struct CompactEdge {
  std::string id;
  int initial;
  int terminal;
  double length;
  Potential q;
};

struct Ray {
  std::string id;
  int base;
  double support;  // q vanishes beyond this arc length
  Potential q;
};

struct EdgeRef {
  bool is_ray;
  int index;
  friend bool operator==(const EdgeRef&, const EdgeRef&) = default;
  friend auto operator<=>(const EdgeRef& a, const EdgeRef& b) {
    if (a.is_ray != b.is_ray) return a.is_ray <=> b.is_ray;  // edges order before rays
    return a.index <=> b.index;
  }
};

struct Incidence {
  EdgeRef ref;
  bool at_initial;  // rays: always true (the base end)
};

class GraphBuilder;

// Immutable metric graph. Vertex / edge / ray orderings are their positions
// in the vectors (insertion order); all determinant row and column orders
// derive from them.
class MetricGraph {
 public:
  MetricGraph() = default;

  int vertex_count() const { return static_cast<int>(vertices_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  int ray_count() const { return static_cast<int>(rays_.size()); }

  const Vertex& vertex(int i) const { return vertices_[static_cast<std::size_t>(i)]; }
  const CompactEdge& edge(int i) const { return edges_[static_cast<std::size_t>(i)]; }
  const Ray& ray(int i) const { return rays_[static_cast<std::size_t>(i)]; }

  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<CompactEdge>& edges() const { return edges_; }
  const std::vector<Ray>& rays() const { return rays_; }

  std::optional<int> root() const { return root_; }
  int require_root() const;

  int vertex_index(std::string_view id) const;  // -1 when absent
  int edge_index(std::string_view id) const;
  int ray_index(std::string_view id) const;

  const std::vector<Incidence>& incidences(int v) const {
    return incidences_[static_cast<std::size_t>(v)];
  }
  int degree(int v) const { return static_cast<int>(incidences_[static_cast<std::size_t>(v)].size()); }
  bool is_boundary(int v) const { return vertex(v).kind != VertexKind::Internal; }

  double total_edge_length() const;  // |G|, compact edges only
  double max_abs_potential() const;
  int count_kind(VertexKind k) const;

  MetricGraph with_zero_potential() const;
  MetricGraph with_root(int v) const;
  MetricGraph without_root() const;
  // Same topology, potentials replaced per edge/ray index.
  MetricGraph with_potentials(std::vector<Potential> edge_q, std::vector<Potential> ray_q,
                              std::vector<double> ray_support) const;

  bool same_topology(const MetricGraph& other) const;

 private:
  friend class GraphBuilder;
  void rebuild_incidences();

  std::vector<Vertex> vertices_;
  std::vector<CompactEdge> edges_;
  std::vector<Ray> rays_;
  std::optional<int> root_;
  std::vector<std::vector<Incidence>> incidences_;
};

class GraphBuilder {
 public:
  int add_vertex(std::string id, VertexKind kind);
  // Orientation chosen by insertion order: initial = min(u, v).
  int add_edge(std::string id, int u, int v, double length, Potential q);
  // Orientation given explicitly; used by surgery to inherit anchors.
  int add_edge_oriented(std::string id, int initial, int terminal, double length, Potential q);
  int add_ray(std::string id, int base, double support, Potential q);
  void set_root(int v);

  int vertex_count() const { return static_cast<int>(g_.vertices_.size()); }

  MetricGraph build();

 private:
  MetricGraph g_;
  bool built_ = false;
};

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> violations;
};

// Connectivity plus the A-graph condition (every two cycles share at most one
// vertex, i.e. every biconnected block is a single edge or a simple cycle),
// boundary degrees, and root sanity.
ValidationReport validate_a_graph(const MetricGraph& g);

void require_valid(const MetricGraph& g);

}  // namespace qgraph
