#include "qgraph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "qgraph/errors.hpp"

namespace qgraph {

std::string_view to_string(VertexKind k) {
  switch (k) {
    case VertexKind::Internal:
      return "internal";
    case VertexKind::BoundaryD:
      return "boundary_D";
    case VertexKind::BoundaryK:
      return "boundary_K";
  }
  return "?";
}

int MetricGraph::require_root() const {
  if (!root_) throw PreconditionError("operation requires a rooted graph");
  return *root_;
}

int MetricGraph::vertex_index(std::string_view id) const {
  for (int i = 0; i < vertex_count(); ++i) {
    if (vertices_[static_cast<std::size_t>(i)].id == id) return i;
  }
  return -1;
}

int MetricGraph::edge_index(std::string_view id) const {
  for (int i = 0; i < edge_count(); ++i) {
    if (edges_[static_cast<std::size_t>(i)].id == id) return i;
  }
  return -1;
}

int MetricGraph::ray_index(std::string_view id) const {
  for (int i = 0; i < ray_count(); ++i) {
    if (rays_[static_cast<std::size_t>(i)].id == id) return i;
  }
  return -1;
}

double MetricGraph::total_edge_length() const {
  double t = 0.0;
  for (const auto& e : edges_) t += e.length;
  return t;
}

double MetricGraph::max_abs_potential() const {
  double m = 0.0;
  for (const auto& e : edges_) m = std::max(m, e.q.max_abs(e.length));
  for (const auto& r : rays_) m = std::max(m, r.q.max_abs(r.support));
  return m;
}

int MetricGraph::count_kind(VertexKind k) const {
  int n = 0;
  for (const auto& v : vertices_) {
    if (v.kind == k) ++n;
  }
  return n;
}

MetricGraph MetricGraph::with_zero_potential() const {
  MetricGraph g = *this;
  for (auto& e : g.edges_) e.q = Potential::zero();
  for (auto& r : g.rays_) {
    r.q = Potential::zero();
    r.support = 0.0;
  }
  return g;
}

MetricGraph MetricGraph::with_root(int v) const {
  MetricGraph g = *this;
  g.root_ = v;
  return g;
}

MetricGraph MetricGraph::without_root() const {
  MetricGraph g = *this;
  g.root_.reset();
  return g;
}

MetricGraph MetricGraph::with_potentials(std::vector<Potential> edge_q, std::vector<Potential> ray_q,
                                         std::vector<double> ray_support) const {
  if (edge_q.size() != edges_.size() || ray_q.size() != rays_.size() ||
      ray_support.size() != rays_.size()) {
    throw PreconditionError("potential assignment does not match graph shape");
  }
  MetricGraph g = *this;
  for (std::size_t i = 0; i < edge_q.size(); ++i) g.edges_[i].q = std::move(edge_q[i]);
  for (std::size_t i = 0; i < ray_q.size(); ++i) {
    g.rays_[i].q = std::move(ray_q[i]);
    g.rays_[i].support = ray_support[i];
  }
  return g;
}

bool MetricGraph::same_topology(const MetricGraph& other) const {
  if (vertex_count() != other.vertex_count() || edge_count() != other.edge_count() ||
      ray_count() != other.ray_count() || root_ != other.root_) {
    return false;
  }
  for (int i = 0; i < vertex_count(); ++i) {
    if (vertex(i).id != other.vertex(i).id || vertex(i).kind != other.vertex(i).kind) return false;
  }
  for (int i = 0; i < edge_count(); ++i) {
    const auto& a = edge(i);
    const auto& b = other.edge(i);
    if (a.id != b.id || a.initial != b.initial || a.terminal != b.terminal || a.length != b.length) {
      return false;
    }
  }
  for (int i = 0; i < ray_count(); ++i) {
    if (ray(i).id != other.ray(i).id || ray(i).base != other.ray(i).base) return false;
  }
  return true;
}

void MetricGraph::rebuild_incidences() {
  incidences_.assign(vertices_.size(), {});
  for (int i = 0; i < edge_count(); ++i) {
    const auto& e = edges_[static_cast<std::size_t>(i)];
    incidences_[static_cast<std::size_t>(e.initial)].push_back({{false, i}, true});
    incidences_[static_cast<std::size_t>(e.terminal)].push_back({{false, i}, false});
  }
  for (int i = 0; i < ray_count(); ++i) {
    const auto& r = rays_[static_cast<std::size_t>(i)];
    incidences_[static_cast<std::size_t>(r.base)].push_back({{true, i}, true});
  }
}

int GraphBuilder::add_vertex(std::string id, VertexKind kind) {
  if (g_.vertex_index(id) >= 0) throw InputError("duplicate vertex id '" + id + "'");
  g_.vertices_.push_back({std::move(id), kind});
  return static_cast<int>(g_.vertices_.size()) - 1;
}

int GraphBuilder::add_edge(std::string id, int u, int v, double length, Potential q) {
  return add_edge_oriented(std::move(id), std::min(u, v), std::max(u, v), length, std::move(q));
}

int GraphBuilder::add_edge_oriented(std::string id, int initial, int terminal, double length,
                                    Potential q) {
  const int n = static_cast<int>(g_.vertices_.size());
  if (initial < 0 || initial >= n || terminal < 0 || terminal >= n) {
    throw InputError("edge '" + id + "' references an unknown vertex");
  }
  if (g_.edge_index(id) >= 0 || g_.ray_index(id) >= 0) {
    throw InputError("duplicate edge id '" + id + "'");
  }
  if (!(length > 0.0)) throw InputError("edge '" + id + "' must have positive length");
  if (!q.covers(length)) throw InputError("edge '" + id + "': potential grid does not cover the edge");
  if (q.kind() == Potential::Kind::PiecewiseConst && q.breakpoints().back() >= length) {
    throw InputError("edge '" + id + "': potential breakpoints must lie inside the edge");
  }
  g_.edges_.push_back({std::move(id), initial, terminal, length, std::move(q)});
  return static_cast<int>(g_.edges_.size()) - 1;
}

int GraphBuilder::add_ray(std::string id, int base, double support, Potential q) {
  const int n = static_cast<int>(g_.vertices_.size());
  if (base < 0 || base >= n) throw InputError("ray '" + id + "' references an unknown vertex");
  if (g_.edge_index(id) >= 0 || g_.ray_index(id) >= 0) {
    throw InputError("duplicate ray id '" + id + "'");
  }
  if (support < 0.0) throw InputError("ray '" + id + "' must have nonnegative support");
  if (!q.zero_beyond(support)) {
    throw InputError("ray '" + id + "': potential does not vanish beyond its support radius");
  }
  if (!q.covers(support)) throw InputError("ray '" + id + "': potential grid does not cover the support");
  g_.rays_.push_back({std::move(id), base, support, std::move(q)});
  return static_cast<int>(g_.rays_.size()) - 1;
}

void GraphBuilder::set_root(int v) {
  if (v < 0 || v >= static_cast<int>(g_.vertices_.size())) {
    throw InputError("root references an unknown vertex");
  }
  g_.root_ = v;
}

MetricGraph GraphBuilder::build() {
  if (built_) throw PreconditionError("GraphBuilder::build called twice");
  built_ = true;
  g_.rebuild_incidences();
  return std::move(g_);
}

namespace {

// Vertex components treating edges (not rays) and rays as connections from
// base to nothing; rays never disconnect anything.
std::vector<int> vertex_components(const MetricGraph& g) {
  std::vector<int> comp(static_cast<std::size_t>(g.vertex_count()), -1);
  int next = 0;
  for (int s = 0; s < g.vertex_count(); ++s) {
    if (comp[static_cast<std::size_t>(s)] >= 0) continue;
    std::vector<int> stack{s};
    comp[static_cast<std::size_t>(s)] = next;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (const auto& inc : g.incidences(v)) {
        if (inc.ref.is_ray) continue;
        const auto& e = g.edge(inc.ref.index);
        const int w = inc.at_initial ? e.terminal : e.initial;
        if (comp[static_cast<std::size_t>(w)] < 0) {
          comp[static_cast<std::size_t>(w)] = next;
          stack.push_back(w);
        }
      }
    }
    ++next;
  }
  return comp;
}

}  // namespace

// Defined in aedges.cpp next to the block decomposition.
void append_block_violations(const MetricGraph& g, ValidationReport& report);

ValidationReport validate_a_graph(const MetricGraph& g) {
  ValidationReport report;
  auto fail = [&report](std::string msg) {
    report.ok = false;
    report.violations.push_back(std::move(msg));
  };

  // Boundary vertices have total incidence degree one (a self-loop counts twice).
  for (int v = 0; v < g.vertex_count(); ++v) {
    if (g.is_boundary(v) && g.degree(v) != 1) {
      fail("boundary vertex '" + g.vertex(v).id + "' has degree " + std::to_string(g.degree(v)));
    }
  }

  // Connectivity.
  if (g.vertex_count() > 0) {
    const auto comp = vertex_components(g);
    const int n_comp = 1 + *std::max_element(comp.begin(), comp.end());
    if (n_comp > 1) {
      std::string msg = "graph is disconnected; components rooted at:";
      std::vector<bool> seen(static_cast<std::size_t>(n_comp), false);
      for (int v = 0; v < g.vertex_count(); ++v) {
        const auto c = static_cast<std::size_t>(comp[static_cast<std::size_t>(v)]);
        if (!seen[c]) {
          seen[c] = true;
          msg += " '" + g.vertex(v).id + "'";
        }
      }
      fail(msg);
    }
  }

  // Root sanity.
  if (auto r = g.root()) {
    if (!g.is_boundary(*r)) fail("root '" + g.vertex(*r).id + "' is not a boundary vertex");
  }

  // A-graph condition via blocks.
  append_block_violations(g, report);

  return report;
}

void require_valid(const MetricGraph& g) {
  const auto report = validate_a_graph(g);
  if (!report.ok) {
    std::string msg = "graph fails validation:";
    for (const auto& v : report.violations) msg += "\n  " + v;
    throw PreconditionError(msg);
  }
}

}  // namespace qgraph
