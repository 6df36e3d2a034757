#include "qgraph/surgery.hpp"

#include <algorithm>
#include <set>

#include "qgraph/errors.hpp"

namespace qgraph {
namespace {

std::string unique_vertex_id(const MetricGraph& g, std::string base,
                             const std::vector<std::string>& pending) {
  auto taken = [&](const std::string& id) {
    if (g.vertex_index(id) >= 0) return true;
    return std::find(pending.begin(), pending.end(), id) != pending.end();
  };
  std::string id = std::move(base);
  while (taken(id)) id += "'";
  return id;
}

std::set<int> edge_set_vertices(const MetricGraph& g, const std::vector<EdgeRef>& part) {
  std::set<int> vs;
  for (const auto& ref : part) {
    if (ref.is_ray) {
      vs.insert(g.ray(ref.index).base);
    } else {
      vs.insert(g.edge(ref.index).initial);
      vs.insert(g.edge(ref.index).terminal);
    }
  }
  return vs;
}

}  // namespace

SurgeryResult split_vertex(const MetricGraph& g, int v) {
  if (v < 0 || v >= g.vertex_count()) throw PreconditionError("split_vertex: no such vertex");
  if (g.vertex(v).kind == VertexKind::BoundaryD) {
    throw PreconditionError("split_vertex is defined at internal and K-type vertices only");
  }

  SurgeryResult out;
  GraphBuilder b;
  std::vector<int> vmap(static_cast<std::size_t>(g.vertex_count()), -1);
  for (int i = 0; i < g.vertex_count(); ++i) {
    if (i == v) continue;
    vmap[static_cast<std::size_t>(i)] = b.add_vertex(g.vertex(i).id, g.vertex(i).kind);
    out.vertex_map.emplace_back(g.vertex(i).id, g.vertex(i).id);
  }

  // One D-type copy per incidence at v, ordered by the incident edges (edges
  // before rays, each in its own ordering; a self-loop's initial end first).
  auto incs = g.incidences(v);
  std::sort(incs.begin(), incs.end(), [](const Incidence& a, const Incidence& b) {
    if (a.ref != b.ref) return a.ref < b.ref;
    return a.at_initial && !b.at_initial;
  });
  std::vector<std::string> pending;
  struct Copy {
    Incidence inc;
    int new_vertex;
  };
  std::vector<Copy> copies;
  for (const auto& inc : incs) {
    std::string base = g.vertex(v).id + "'" +
                       (inc.ref.is_ray ? g.ray(inc.ref.index).id : g.edge(inc.ref.index).id);
    const bool self_loop =
        !inc.ref.is_ray && g.edge(inc.ref.index).initial == g.edge(inc.ref.index).terminal;
    if (self_loop) base += inc.at_initial ? ".0" : ".1";
    std::string id = unique_vertex_id(g, std::move(base), pending);
    pending.push_back(id);
    const int nv = b.add_vertex(id, VertexKind::BoundaryD);
    out.vertex_map.emplace_back(g.vertex(v).id, id);
    out.created.push_back(id);
    copies.push_back({inc, nv});
  }

  auto endpoint = [&](int old_vertex, EdgeRef ref, bool at_initial) {
    if (old_vertex != v) return vmap[static_cast<std::size_t>(old_vertex)];
    for (const auto& c : copies) {
      if (c.inc.ref == ref && c.inc.at_initial == at_initial) return c.new_vertex;
    }
    throw NumericalError("split_vertex: incidence bookkeeping failed");
  };

  for (int e = 0; e < g.edge_count(); ++e) {
    const auto& ed = g.edge(e);
    b.add_edge_oriented(ed.id, endpoint(ed.initial, {false, e}, true),
                        endpoint(ed.terminal, {false, e}, false), ed.length, ed.q);
    out.edge_map.emplace_back(ed.id, ed.id);
  }
  for (int r = 0; r < g.ray_count(); ++r) {
    const auto& ry = g.ray(r);
    b.add_ray(ry.id, endpoint(ry.base, {true, r}, true), ry.support, ry.q);
    out.edge_map.emplace_back(ry.id, ry.id);
  }
  if (auto root = g.root()) {
    if (*root != v) b.set_root(vmap[static_cast<std::size_t>(*root)]);
  }
  out.graph = b.build();
  return out;
}

int split_site(const MetricGraph& g, const std::vector<EdgeRef>& part) {
  if (part.empty()) throw PreconditionError("cut: part must contain at least one edge");
  std::vector<EdgeRef> rest;
  std::set<EdgeRef> in_part(part.begin(), part.end());
  for (int e = 0; e < g.edge_count(); ++e) {
    if (!in_part.count({false, e})) rest.push_back({false, e});
  }
  for (int r = 0; r < g.ray_count(); ++r) {
    if (!in_part.count({true, r})) rest.push_back({true, r});
  }
  if (in_part.size() != part.size()) throw PreconditionError("cut: duplicate edges in part");
  if (static_cast<int>(part.size()) == g.edge_count() + g.ray_count()) {
    throw PreconditionError("cut: part must be a proper subgraph");
  }
  const auto pv = edge_set_vertices(g, part);
  if (rest.empty()) {
    // The complement has no edges; without an explicit site the shared vertex
    // is ambiguous. Use cut_keep_at / cut_dirichlet_at instead.
    throw PreconditionError("cut: complement has no edges; pass the shared vertex explicitly");
  }
  auto rv = edge_set_vertices(g, rest);
  std::vector<int> shared;
  std::set_intersection(pv.begin(), pv.end(), rv.begin(), rv.end(), std::back_inserter(shared));
  if (shared.size() != 1) {
    throw PreconditionError("cut: part and rest must meet in exactly one vertex, found " +
                            std::to_string(shared.size()));
  }
  const int v = shared[0];
  if (g.vertex(v).kind == VertexKind::BoundaryD) {
    throw PreconditionError("cut: shared vertex must be internal or K-type");
  }
  return v;
}

namespace {

MetricGraph cut_keep_impl(const MetricGraph& g, const std::vector<EdgeRef>& part, int v) {
  std::set<EdgeRef> in_part(part.begin(), part.end());
  std::vector<EdgeRef> rest;
  for (int e = 0; e < g.edge_count(); ++e) {
    if (!in_part.count({false, e})) rest.push_back({false, e});
  }
  for (int r = 0; r < g.ray_count(); ++r) {
    if (!in_part.count({true, r})) rest.push_back({true, r});
  }
  int rest_degree_v = 0;
  for (const auto& inc : g.incidences(v)) {
    if (!in_part.count(inc.ref)) ++rest_degree_v;
  }
  if (rest_degree_v == 0) {
    // The rest is the bare vertex: a one-vertex graph with a K condition.
    GraphBuilder b;
    b.add_vertex(g.vertex(v).id, VertexKind::BoundaryK);
    return b.build();
  }
  MetricGraph out = edge_subgraph(g, rest, true);
  // edge_subgraph already turned v into K-type if it became degree one.
  return out;
}

}  // namespace

MetricGraph cut_keep(const MetricGraph& g, const std::vector<EdgeRef>& part) {
  const int v = split_site(g, part);
  return cut_keep_impl(g, part, v);
}

MetricGraph cut_keep_at(const MetricGraph& g, const std::vector<EdgeRef>& part, int v) {
  if (g.vertex(v).kind == VertexKind::BoundaryD) {
    throw PreconditionError("cut: shared vertex must be internal or K-type");
  }
  return cut_keep_impl(g, part, v);
}

MetricGraph cut_dirichlet_at(const MetricGraph& g, const std::vector<EdgeRef>& part, int v) {
  MetricGraph rest = cut_keep_at(g, part, v);
  const int nv = rest.vertex_index(g.vertex(v).id);
  if (nv < 0) throw NumericalError("cut_dirichlet: shared vertex vanished");
  if (rest.edge_count() + rest.ray_count() == 0) return MetricGraph{};  // E at a bare vertex
  return split_vertex(rest, nv).graph;
}

MetricGraph cut_dirichlet(const MetricGraph& g, const std::vector<EdgeRef>& part) {
  return cut_dirichlet_at(g, part, split_site(g, part));
}

SurgeryResult unroll_cycle(const MetricGraph& g, const AEdge& c) {
  if (c.kind != AEdge::Kind::Cycle) throw PreconditionError("unroll_cycle: a-edge is not a cycle");
  if (c.anchor < 0) throw PreconditionError("unroll_cycle: cycle anchor unset; compute orders first");
  const int u_c = c.anchor;
  const EdgeRef last = c.members.back();
  if (last.is_ray) throw PreconditionError("unroll_cycle: malformed cycle");
  const auto& closing = g.edge(last.index);

  SurgeryResult out;
  GraphBuilder b;
  for (int i = 0; i < g.vertex_count(); ++i) {
    b.add_vertex(g.vertex(i).id, g.vertex(i).kind);
    out.vertex_map.emplace_back(g.vertex(i).id, g.vertex(i).id);
  }
  const std::string vc_id = unique_vertex_id(g, g.vertex(u_c).id + "*", {});
  const int vc = b.add_vertex(vc_id, VertexKind::BoundaryK);
  out.created.push_back(vc_id);

  for (int e = 0; e < g.edge_count(); ++e) {
    const auto& ed = g.edge(e);
    int initial = ed.initial;
    int terminal = ed.terminal;
    if (e == last.index) {
      if (closing.initial == u_c && closing.terminal == u_c) {
        terminal = vc;  // self-loop: the parameter-L incidence moves to v_c
      } else if (closing.terminal == u_c) {
        terminal = vc;
      } else {
        initial = vc;
      }
    }
    b.add_edge_oriented(ed.id, initial, terminal, ed.length, ed.q);
    out.edge_map.emplace_back(ed.id, ed.id);
  }
  for (int r = 0; r < g.ray_count(); ++r) {
    const auto& ry = g.ray(r);
    b.add_ray(ry.id, ry.base, ry.support, ry.q);
    out.edge_map.emplace_back(ry.id, ry.id);
  }
  if (auto root = g.root()) b.set_root(*root);
  out.graph = b.build();
  return out;
}

std::vector<std::vector<EdgeRef>> components_at(const MetricGraph& g, int v) {
  // Components of g minus v, each reattached through its incidences at v.
  std::vector<int> comp(static_cast<std::size_t>(g.vertex_count()), -1);
  comp[static_cast<std::size_t>(v)] = -2;
  int next = 0;
  for (int s = 0; s < g.vertex_count(); ++s) {
    if (comp[static_cast<std::size_t>(s)] != -1) continue;
    comp[static_cast<std::size_t>(s)] = next;
    std::vector<int> stack{s};
    while (!stack.empty()) {
      const int w = stack.back();
      stack.pop_back();
      for (const auto& inc : g.incidences(w)) {
        if (inc.ref.is_ray) continue;
        const auto& e = g.edge(inc.ref.index);
        const int x = inc.at_initial ? e.terminal : e.initial;
        if (comp[static_cast<std::size_t>(x)] == -1) {
          comp[static_cast<std::size_t>(x)] = next;
          stack.push_back(x);
        }
      }
    }
    ++next;
  }
  // Self-loops at v and rays at v are their own components.
  std::vector<std::vector<EdgeRef>> parts;
  std::vector<int> comp_part(static_cast<std::size_t>(next), -1);
  auto part_of_comp = [&](int c) {
    if (comp_part[static_cast<std::size_t>(c)] < 0) {
      comp_part[static_cast<std::size_t>(c)] = static_cast<int>(parts.size());
      parts.emplace_back();
    }
    return comp_part[static_cast<std::size_t>(c)];
  };
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto& ed = g.edge(e);
    if (ed.initial == v && ed.terminal == v) {
      parts.push_back({{false, e}});
    } else if (ed.initial == v) {
      parts[static_cast<std::size_t>(part_of_comp(comp[static_cast<std::size_t>(ed.terminal)]))]
          .push_back({false, e});
    } else if (ed.terminal == v) {
      parts[static_cast<std::size_t>(part_of_comp(comp[static_cast<std::size_t>(ed.initial)]))]
          .push_back({false, e});
    } else {
      parts[static_cast<std::size_t>(part_of_comp(comp[static_cast<std::size_t>(ed.initial)]))]
          .push_back({false, e});
    }
  }
  for (int r = 0; r < g.ray_count(); ++r) {
    if (g.ray(r).base == v) {
      parts.push_back({{true, r}});
    } else {
      parts[static_cast<std::size_t>(part_of_comp(comp[static_cast<std::size_t>(g.ray(r).base)]))]
          .push_back({true, r});
    }
  }
  // Keep only parts that actually touch v.
  std::vector<std::vector<EdgeRef>> touching;
  for (auto& p : parts) {
    if (p.empty()) continue;
    bool touches = false;
    for (const auto& ref : p) {
      if (ref.is_ray) {
        touches = touches || g.ray(ref.index).base == v;
      } else {
        touches = touches || g.edge(ref.index).initial == v || g.edge(ref.index).terminal == v;
      }
    }
    if (touches) touching.push_back(std::move(p));
  }
  return touching;
}

}  // namespace qgraph
