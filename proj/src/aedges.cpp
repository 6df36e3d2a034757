#include "qgraph/aedges.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "qgraph/errors.hpp"

namespace qgraph {
namespace {

struct Blocks {
  // Each block is a list of compact edge indices: a bridge, a simple cycle,
  // or (in a non-A-graph) a tangle of overlapping cycles.
  std::vector<std::vector<int>> blocks;
};

class BlockFinder {
 public:
  explicit BlockFinder(const MetricGraph& g) : g_(g) {
    disc_.assign(static_cast<std::size_t>(g.vertex_count()), -1);
    low_.assign(static_cast<std::size_t>(g.vertex_count()), -1);
  }

  Blocks run() {
    for (int v = 0; v < g_.vertex_count(); ++v) {
      if (disc_[static_cast<std::size_t>(v)] < 0) dfs(v, -1);
    }
    return std::move(out_);
  }

 private:
  void dfs(int v, int entry_edge) {
    disc_[static_cast<std::size_t>(v)] = low_[static_cast<std::size_t>(v)] = timer_++;
    bool entry_skipped = false;
    for (const auto& inc : g_.incidences(v)) {
      if (inc.ref.is_ray) continue;
      const int ei = inc.ref.index;
      const auto& e = g_.edge(ei);
      if (e.initial == e.terminal) {
        // A self-loop is its own block; emit on the first of its two incidences.
        if (inc.at_initial) out_.blocks.push_back({ei});
        continue;
      }
      if (ei == entry_edge && !entry_skipped) {
        entry_skipped = true;  // parallel edges: skip only the edge we came in on
        continue;
      }
      const int w = inc.at_initial ? e.terminal : e.initial;
      if (disc_[static_cast<std::size_t>(w)] < 0) {
        stack_.push_back(ei);
        dfs(w, ei);
        low_[static_cast<std::size_t>(v)] =
            std::min(low_[static_cast<std::size_t>(v)], low_[static_cast<std::size_t>(w)]);
        if (low_[static_cast<std::size_t>(w)] >= disc_[static_cast<std::size_t>(v)]) {
          std::vector<int> block;
          while (true) {
            const int x = stack_.back();
            stack_.pop_back();
            block.push_back(x);
            if (x == ei) break;
          }
          std::sort(block.begin(), block.end());
          out_.blocks.push_back(std::move(block));
        }
      } else if (disc_[static_cast<std::size_t>(w)] < disc_[static_cast<std::size_t>(v)]) {
        stack_.push_back(ei);
        low_[static_cast<std::size_t>(v)] =
            std::min(low_[static_cast<std::size_t>(v)], disc_[static_cast<std::size_t>(w)]);
      }
    }
  }

  const MetricGraph& g_;
  std::vector<int> disc_, low_;
  std::vector<int> stack_;
  Blocks out_;
  int timer_ = 0;
};

enum class BlockShape { Bridge, Cycle, Tangle };

BlockShape classify_block(const MetricGraph& g, const std::vector<int>& block) {
  if (block.size() == 1) {
    const auto& e = g.edge(block[0]);
    return e.initial == e.terminal ? BlockShape::Cycle : BlockShape::Bridge;
  }
  std::set<int> vertices;
  for (int ei : block) {
    vertices.insert(g.edge(ei).initial);
    vertices.insert(g.edge(ei).terminal);
  }
  if (vertices.size() != block.size()) return BlockShape::Tangle;
  for (int v : vertices) {
    int deg = 0;
    for (int ei : block) {
      if (g.edge(ei).initial == v) ++deg;
      if (g.edge(ei).terminal == v) ++deg;
    }
    if (deg != 2) return BlockShape::Tangle;
  }
  return BlockShape::Cycle;
}

// Order a simple-cycle block as a closed chain starting at start_vertex,
// taking the smallest-index member edge there first.
std::vector<EdgeRef> chain_cycle(const MetricGraph& g, const std::vector<int>& block,
                                 int start_vertex) {
  if (block.size() == 1) return {{false, block[0]}};
  std::vector<EdgeRef> chain;
  std::vector<bool> used(block.size(), false);
  int v = start_vertex;
  for (std::size_t step = 0; step < block.size(); ++step) {
    int pick = -1;
    for (std::size_t k = 0; k < block.size(); ++k) {
      if (used[k]) continue;
      const auto& e = g.edge(block[k]);
      if (e.initial == v || e.terminal == v) {
        if (pick < 0 || block[k] < block[static_cast<std::size_t>(pick)]) {
          pick = static_cast<int>(k);
        }
      }
    }
    if (pick < 0) throw NumericalError("cycle chain walk failed");
    used[static_cast<std::size_t>(pick)] = true;
    const int ei = block[static_cast<std::size_t>(pick)];
    chain.push_back({false, ei});
    const auto& e = g.edge(ei);
    v = (e.initial == v) ? e.terminal : e.initial;
  }
  if (v != start_vertex) throw NumericalError("cycle chain did not close");
  return chain;
}

int smallest_member_vertex(const MetricGraph& g, const std::vector<int>& block) {
  const int e_min = *std::min_element(block.begin(), block.end());
  return g.edge(e_min).initial;
}

}  // namespace

void append_block_violations(const MetricGraph& g, ValidationReport& report) {
  const auto blocks = BlockFinder(g).run().blocks;
  for (const auto& block : blocks) {
    if (classify_block(g, block) != BlockShape::Tangle) continue;
    report.ok = false;
    // Exhibit two cycles sharing at least two vertices: fundamental cycles of
    // the block with respect to a spanning tree.
    std::set<int> vset;
    for (int ei : block) {
      vset.insert(g.edge(ei).initial);
      vset.insert(g.edge(ei).terminal);
    }
    std::vector<int> verts(vset.begin(), vset.end());
    auto vpos = [&verts](int v) {
      return static_cast<std::size_t>(std::lower_bound(verts.begin(), verts.end(), v) - verts.begin());
    };
    std::vector<int> parent_edge(verts.size(), -1);
    std::vector<int> parent_vertex(verts.size(), -1);
    std::vector<bool> visited(verts.size(), false);
    std::vector<int> order{verts[0]};
    visited[0] = true;
    std::vector<int> tree_edges;
    for (std::size_t head = 0; head < order.size(); ++head) {
      const int v = order[head];
      for (int ei : block) {
        const auto& e = g.edge(ei);
        int w = -1;
        if (e.initial == v) w = e.terminal;
        if (e.terminal == v) w = e.initial;
        if (w < 0 || visited[vpos(w)]) continue;
        visited[vpos(w)] = true;
        parent_edge[vpos(w)] = ei;
        parent_vertex[vpos(w)] = v;
        tree_edges.push_back(ei);
        order.push_back(w);
      }
    }
    auto path_to_root = [&](int v) {
      std::vector<int> vs;
      while (v >= 0) {
        vs.push_back(v);
        v = parent_vertex[vpos(v)];
      }
      return vs;
    };
    struct FundCycle {
      std::set<int> vertices;
      std::vector<int> edges;
    };
    std::vector<FundCycle> fcycles;
    for (int ei : block) {
      if (std::find(tree_edges.begin(), tree_edges.end(), ei) != tree_edges.end()) continue;
      const auto& e = g.edge(ei);
      auto pa = path_to_root(e.initial);
      auto pb = path_to_root(e.terminal);
      FundCycle fc;
      fc.edges.push_back(ei);
      for (int v : pa) fc.vertices.insert(v);
      for (int v : pb) fc.vertices.insert(v);
      fcycles.push_back(std::move(fc));
    }
    bool reported = false;
    for (std::size_t a = 0; a < fcycles.size() && !reported; ++a) {
      for (std::size_t b = a + 1; b < fcycles.size() && !reported; ++b) {
        std::vector<int> shared;
        std::set_intersection(fcycles[a].vertices.begin(), fcycles[a].vertices.end(),
                              fcycles[b].vertices.begin(), fcycles[b].vertices.end(),
                              std::back_inserter(shared));
        if (shared.size() >= 2) {
          std::string msg = "cycles through edges '" + g.edge(fcycles[a].edges[0]).id + "' and '" +
                            g.edge(fcycles[b].edges[0]).id + "' share vertices";
          for (int v : shared) msg += " '" + g.vertex(v).id + "'";
          report.violations.push_back(std::move(msg));
          reported = true;
        }
      }
    }
    if (!reported) {
      std::string msg = "block is not a simple cycle; edges:";
      for (int ei : block) msg += " '" + g.edge(ei).id + "'";
      report.violations.push_back(std::move(msg));
    }
  }
}

std::vector<AEdge> enumerate_cycles(const MetricGraph& g) {
  const auto blocks = BlockFinder(g).run().blocks;
  std::vector<AEdge> cycles;
  for (const auto& block : blocks) {
    const auto shape = classify_block(g, block);
    if (shape == BlockShape::Tangle) {
      throw PreconditionError("graph violates the A-graph cycle condition");
    }
    if (shape != BlockShape::Cycle) continue;
    AEdge c;
    c.kind = AEdge::Kind::Cycle;
    c.members = chain_cycle(g, block, smallest_member_vertex(g, block));
    cycles.push_back(std::move(c));
  }
  std::sort(cycles.begin(), cycles.end(), [](const AEdge& a, const AEdge& b) {
    return *std::min_element(a.members.begin(), a.members.end()) <
           *std::min_element(b.members.begin(), b.members.end());
  });
  return cycles;
}

std::vector<AEdge> a_edge_partition(const MetricGraph& g) {
  auto cycles = enumerate_cycles(g);
  std::vector<bool> in_cycle(static_cast<std::size_t>(g.edge_count()), false);
  for (const auto& c : cycles) {
    for (const auto& m : c.members) in_cycle[static_cast<std::size_t>(m.index)] = true;
  }
  std::vector<AEdge> all;
  for (int e = 0; e < g.edge_count(); ++e) {
    if (!in_cycle[static_cast<std::size_t>(e)]) {
      all.push_back({AEdge::Kind::SimpleEdge, {{false, e}}, -1, -1});
    }
  }
  for (int r = 0; r < g.ray_count(); ++r) {
    all.push_back({AEdge::Kind::SimpleEdge, {{true, r}}, -1, -1});
  }
  for (auto& c : cycles) all.push_back(std::move(c));
  std::sort(all.begin(), all.end(), [](const AEdge& a, const AEdge& b) {
    return *std::min_element(a.members.begin(), a.members.end()) <
           *std::min_element(b.members.begin(), b.members.end());
  });
  return all;
}

int a_edge_of(const std::vector<AEdge>& a_edges, EdgeRef ref) {
  for (std::size_t i = 0; i < a_edges.size(); ++i) {
    if (std::find(a_edges[i].members.begin(), a_edges[i].members.end(), ref) !=
        a_edges[i].members.end()) {
      return static_cast<int>(i);
    }
  }
  return -1;
}

std::vector<int> vertex_distances_from_root(const MetricGraph& g) {
  const int root = g.require_root();
  std::vector<int> dist(static_cast<std::size_t>(g.vertex_count()), -1);
  dist[static_cast<std::size_t>(root)] = 0;
  std::vector<int> queue{root};
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int v = queue[head];
    for (const auto& inc : g.incidences(v)) {
      if (inc.ref.is_ray) continue;
      const auto& e = g.edge(inc.ref.index);
      const int w = inc.at_initial ? e.terminal : e.initial;
      if (dist[static_cast<std::size_t>(w)] < 0) {
        dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(v)] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

namespace {

std::vector<int> a_edge_vertices(const MetricGraph& g, const AEdge& a) {
  std::set<int> vs;
  for (const auto& m : a.members) {
    if (m.is_ray) {
      vs.insert(g.ray(m.index).base);
    } else {
      vs.insert(g.edge(m.index).initial);
      vs.insert(g.edge(m.index).terminal);
    }
  }
  return {vs.begin(), vs.end()};
}

}  // namespace

AEdgeSet compute_orders(const MetricGraph& g) {
  const int root = g.require_root();
  if (g.degree(root) != 1) throw PreconditionError("root vertex must have degree one");
  const EdgeRef rooted_edge = g.incidences(root)[0].ref;

  AEdgeSet set;
  set.a_edges = a_edge_partition(g);
  set.rooted = a_edge_of(set.a_edges, rooted_edge);

  // Anchors: nearest member vertex to the root.
  const auto dist = vertex_distances_from_root(g);
  for (auto& a : set.a_edges) {
    int best = -1;
    for (int v : a_edge_vertices(g, a)) {
      const int d = dist[static_cast<std::size_t>(v)];
      if (d < 0) continue;
      if (best < 0 || d < dist[static_cast<std::size_t>(best)]) best = v;
    }
    a.anchor = best;
  }

  // BFS over a-edge adjacency (sharing a vertex).
  std::vector<std::vector<int>> at_vertex(static_cast<std::size_t>(g.vertex_count()));
  for (std::size_t i = 0; i < set.a_edges.size(); ++i) {
    for (int v : a_edge_vertices(g, set.a_edges[i])) {
      at_vertex[static_cast<std::size_t>(v)].push_back(static_cast<int>(i));
    }
  }
  std::vector<int> queue{set.rooted};
  set.a_edges[static_cast<std::size_t>(set.rooted)].order = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int i = queue[head];
    for (int v : a_edge_vertices(g, set.a_edges[static_cast<std::size_t>(i)])) {
      for (int j : at_vertex[static_cast<std::size_t>(v)]) {
        if (set.a_edges[static_cast<std::size_t>(j)].order < 0) {
          set.a_edges[static_cast<std::size_t>(j)].order =
              set.a_edges[static_cast<std::size_t>(i)].order + 1;
          queue.push_back(j);
        }
      }
    }
  }
  for (const auto& a : set.a_edges) {
    if (a.order < 0) throw PreconditionError("a-edge unreachable from the root");
    set.graph_order = std::max(set.graph_order, a.order);
  }

  // Re-chain cycles so the member list starts at the anchor.
  for (auto& a : set.a_edges) {
    if (a.kind != AEdge::Kind::Cycle) continue;
    std::vector<int> block;
    for (const auto& m : a.members) block.push_back(m.index);
    std::sort(block.begin(), block.end());
    a.members = chain_cycle(g, block, a.anchor);
  }
  return set;
}

std::vector<EdgeRef> edges_beyond(const MetricGraph& g, const AEdge& a) {
  const int root = g.require_root();
  const EdgeRef rooted_edge = g.incidences(root)[0].ref;
  std::vector<EdgeRef> keep = a.members;
  if (std::find(a.members.begin(), a.members.end(), rooted_edge) != a.members.end()) {
    // Every path through the rooted edge meets a trivially: keep everything.
    keep.clear();
    for (int e = 0; e < g.edge_count(); ++e) keep.push_back({false, e});
    for (int r = 0; r < g.ray_count(); ++r) keep.push_back({true, r});
    return keep;
  }
  // Components of the graph with a's edges removed; everything cut off from
  // the root's component lies beyond a.
  std::vector<bool> removed_edge(static_cast<std::size_t>(g.edge_count()), false);
  for (const auto& m : a.members) {
    if (!m.is_ray) removed_edge[static_cast<std::size_t>(m.index)] = true;
  }
  std::vector<int> comp(static_cast<std::size_t>(g.vertex_count()), -1);
  int next = 0;
  for (int s = 0; s < g.vertex_count(); ++s) {
    if (comp[static_cast<std::size_t>(s)] >= 0) continue;
    comp[static_cast<std::size_t>(s)] = next;
    std::vector<int> stack{s};
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (const auto& inc : g.incidences(v)) {
        if (inc.ref.is_ray) continue;
        if (removed_edge[static_cast<std::size_t>(inc.ref.index)]) continue;
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
  const int root_comp = comp[static_cast<std::size_t>(root)];
  for (int e = 0; e < g.edge_count(); ++e) {
    if (removed_edge[static_cast<std::size_t>(e)]) continue;
    if (comp[static_cast<std::size_t>(g.edge(e).initial)] != root_comp) keep.push_back({false, e});
  }
  for (int r = 0; r < g.ray_count(); ++r) {
    const EdgeRef ref{true, r};
    if (std::find(a.members.begin(), a.members.end(), ref) != a.members.end()) continue;
    if (comp[static_cast<std::size_t>(g.ray(r).base)] != root_comp) keep.push_back(ref);
  }
  std::sort(keep.begin(), keep.end());
  return keep;
}

MetricGraph subgraph_beyond(const MetricGraph& g, const AEdge& a) {
  return edge_subgraph(g, edges_beyond(g, a), true);
}

bool is_boundary_cycle(const MetricGraph& g, const AEdge& c) {
  if (c.kind != AEdge::Kind::Cycle) return false;
  auto beyond = edges_beyond(g, c);
  auto members = c.members;
  std::sort(members.begin(), members.end());
  return beyond == members;
}

MetricGraph edge_subgraph(const MetricGraph& g, const std::vector<EdgeRef>& keep,
                          bool retype_new_boundary) {
  std::vector<bool> keep_edge(static_cast<std::size_t>(g.edge_count()), false);
  std::vector<bool> keep_ray(static_cast<std::size_t>(g.ray_count()), false);
  for (const auto& ref : keep) {
    if (ref.is_ray) {
      keep_ray[static_cast<std::size_t>(ref.index)] = true;
    } else {
      keep_edge[static_cast<std::size_t>(ref.index)] = true;
    }
  }
  std::vector<int> new_degree(static_cast<std::size_t>(g.vertex_count()), 0);
  for (int e = 0; e < g.edge_count(); ++e) {
    if (!keep_edge[static_cast<std::size_t>(e)]) continue;
    new_degree[static_cast<std::size_t>(g.edge(e).initial)]++;
    new_degree[static_cast<std::size_t>(g.edge(e).terminal)]++;
  }
  for (int r = 0; r < g.ray_count(); ++r) {
    if (keep_ray[static_cast<std::size_t>(r)]) new_degree[static_cast<std::size_t>(g.ray(r).base)]++;
  }

  GraphBuilder b;
  std::vector<int> vmap(static_cast<std::size_t>(g.vertex_count()), -1);
  for (int v = 0; v < g.vertex_count(); ++v) {
    if (new_degree[static_cast<std::size_t>(v)] == 0) continue;
    VertexKind kind = g.vertex(v).kind;
    if (retype_new_boundary && kind == VertexKind::Internal &&
        new_degree[static_cast<std::size_t>(v)] == 1 && g.degree(v) > 1) {
      kind = VertexKind::BoundaryK;
    }
    vmap[static_cast<std::size_t>(v)] = b.add_vertex(g.vertex(v).id, kind);
  }
  for (int e = 0; e < g.edge_count(); ++e) {
    if (!keep_edge[static_cast<std::size_t>(e)]) continue;
    const auto& ed = g.edge(e);
    b.add_edge_oriented(ed.id, vmap[static_cast<std::size_t>(ed.initial)],
                        vmap[static_cast<std::size_t>(ed.terminal)], ed.length, ed.q);
  }
  for (int r = 0; r < g.ray_count(); ++r) {
    if (!keep_ray[static_cast<std::size_t>(r)]) continue;
    const auto& ry = g.ray(r);
    b.add_ray(ry.id, vmap[static_cast<std::size_t>(ry.base)], ry.support, ry.q);
  }
  if (auto root = g.root()) {
    if (vmap[static_cast<std::size_t>(*root)] >= 0) b.set_root(vmap[static_cast<std::size_t>(*root)]);
  }
  return b.build();
}

}  // namespace qgraph
