#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <set>

#include "doctest.h"
#include "qgraph/aedges.hpp"
#include "qgraph/errors.hpp"
#include "qgraph/graph_io.hpp"
#include "qgraph/surgery.hpp"
#include "test_support.hpp"

using namespace qgraph;
using namespace qgraph::testing;

namespace {

int n_factor(const MetricGraph& g) {
  return g.count_kind(VertexKind::BoundaryD) + static_cast<int>(enumerate_cycles(g).size());
}

double compact_length(const MetricGraph& g) { return g.total_edge_length(); }

}  // namespace

TEST_CASE("split of a 3-star center gives three intervals with D ends") {
  const auto g = star({0.5, 0.8, 1.1});
  const auto res = split_vertex(g, g.vertex_index("c"));
  CHECK(res.graph.edge_count() == 3);
  CHECK(res.created.size() == 3);
  CHECK(res.graph.count_kind(VertexKind::BoundaryD) == 6);
  // New vertices appended after the surviving originals, in edge order.
  for (std::size_t i = 0; i < res.created.size(); ++i) {
    CHECK(res.graph.vertex_index(res.created[i]) == 3 + static_cast<int>(i));
  }
  CHECK_FALSE(validate_a_graph(res.graph).ok);  // three disjoint intervals
}

TEST_CASE("split at a loop vertex turns the loop into a D-D interval") {
  const auto g = loop_graph(1.4);
  const auto res = split_vertex(g, 0);
  CHECK(res.created.size() == 2);
  CHECK(res.graph.edge_count() == 1);
  const auto& e = res.graph.edge(0);
  CHECK(e.initial != e.terminal);
  CHECK(res.graph.vertex(e.initial).kind == VertexKind::BoundaryD);
  CHECK(res.graph.vertex(e.terminal).kind == VertexKind::BoundaryD);
  CHECK(e.length == 1.4);
}

TEST_CASE("split refuses D-type vertices") {
  const auto g = interval(1.0, VertexKind::BoundaryD, VertexKind::BoundaryK);
  CHECK_THROWS_AS((void)split_vertex(g, 0), PreconditionError);
}

TEST_CASE("N count law: splitting adds one per single-a-edge component") {
  std::mt19937 rng(21);
  int checked = 0;
  for (int trial = 0; trial < 40 && checked < 12; ++trial) {
    const auto g = random_a_graph(rng);
    for (int v = 0; v < g.vertex_count(); ++v) {
      if (g.vertex(v).kind != VertexKind::Internal) continue;
      for (const auto& part : components_at(g, v)) {
        const MetricGraph gk = edge_subgraph(g, part, true);
        const int vk = gk.vertex_index(g.vertex(v).id);
        if (vk < 0) continue;
        const auto split = split_vertex(gk, vk).graph;
        CHECK(n_factor(split) == n_factor(gk) + 1);
        ++checked;
      }
    }
  }
  CHECK(checked >= 12);
}

TEST_CASE("cut keep: lasso loop off leaves the stem with a K end") {
  const auto g = lasso(1.0, 1.2);
  const auto rest = cut_keep(g, {{false, 1}});
  CHECK(rest.edge_count() == 1);
  CHECK(rest.edge(0).id == "e0");
  const int a = rest.vertex_index("a");
  CHECK(rest.vertex(a).kind == VertexKind::BoundaryK);
  CHECK(rest.root().has_value());
}

TEST_CASE("cut keep: one star leg off leaves a 2-star") {
  const auto g = star({0.5, 0.8, 1.1});
  const auto rest = cut_keep(g, {{false, 2}});
  CHECK(rest.edge_count() == 2);
  const int c = rest.vertex_index("c");
  CHECK(rest.vertex(c).kind == VertexKind::Internal);
}

TEST_CASE("cut keep: removing the only ray leaves the compact part") {
  const auto g = loop_with_ray(1.0, 0.0);
  const auto rest = cut_keep(g, {{true, 0}});
  CHECK(rest.ray_count() == 0);
  CHECK(rest.edge_count() == 1);
  CHECK(rest.vertex(0).kind == VertexKind::Internal);  // loop keeps degree two
}

TEST_CASE("cut dirichlet splits the shared vertex into D copies") {
  const auto g = lasso(1.0, 1.2);
  const auto rest = cut_dirichlet(g, {{false, 1}});
  CHECK(rest.edge_count() == 1);
  const auto& e = rest.edge(0);
  const bool d_end = rest.vertex(e.initial).kind == VertexKind::BoundaryD ||
                     rest.vertex(e.terminal).kind == VertexKind::BoundaryD;
  CHECK(d_end);
}

TEST_CASE("cut with a part not meeting the rest in one vertex fails") {
  const auto g = star({0.5, 0.8, 1.1});
  CHECK_THROWS_AS((void)cut_keep(g, {{false, 0}, {false, 1}, {false, 2}}), PreconditionError);
}

TEST_CASE("length bookkeeping under cuts and splits") {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 15; ++trial) {
    const auto g = random_a_graph(rng);
    // Splits preserve total compact length.
    for (int v = 0; v < g.vertex_count(); ++v) {
      if (g.vertex(v).kind == VertexKind::BoundaryD) continue;
      CHECK(compact_length(split_vertex(g, v).graph) == doctest::Approx(compact_length(g)));
      break;
    }
    // Ray cut: |C_D(G, r)| = |G| and N grows.
    if (g.ray_count() > 0) {
      const int base = g.ray(0).base;
      if (g.vertex(base).kind != VertexKind::BoundaryD) {
        const auto cd = cut_dirichlet_at(g, {{true, 0}}, base);
        CHECK(compact_length(cd) == doctest::Approx(compact_length(g)));
        CHECK(n_factor(cd) >= n_factor(g) + 1);
      }
    }
    // Boundary-edge cut: |G_r| = |G| - |r| and N does not drop.
    const auto set = compute_orders(g);
    for (const auto& a : set.a_edges) {
      if (a.kind != AEdge::Kind::SimpleEdge || a.members[0].is_ray) continue;
      const int e = a.members[0].index;
      const auto& ed = g.edge(e);
      const bool bdry = g.is_boundary(ed.initial) || g.is_boundary(ed.terminal);
      if (!bdry) continue;
      const int inner = g.is_boundary(ed.initial) ? ed.terminal : ed.initial;
      if (g.vertex(inner).kind == VertexKind::BoundaryD) continue;
      if (g.degree(inner) < 2) continue;
      const auto gr = cut_dirichlet_at(g, {{false, e}}, inner);
      CHECK(compact_length(gr) == doctest::Approx(compact_length(g) - ed.length));
      CHECK(n_factor(gr) >= n_factor(g));
      break;
    }
  }
}

TEST_CASE("disjoint surgeries commute") {
  const auto g = star({0.5, 0.8, 1.1, 1.3});
  auto cut_by_id = [](const MetricGraph& h, const std::string& id) {
    return cut_keep(h, {{false, h.edge_index(id)}});
  };
  const auto a = cut_by_id(cut_by_id(g, "e2"), "e1");
  const auto b = cut_by_id(cut_by_id(g, "e1"), "e2");
  CHECK(a.same_topology(b));
  CHECK(emit_graph_file(a) == emit_graph_file(b));
}

TEST_CASE("unroll: loop becomes an interval ending at the new K vertex") {
  const auto g = lasso(1.0, 1.3);
  const auto set = compute_orders(g);
  const auto res = unroll_cycle(g, set.a_edges[1]);
  CHECK(res.created.size() == 1);
  const auto& un = res.graph;
  CHECK(un.edge_count() == 2);
  const auto& c = un.edge(1);
  CHECK(c.initial != c.terminal);
  const int vc = un.vertex_index(res.created[0]);
  CHECK((c.initial == vc || c.terminal == vc));
  CHECK(un.vertex(vc).kind == VertexKind::BoundaryK);
  CHECK(c.length == 1.3);
  CHECK(validate_a_graph(un).ok);
}

TEST_CASE("unroll: triangle cycle becomes a chain re-terminated at v_c") {
  GraphBuilder b;
  const int v0 = b.add_vertex("v0", VertexKind::BoundaryD);
  const int a = b.add_vertex("a", VertexKind::Internal);
  const int p = b.add_vertex("p", VertexKind::Internal);
  const int q = b.add_vertex("q", VertexKind::Internal);
  b.add_edge("e0", v0, a, 0.6, Potential::zero());
  b.add_edge("t1", a, p, 1.0, Potential::zero());
  b.add_edge("t2", p, q, 1.1, Potential::zero());
  b.add_edge("t3", q, a, 1.2, Potential::zero());
  b.set_root(v0);
  const auto g = b.build();
  const auto set = compute_orders(g);
  REQUIRE(set.a_edges.size() == 2);
  const auto& cyc = set.a_edges[1];
  REQUIRE(cyc.kind == AEdge::Kind::Cycle);
  CHECK(cyc.anchor == a);
  const auto res = unroll_cycle(g, cyc);
  const auto& un = res.graph;
  CHECK(enumerate_cycles(un).empty());
  // The chain starts at a with t1 (smaller id), so t3 gets re-terminated.
  const auto& t3 = un.edge(un.edge_index("t3"));
  const int vc = un.vertex_index(res.created[0]);
  CHECK((t3.initial == vc || t3.terminal == vc));
  const auto& t1 = un.edge(un.edge_index("t1"));
  CHECK(t1.initial == un.vertex_index("a"));
}

TEST_CASE("unroll copies the potential with the edge parameterization") {
  const auto q = Potential::piecewise_const({0.0, 0.4, 0.9}, {1.0, -2.0, 0.5});
  const auto g = lasso(1.0, 1.3, Potential::zero(), q);
  const auto set = compute_orders(g);
  const auto res = unroll_cycle(g, set.a_edges[1]);
  const auto& c = res.graph.edge(1);
  CHECK(c.q == q);
}

TEST_CASE("surgery output round-trips through the graph file format") {
  const auto g = lasso(1.0, 1.3);
  const auto set = compute_orders(g);
  const auto un = unroll_cycle(g, set.a_edges[1]).graph;
  const std::string text = emit_graph_file(un);
  const auto parsed = parse_graph_file(text);
  CHECK(emit_graph_file(parsed) == text);
  CHECK(parsed.same_topology(un));
}
