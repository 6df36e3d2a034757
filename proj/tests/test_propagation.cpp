#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "qgraph/errors.hpp"
#include "qgraph/propagation.hpp"
#include "qgraph/surgery.hpp"
#include "test_support.hpp"

using namespace qgraph;
using namespace qgraph::testing;

namespace {

MetricGraph star_with_rays() {
  // Root leg plus two rays at the center.
  GraphBuilder b;
  const int v0 = b.add_vertex("v0", VertexKind::BoundaryD);
  const int c = b.add_vertex("c", VertexKind::Internal);
  b.add_edge("e0", v0, c, 1.0, Potential::zero());
  b.add_ray("r0", c, 0.5, Potential::piecewise_const({0.0, 0.5}, {-1.0, 0.0}));
  b.add_ray("r1", c, 0.0, Potential::zero());
  b.set_root(v0);
  return b.build();
}

MetricGraph chain_edge_ray() {
  // root edge -> internal edge -> ray.
  GraphBuilder b;
  const int v0 = b.add_vertex("v0", VertexKind::BoundaryD);
  const int a = b.add_vertex("a", VertexKind::Internal);
  const int c = b.add_vertex("c", VertexKind::Internal);
  b.add_edge("e0", v0, a, 1.0, Potential::zero());
  b.add_edge("e1", a, c, 0.8, Potential::zero());
  b.add_ray("r0", c, 0.0, Potential::zero());
  b.set_root(v0);
  return b.build();
}

}  // namespace

TEST_CASE("additivity closed forms at a 2-star center") {
  GraphBuilder b;
  const int t1 = b.add_vertex("t1", VertexKind::BoundaryD);
  const int v = b.add_vertex("v", VertexKind::Internal);
  const int t2 = b.add_vertex("t2", VertexKind::BoundaryD);
  const double l1 = 0.9, l2 = 1.3;
  b.add_edge("e1", t1, v, l1, Potential::zero());
  b.add_edge("e2", v, t2, l2, Potential::zero());
  b.set_root(t1);
  const auto g = b.build();
  const auto sp = SpectralPoint::from_lambda({1.8, 1.2});
  CHECK(additivity_residual(g, v, {{{false, 0}}, {{false, 1}}}, sp) <= 1e-8);
  // Closed form: the sum of two interval Weyl functions.
  const Complex whole = weyl_function(g, v, sp).value;
  const Complex want = -sp.rho * std::cos(sp.rho * l1) / std::sin(sp.rho * l1) -
                       sp.rho * std::cos(sp.rho * l2) / std::sin(sp.rho * l2);
  CHECK(std::abs(whole - want) <= 1e-8 * (1.0 + std::abs(want)));
}

TEST_CASE("additivity closed form for ray plus interval") {
  GraphBuilder b;
  const int v = b.add_vertex("v", VertexKind::Internal);
  const int t = b.add_vertex("t", VertexKind::BoundaryD);
  const double len = 1.1;
  b.add_edge("e0", v, t, len, Potential::zero());
  b.add_ray("r0", v, 0.0, Potential::zero());
  b.set_root(t);
  const auto g = b.build();
  const auto sp = SpectralPoint::from_lambda({2.4, 0.8});
  CHECK(additivity_residual(g, v, {{{false, 0}}, {{true, 0}}}, sp) <= 1e-8);
  const Complex whole = weyl_function(g, v, sp).value;
  const Complex want =
      Complex(0, 1) * sp.rho - sp.rho * std::cos(sp.rho * len) / std::sin(sp.rho * len);
  CHECK(std::abs(whole - want) <= 1e-8 * (1.0 + std::abs(want)));
}

TEST_CASE("additivity on random lasso decompositions with potentials") {
  std::mt19937 rng(91);
  int tested = 0;
  for (int trial = 0; trial < 50 && tested < 12; ++trial) {
    const auto g = random_a_graph(rng, {.with_potential = true});
    for (int v = 0; v < g.vertex_count() && tested < 12; ++v) {
      if (g.vertex(v).kind != VertexKind::Internal) continue;
      const auto parts = components_at(g, v);
      if (parts.size() < 2) continue;
      for (const auto& sp : random_lambdas(rng, 3)) {
        CHECK(additivity_residual(g, v, parts, sp) <= 1e-6);
      }
      ++tested;
    }
  }
  CHECK(tested >= 8);
}

TEST_CASE("ray matching identity and m-addition") {
  const auto g = star_with_rays();
  std::mt19937 rng(97);
  for (const auto& sp : random_lambdas(rng, 8)) {
    CHECK(matching_residual_ray(g, 0, sp) <= 1e-8);
    CHECK(matching_residual_ray(g, 1, sp) <= 1e-8);
    CHECK(m_addition_residual(g, 0, sp) <= 1e-8);
    CHECK(m_addition_residual(g, 1, sp) <= 1e-8);
  }
}

TEST_CASE("boundary-edge matching identity for the Weyl solution") {
  const auto g = chain_edge_ray();
  std::mt19937 rng(101);
  for (const auto& sp : random_lambdas(rng, 8)) {
    CHECK(matching_residual_edge(g, 0, sp) <= 1e-8);
    CHECK(m_addition_residual_edge(g, 0, sp) <= 1e-8);
  }
}

TEST_CASE("identities hold on randomized graphs with potentials") {
  std::mt19937 rng(103);
  int ray_checks = 0, edge_checks = 0;
  for (int trial = 0; trial < 60 && (ray_checks < 10 || edge_checks < 10); ++trial) {
    const auto g = random_a_graph(rng, {.with_potential = true});
    const auto lambdas = random_lambdas(rng, 2);
    if (g.ray_count() > 0 && g.vertex(g.ray(0).base).kind != VertexKind::BoundaryD &&
        ray_checks < 10) {
      for (const auto& sp : lambdas) {
        CHECK(matching_residual_ray(g, 0, sp) <= 1e-6);
        CHECK(m_addition_residual(g, 0, sp) <= 1e-6);
      }
      ++ray_checks;
    }
    if (edge_checks < 10) {
      for (int e = 0; e < g.edge_count(); ++e) {
        const auto& ed = g.edge(e);
        const bool bi = g.is_boundary(ed.initial), bt = g.is_boundary(ed.terminal);
        if (bi == bt) continue;
        const int inner = bi ? ed.terminal : ed.initial;
        if (g.vertex(inner).kind == VertexKind::BoundaryD || g.degree(inner) < 2) continue;
        for (const auto& sp : lambdas) {
          CHECK(matching_residual_edge(g, e, sp) <= 1e-6);
          CHECK(m_addition_residual_edge(g, e, sp) <= 1e-6);
        }
        ++edge_checks;
        break;
      }
    }
  }
  CHECK(ray_checks >= 10);
  CHECK(edge_checks >= 10);
}

TEST_CASE("schedule: star with root leg and two rays") {
  const auto steps = peel_schedule(star_with_rays());
  REQUIRE(steps.size() == 3);
  CHECK(steps[0].mu == 1);
  CHECK(steps[0].problem == PeelProblem::RayScattering);
  CHECK(steps[1].mu == 1);
  CHECK(steps[1].problem == PeelProblem::RayScattering);
  CHECK(steps[2].mu == 0);
  CHECK(steps[2].problem == PeelProblem::BoundaryEdge);
  CHECK(steps[2].a_edge_label == "e0");
}

TEST_CASE("schedule: lasso peels the boundary cycle then the root edge") {
  const auto steps = peel_schedule(lasso(1.0, 1.3));
  REQUIRE(steps.size() == 2);
  CHECK(steps[0].mu == 1);
  CHECK(steps[0].problem == PeelProblem::BoundaryCycle);
  CHECK(steps[1].mu == 0);
  CHECK(steps[1].problem == PeelProblem::BoundaryEdge);
}

TEST_CASE("schedule: chain root-edge, internal edge, ray") {
  const auto steps = peel_schedule(chain_edge_ray());
  REQUIRE(steps.size() == 3);
  CHECK(steps[0].problem == PeelProblem::RayScattering);
  CHECK(steps[0].mu == 2);
  CHECK(steps[1].problem == PeelProblem::InternalEdge);
  CHECK(steps[1].mu == 1);
  CHECK(steps[1].a_edge_label == "e1");
  CHECK(steps[2].problem == PeelProblem::BoundaryEdge);
  CHECK(steps[2].mu == 0);
}

TEST_CASE("schedule covers every a-edge exactly once on random graphs") {
  std::mt19937 rng(107);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = random_a_graph(rng, {.with_potential = false});
    const auto steps = peel_schedule(g);
    std::size_t members = 0;
    for (const auto& s : steps) members += s.a_edge.members.size();
    CHECK(members == static_cast<std::size_t>(g.edge_count() + g.ray_count()));
    for (std::size_t i = 1; i < steps.size(); ++i) {
      CHECK(steps[i - 1].mu >= steps[i].mu);
    }
  }
}

TEST_CASE("probe: identical potentials match at every step") {
  const auto g = star_with_rays();
  ProbeGrids grids;
  for (int i = 0; i < 8; ++i) grids.lambdas.push_back({0.7 + 1.1 * i, (i % 2) ? 1.0 : -1.0});
  for (int i = 1; i <= 12; ++i) grids.rhos.push_back(0.3 + 0.5 * i);
  const auto report = uniqueness_probe(g, g, grids);
  CHECK(!report.first_mismatch);
  for (const auto& s : report.steps) {
    CHECK(s.verdict == StepVerdict::Match);
    CHECK(s.residual <= 1e-8);
  }
}

TEST_CASE("probe: a bump on one ray is seen at that ray's step") {
  const auto g = star_with_rays();
  auto edge_q = std::vector<Potential>{g.edge(0).q};
  auto ray_q = std::vector<Potential>{g.ray(0).q, g.ray(1).q};
  auto supports = std::vector<double>{g.ray(0).support, g.ray(1).support};
  ray_q[0] = Potential::piecewise_const({0.0, 0.25, 0.5}, {-1.0, 0.0, 0.0});
  const auto gt = g.with_potentials(edge_q, ray_q, supports);

  ProbeGrids grids;
  for (int i = 0; i < 8; ++i) grids.lambdas.push_back({0.7 + 1.1 * i, (i % 2) ? 1.0 : -1.0});
  for (int i = 1; i <= 12; ++i) grids.rhos.push_back(0.3 + 0.5 * i);
  const auto report = uniqueness_probe(g, gt, grids);
  REQUIRE(report.first_mismatch.has_value());
  const auto& first = report.steps[static_cast<std::size_t>(*report.first_mismatch)];
  CHECK(first.residual >= 1e-3);
  CHECK(first.step.problem == PeelProblem::RayScattering);
  CHECK(first.step.ray == 0);
}

TEST_CASE("probe rejects mismatched topologies") {
  CHECK_THROWS_AS((void)uniqueness_probe(star_with_rays(), chain_edge_ray(), ProbeGrids::defaults()),
                  PreconditionError);
}
