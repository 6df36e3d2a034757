#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>

#include "doctest.h"
#include "qgraph/characteristic.hpp"
#include "qgraph/graph.hpp"
#include "qgraph/local_solutions.hpp"
#include "qgraph/surgery.hpp"
#include "test_support.hpp"

using namespace qgraph;
using namespace qgraph::testing;

namespace {

Complex delta_at(const MetricGraph& g, Complex lambda) {
  return delta(g, SpectralPoint::from_lambda(lambda));
}

}  // namespace

TEST_CASE("D-D interval: 4x4 system and det sin(rho L)/rho") {
  const double L = 1.3;
  const auto g = interval(L, VertexKind::BoundaryD, VertexKind::BoundaryD);
  const auto sp = SpectralPoint::from_lambda({2.0, 1.0});
  const auto a = assemble_system(g, sp);
  CHECK(a.system.m.rows() == 4);
  // Frozen symbolic expansion of the 4x4 system.
  const Complex want = std::sin(sp.rho * L) / sp.rho;
  CHECK(std::abs(determinant(a.system) - want) <= 1e-12 * std::abs(want));
}

TEST_CASE("loop: 3x3 system and det 2(1 - cos rho L)") {
  const double L = 0.9;
  const auto g = loop_graph(L);
  const auto sp = SpectralPoint::from_lambda({3.0, -2.0});
  const auto a = assemble_system(g, sp);
  CHECK(a.system.m.rows() == 3);
  const Complex want = 2.0 * (1.0 - std::cos(sp.rho * L));
  CHECK(std::abs(determinant(a.system) - want) <= 1e-12 * std::abs(want));
}

TEST_CASE("bare K ray: 2x2 system and det i rho") {
  const auto g = bare_ray(VertexKind::BoundaryK);
  const auto sp = SpectralPoint::from_lambda({1.0, 1.5});
  const auto a = assemble_system(g, sp);
  CHECK(a.system.m.rows() == 2);
  const Complex want = Complex(0, 1) * sp.rho;
  CHECK(std::abs(determinant(a.system) - want) <= 1e-12 * std::abs(want));
}

TEST_CASE("interval zeros at (n pi / L)^2 and loop zeros at (2 pi n / L)^2") {
  const auto g = interval(1.0, VertexKind::BoundaryD, VertexKind::BoundaryD);
  for (int n = 1; n <= 4; ++n) {
    const double lam = n * kPi * n * kPi;
    CHECK(std::abs(delta(g, SpectralPoint::from_lambda(lam, Side::PlusI0))) < 1e-9);
  }
  const auto loop = loop_graph(1.0);
  for (int n = 0; n <= 3; ++n) {
    const double lam = 4.0 * kPi * kPi * n * n;
    CHECK(std::abs(delta(loop, SpectralPoint::from_lambda(lam, Side::PlusI0))) < 1e-9);
  }
}

TEST_CASE("Lemma 2.3 split on the 2-star reproduces the closed forms") {
  // Vertices ordered u1, v, u2; decomposition at the middle vertex.
  GraphBuilder b;
  const int u1 = b.add_vertex("u1", VertexKind::BoundaryD);
  const int v = b.add_vertex("v", VertexKind::Internal);
  const int u2 = b.add_vertex("u2", VertexKind::BoundaryD);
  const double L1 = 0.8, L2 = 1.1;
  b.add_edge("e1", u1, v, L1, Potential::zero());
  b.add_edge("e2", v, u2, L2, Potential::zero());
  const auto g = b.build();

  const auto sp = SpectralPoint::from_lambda({1.7, 0.9});
  const Complex whole = delta(g, sp);
  // Glued D-D interval of length L1 + L2 (sign fixed by this ordering).
  const Complex want = -std::sin(sp.rho * (L1 + L2)) / sp.rho;
  CHECK(std::abs(whole - want) <= 1e-10 * std::abs(want));

  const auto g1 = edge_subgraph(g, {{false, 0}}, true);
  const auto g2 = edge_subgraph(g, {{false, 1}}, true);
  const auto g1p = split_vertex(g1, g1.vertex_index("v")).graph;
  const auto g2p = split_vertex(g2, g2.vertex_index("v")).graph;
  const Complex rhs =
      delta(g1, sp) * delta(g2p, sp) + delta(g1p, sp) * delta(g2, sp);
  CHECK(std::abs(whole - rhs) <= 1e-10 * (1.0 + std::abs(whole)));
}

TEST_CASE("Weyl function closed forms") {
  const auto sp = SpectralPoint::from_lambda({2.3, 1.4});

  SUBCASE("single ray at its base: M = i rho") {
    const auto g = bare_ray(VertexKind::BoundaryK);
    const auto m = weyl_function(g, 0, sp);
    CHECK(rel_err(m.value, Complex(0, 1) * sp.rho) < 1e-10);
    CHECK(m.cross_check_rel < 1e-8);
  }
  SUBCASE("interval from K end, D far end: M = -rho cot(rho L)") {
    const double L = 1.2;
    const auto g = interval(L, VertexKind::BoundaryK, VertexKind::BoundaryD);
    const auto m = weyl_function(g, 0, sp);
    const Complex want = -sp.rho * std::cos(sp.rho * L) / std::sin(sp.rho * L);
    CHECK(rel_err(m.value, want) < 1e-10);
    CHECK(m.cross_check_rel < 1e-8);
  }
  SUBCASE("star center: additivity") {
    const auto g = star({0.7, 1.0, 1.3});
    const int c = g.vertex_index("c");
    const auto m = weyl_function(g, c, sp);
    Complex sum = 0.0;
    for (double L : {0.7, 1.0, 1.3}) {
      sum += -sp.rho * std::cos(sp.rho * L) / std::sin(sp.rho * L);
    }
    CHECK(rel_err(m.value, sum) < 1e-8);
    CHECK(m.cross_check_rel < 1e-8);
  }
}

TEST_CASE("Weyl solution closed forms and representation by endpoint sines") {
  const auto sp = SpectralPoint::from_lambda({1.1, 2.0});

  SUBCASE("interval [u D, v]: Phi_v = sin(rho s)/sin(rho L)") {
    const double L = 1.4;
    const auto g = interval(L, VertexKind::BoundaryD, VertexKind::BoundaryK);
    const auto phi = weyl_solution(g, 1, sp);
    for (double s : {0.2, 0.7, 1.1}) {
      const Complex want = std::sin(sp.rho * s) / std::sin(sp.rho * L);
      CHECK(std::abs(phi.on_edge(0, s).y - want) < 1e-10 * (1.0 + std::abs(want)));
    }
  }
  SUBCASE("single ray: Phi_v = e^{i rho s}") {
    const auto g = bare_ray(VertexKind::BoundaryK);
    const auto phi = weyl_solution(g, 0, sp);
    for (double s : {0.0, 0.5, 2.0}) {
      const Complex want = std::exp(Complex(0, 1) * sp.rho * s);
      CHECK(std::abs(phi.on_ray(0, s).y - want) < 1e-10);
    }
  }
  SUBCASE("two-edge path: Phi_v on the boundary edge via endpoint sines") {
    // w(D) -- e1 -- u -- e0 -- v(D); Weyl solution anchored at v.
    GraphBuilder b;
    const int w = b.add_vertex("w", VertexKind::BoundaryD);
    const int u = b.add_vertex("u", VertexKind::Internal);
    const int v = b.add_vertex("v", VertexKind::BoundaryD);
    const double L1 = 0.9, L0 = 1.2;
    b.add_edge("e1", w, u, L1, Potential::zero());
    b.add_edge("e0", u, v, L0, Potential::zero());
    b.set_root(w);
    const auto g = b.build();

    const auto phi = weyl_solution(g, v, sp);
    const auto co = weyl_edge_coefficients(g, 1, sp);
    const Wave s_rv = local_basis_at(g.edge(1), EdgeEnd::Terminal, sp);
    const Wave s_ru = local_basis_at(g.edge(1), EdgeEnd::Initial, sp);
    for (double s : {0.1, 0.6, 1.0}) {
      const Complex want = co.gamma * s_rv.at(s).y + co.delta * s_ru.at(s).y;
      const Complex got = phi.on_edge(1, s).y;
      CHECK(std::abs(got - want) <= 1e-8 * (1.0 + std::abs(want)));
    }
  }
}

TEST_CASE("conjugate symmetry of the determinant") {
  const auto g = star({0.6, 0.9});
  const Complex lam{1.9, 1.1};
  const Complex a = delta_at(g, lam);
  const Complex b = delta_at(g, std::conj(lam));
  CHECK(std::abs(b - std::conj(a)) <= 1e-10 * (1.0 + std::abs(a)));
}

TEST_CASE("splitting identity on random graphs and decompositions") {
  std::mt19937 rng(41);
  int tested = 0;
  for (int trial = 0; trial < 60 && tested < 25; ++trial) {
    const auto g = random_a_graph(rng, {.with_potential = true});
    for (int v = 0; v < g.vertex_count() && tested < 25; ++v) {
      if (g.vertex(v).kind != VertexKind::Internal) continue;
      const auto parts = components_at(g, v);
      if (parts.size() < 2) continue;
      // Random bipartition of the components into two sides.
      std::vector<EdgeRef> side1, side2;
      std::bernoulli_distribution coin(0.5);
      for (std::size_t k = 0; k < parts.size(); ++k) {
        auto& dst = (k == 0 || coin(rng)) ? side1 : side2;
        dst.insert(dst.end(), parts[k].begin(), parts[k].end());
      }
      if (side2.empty()) {
        side2 = parts.back();
        side1.clear();
        for (std::size_t k = 0; k + 1 < parts.size(); ++k) {
          side1.insert(side1.end(), parts[k].begin(), parts[k].end());
        }
      }
      const MetricGraph g1 = edge_subgraph(g, side1, true);
      const MetricGraph g2 = edge_subgraph(g, side2, true);
      const int v1 = g1.vertex_index(g.vertex(v).id);
      const int v2 = g2.vertex_index(g.vertex(v).id);
      const MetricGraph g1p = split_vertex(g1, v1).graph;
      const MetricGraph g2p = split_vertex(g2, v2).graph;
      for (const auto& sp : random_lambdas(rng, 4)) {
        const Complex whole = delta(g, sp);
        const Complex rhs =
            delta(g1, sp) * delta(g2p, sp) + delta(g1p, sp) * delta(g2, sp);
        CHECK(std::abs(whole - rhs) <= 1e-6 * std::max(1.0, std::abs(whole)));
      }
      ++tested;
    }
  }
  CHECK(tested >= 20);
}

TEST_CASE("p-fold splitting at star-like vertices") {
  std::mt19937 rng(43);
  int tested = 0;
  for (int trial = 0; trial < 40 && tested < 10; ++trial) {
    const auto g = random_a_graph(rng, {.with_potential = true});
    for (int v = 0; v < g.vertex_count() && tested < 10; ++v) {
      if (g.vertex(v).kind != VertexKind::Internal) continue;
      const auto parts = components_at(g, v);
      if (parts.size() < 3) continue;
      std::vector<MetricGraph> pieces, split_pieces;
      for (const auto& part : parts) {
        MetricGraph gk = edge_subgraph(g, part, true);
        const int vk = gk.vertex_index(g.vertex(v).id);
        split_pieces.push_back(split_vertex(gk, vk).graph);
        pieces.push_back(std::move(gk));
      }
      for (const auto& sp : random_lambdas(rng, 3)) {
        Complex rhs = 0.0;
        for (std::size_t k = 0; k < pieces.size(); ++k) {
          Complex term = delta(pieces[k], sp);
          for (std::size_t j = 0; j < pieces.size(); ++j) {
            if (j != k) term *= delta(split_pieces[j], sp);
          }
          rhs += term;
        }
        const Complex whole = delta(g, sp);
        CHECK(std::abs(whole - rhs) <= 1e-6 * std::max(1.0, std::abs(whole)));
      }
      ++tested;
    }
  }
  CHECK(tested >= 3);
}

TEST_CASE("ray splitting: Delta = d_r Delta^r + d^r Delta_r") {
  std::mt19937 rng(47);
  int tested = 0;
  for (int trial = 0; trial < 60 && tested < 12; ++trial) {
    const auto g = random_a_graph(rng, {.with_potential = true});
    if (g.ray_count() == 0) continue;
    const int ray = 0;
    const int base = g.ray(ray).base;
    if (g.vertex(base).kind == VertexKind::BoundaryD) continue;
    const auto rest_k = cut_keep_at(g, {{true, ray}}, base);
    const auto rest_d = cut_dirichlet_at(g, {{true, ray}}, base);
    for (const auto& sp : random_lambdas(rng, 4)) {
      const auto j = jost(g.ray(ray), sp);
      const Complex whole = delta(g, sp);
      const Complex rhs = j.d * delta(rest_k, sp) + j.d_deriv * delta(rest_d, sp);
      CHECK(std::abs(whole - rhs) <= 1e-8 * std::max(1.0, std::abs(whole)));
    }
    ++tested;
  }
  CHECK(tested >= 8);
}

TEST_CASE("boundary edge splitting via the lone-edge characteristic functions") {
  // Delta = d_r Delta^r + d^r Delta_r with d^r = Delta(r*), d_r = Delta(r_*).
  std::mt19937 rng(53);
  int tested = 0;
  for (int trial = 0; trial < 60 && tested < 12; ++trial) {
    const auto g = random_a_graph(rng, {.with_potential = true});
    for (int e = 0; e < g.edge_count(); ++e) {
      const auto& ed = g.edge(e);
      const bool bi = g.is_boundary(ed.initial), bt = g.is_boundary(ed.terminal);
      if (bi == bt) continue;
      const int u = bi ? ed.initial : ed.terminal;    // boundary end
      const int v = bi ? ed.terminal : ed.initial;    // attachment to the rest
      if (g.vertex(v).kind == VertexKind::BoundaryD) continue;
      if (g.degree(v) < 2) continue;

      // Lone-edge graphs r* (v K-type) and r_* (v D-type), u keeping its kind,
      // with the orderings of u and v inherited.
      auto lone = [&](VertexKind far_kind) {
        GraphBuilder b;
        int nu = -1, nv = -1;
        auto add_u = [&] { nu = b.add_vertex(g.vertex(u).id, g.vertex(u).kind); };
        auto add_v = [&] { nv = b.add_vertex(g.vertex(v).id, far_kind); };
        if (u < v) {
          add_u();
          add_v();
        } else {
          add_v();
          add_u();
        }
        b.add_edge_oriented(ed.id, ed.initial == u ? nu : nv, ed.terminal == u ? nu : nv,
                            ed.length, ed.q);
        return b.build();
      };
      const auto r_star = lone(VertexKind::BoundaryK);
      const auto r_sub = lone(VertexKind::BoundaryD);
      const auto rest_k = cut_keep_at(g, {{false, e}}, v);
      const auto rest_d = cut_dirichlet_at(g, {{false, e}}, v);
      for (const auto& sp : random_lambdas(rng, 3)) {
        const Complex whole = delta(g, sp);
        const Complex rhs =
            delta(r_sub, sp) * delta(rest_k, sp) + delta(r_star, sp) * delta(rest_d, sp);
        CHECK(std::abs(whole - rhs) <= 1e-6 * std::max(1.0, std::abs(whole)));
      }
      ++tested;
      break;
    }
  }
  CHECK(tested >= 8);
}

TEST_CASE("Weyl consistency and Nevanlinna sign on random graphs") {
  std::mt19937 rng(59);
  for (int trial = 0; trial < 12; ++trial) {
    const auto g = random_a_graph(rng, {.with_potential = true});
    for (int v = 0; v < g.vertex_count(); ++v) {
      if (g.vertex(v).kind == VertexKind::BoundaryD) continue;
      for (const auto& sp : random_lambdas(rng, 3)) {
        const auto m = weyl_function(g, v, sp);
        if (m.pole) continue;
        CHECK(m.cross_check_rel <= 1e-6);
        CHECK(m.value.imag() * sp.lambda.imag() > 0.0);
      }
      break;  // one non-D vertex per graph keeps the sweep quick
    }
  }
}

TEST_CASE("lower bounds from the classical m (two-sided ray estimates)") {
  std::mt19937 rng(61);
  int tested = 0;
  for (int trial = 0; trial < 60 && tested < 10; ++trial) {
    const auto g = random_a_graph(rng, {.with_potential = true});
    if (g.ray_count() == 0) continue;
    const int base = g.ray(0).base;
    if (g.vertex(base).kind == VertexKind::BoundaryD) continue;
    const auto rest_k = cut_keep_at(g, {{true, 0}}, base);
    const auto rest_d = cut_dirichlet_at(g, {{true, 0}}, base);
    std::uniform_real_distribution<double> re(-3.0, 6.0), im(0.1, 2.5);
    for (int k = 0; k < 6; ++k) {
      const auto sp = SpectralPoint::from_rho({re(rng), im(rng)});
      const auto j = jost(g.ray(0), sp);
      const Complex m = j.d_deriv / j.d;
      const double lhs = std::abs(delta(g, sp));
      const double slack = 1.0 + 1e-9;
      CHECK(lhs * slack >=
            std::abs(delta(rest_d, sp)) * std::abs(j.d) * std::abs(m.imag()) / slack);
      CHECK(lhs * slack >= std::abs(delta(rest_k, sp)) * std::abs(j.d_deriv) *
                               std::abs((1.0 / m).imag()) / slack);
    }
    ++tested;
  }
  CHECK(tested >= 6);
}
