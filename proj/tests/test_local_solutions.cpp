#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "qgraph/local_solutions.hpp"
#include "test_support.hpp"

using namespace qgraph;
using namespace qgraph::testing;

namespace {

constexpr Complex kI{0.0, 1.0};

CompactEdge make_edge(double len, Potential q) { return {"e", 0, 1, len, std::move(q)}; }

Ray make_ray(double support, Potential q) { return {"r", 0, support, std::move(q)}; }

// Independent closed-form oracle for the half-line square well q = -V0 on
// [0, a], zero beyond: matches plane waves across the two regions with
// explicit trigonometry; shares no code with the production propagators.
struct SquareWellOracle {
  double v0;
  double a;

  // Jost solution value and derivative at the origin.
  std::pair<Complex, Complex> jost_at_zero(Complex rho) const {
    const Complex k = std::sqrt(rho * rho + v0);
    const Complex ea = std::exp(kI * rho * a);
    const Complex value_a = ea;
    const Complex deriv_a = kI * rho * ea;
    const Complex c = std::cos(k * a), s = std::sin(k * a);
    // Backward transfer over the well: y(0) = c y(a) - (s/k) y'(a), etc.
    const Complex d = c * value_a - s / k * deriv_a;
    const Complex dp = k * s * value_a + c * deriv_a;
    return {d, dp};
  }

  Complex reflection_dirichlet(double rho) const {
    const auto [dm, dmp] = jost_at_zero(Complex(-rho, 0.0));
    (void)dmp;
    const auto [dp, dpp] = jost_at_zero(Complex(rho, 0.0));
    (void)dpp;
    return -dm / dp;
  }

  Complex reflection_neumann(double rho) const {
    const auto [dm, dmp] = jost_at_zero(Complex(-rho, 0.0));
    (void)dm;
    const auto [dp, dpp] = jost_at_zero(Complex(rho, 0.0));
    (void)dp;
    return -dmp / dpp;
  }
};

}  // namespace

TEST_CASE("free cosine and sine basis") {
  const auto edge = make_edge(1.7, Potential::zero());
  const auto sp = SpectralPoint::from_lambda({2.0, 1.3});
  const auto [c, s] = local_basis(edge, sp);
  for (double x : {0.0, 0.3, 1.0, 1.7}) {
    CHECK(close(c.at(x).y, std::cos(sp.rho * x), 1e-12));
    CHECK(close(s.at(x).y, std::sin(sp.rho * x) / sp.rho, 1e-12));
  }
}

TEST_CASE("degenerate lambda = 0: C = 1, S = s") {
  const auto edge = make_edge(2.0, Potential::zero());
  const auto sp = SpectralPoint::from_lambda(0.0, Side::PlusI0);
  CHECK(sp.degenerate_rho());
  const auto [c, s] = local_basis(edge, sp);
  CHECK(close(c.at(1.3).y, Complex(1.0), 1e-14));
  CHECK(close(c.at(1.3).dy, Complex(0.0), 1e-14));
  CHECK(close(s.at(1.3).y, Complex(1.3), 1e-14));
}

TEST_CASE("constant potential shifts the spectral parameter") {
  const double shift = 2.5;
  const auto edge_c = make_edge(1.2, Potential::constant(shift));
  const auto edge_0 = make_edge(1.2, Potential::zero());
  const Complex lam{3.7, 0.9};
  const auto [c1, s1] = local_basis(edge_c, SpectralPoint::from_lambda(lam));
  const auto [c0, s0] = local_basis(edge_0, SpectralPoint::from_lambda(lam - shift));
  for (double x : {0.4, 1.2}) {
    CHECK(close(c1.at(x).y, c0.at(x).y, 1e-12));
    CHECK(close(s1.at(x).y, s0.at(x).y, 1e-12));
  }
}

TEST_CASE("endpoint-anchored sine solutions") {
  const auto edge = make_edge(1.5, Potential::zero());
  const auto sp = SpectralPoint::from_lambda({1.1, 0.7});
  const Wave s_terminal = local_basis_at(edge, EdgeEnd::Terminal, sp);
  for (double x : {0.0, 0.5, 1.5}) {
    // sin(rho |x - v|) / rho measured from the far end.
    CHECK(close(s_terminal.at(x).y, std::sin(sp.rho * (1.5 - x)) / sp.rho, 1e-12));
  }
  // S anchored at the initial end coincides with the basis sine.
  const Wave s_initial = local_basis_at(edge, EdgeEnd::Initial, sp);
  const auto [c, s] = local_basis(edge, sp);
  CHECK(close(s_initial.at(0.9).y, s.at(0.9).y, 1e-14));

  // d_r(lambda) = S_{r,v}(u, lambda) for a piecewise-constant potential.
  const auto q = Potential::piecewise_const({0.0, 0.7}, {1.0, -2.0});
  const auto edge_q = make_edge(1.5, q);
  const Wave sv = local_basis_at(edge_q, EdgeEnd::Terminal, sp);
  CHECK(std::abs(sv.at(0.0).y) > 0.0);  // generic nonvanishing
}

TEST_CASE("free Jost solution and classical m") {
  const auto ray = make_ray(0.0, Potential::zero());
  const auto sp = SpectralPoint::from_lambda({2.0, 1.0});
  const auto j = jost(ray, sp);
  CHECK(close(j.d, Complex(1.0), 1e-14));
  CHECK(close(j.d_deriv, kI * sp.rho, 1e-14));
  for (double x : {0.0, 1.0, 3.5}) {
    CHECK(close(j.wave.at(x).y, std::exp(kI * sp.rho * x), 1e-13));
  }
  const auto m = classical_weyl_m(ray, sp);
  CHECK(close(m.value, kI * sp.rho, 1e-13));
}

TEST_CASE("large-rho Jost asymptotics tighten at double the frequency") {
  const auto q = Potential::piecewise_const({0.0, 0.3, 0.8}, {2.0, -1.0, 0.0});
  const auto ray = make_ray(0.8, q);
  auto deviation = [&](double rho_abs) {
    const auto sp = SpectralPoint::from_rho({rho_abs, 0.5});
    const auto j = jost(ray, sp);
    double worst = 0.0;
    for (double x : {0.1, 0.4, 0.6}) {
      const Complex expect = std::exp(kI * sp.rho * x);
      worst = std::max(worst, std::abs(j.wave.at(x).y / expect - 1.0));
    }
    return worst;
  };
  const double d20 = deviation(20.0);
  const double d40 = deviation(40.0);
  CHECK(d20 < 0.1);
  CHECK(d40 < 0.6 * d20);  // first-order decay: error roughly halves
}

TEST_CASE("square well Jost data matches the two-region oracle") {
  const double v0 = 4.0, a = 0.9;
  const SquareWellOracle oracle{v0, a};
  const auto q = Potential::piecewise_const({0.0, a}, {-v0, 0.0});
  const auto ray = make_ray(a, q);
  for (Complex rho : {Complex(1.5, 0.0), Complex(0.7, 1.1), Complex(-2.0, 0.0), Complex(0.0, 0.8)}) {
    const auto j = jost_at_rho(ray, rho);
    const auto [d, dp] = oracle.jost_at_zero(rho);
    CHECK(std::abs(j.d - d) <= 1e-8 * (1.0 + std::abs(d)));
    CHECK(std::abs(j.d_deriv - dp) <= 1e-8 * (1.0 + std::abs(dp)));
  }
}

TEST_CASE("classical m for the square well matches the oracle") {
  const double v0 = 3.0, a = 1.1;
  const SquareWellOracle oracle{v0, a};
  const auto q = Potential::piecewise_const({0.0, a}, {-v0, 0.0});
  const auto ray = make_ray(a, q);
  const auto sp = SpectralPoint::from_lambda({1.3, 0.8});
  const auto m = classical_weyl_m(ray, sp);
  const auto [d, dp] = oracle.jost_at_zero(sp.rho);
  CHECK(std::abs(m.value - dp / d) <= 1e-9 * (1.0 + std::abs(m.value)));
}

TEST_CASE("Nevanlinna sign of the classical m off the real axis") {
  std::mt19937 rng(11);
  const auto q = Potential::piecewise_const({0.0, 0.5, 1.0}, {-2.0, 1.5, 0.0});
  const auto ray = make_ray(1.0, q);
  for (const auto& sp : random_lambdas(rng, 40)) {
    const auto m = classical_weyl_m(ray, sp);
    if (m.pole) continue;
    CHECK(m.value.imag() * sp.lambda.imag() > 0.0);
  }
}

TEST_CASE("Wronskian of the basis pair stays one along the edge") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> qv(-5.0, 5.0);
  for (int trial = 0; trial < 5; ++trial) {
    const auto q = Potential::piecewise_const({0.0, 0.4, 1.0}, {qv(rng), qv(rng), qv(rng)});
    const auto edge = make_edge(1.6, q);
    for (const auto& sp : random_lambdas(rng, 4)) {
      const auto [c, s] = local_basis(edge, sp);
      for (double x : {0.0, 0.3, 0.9, 1.6}) {
        const auto cs = c.at(x);
        const auto ss = s.at(x);
        CHECK(std::abs(cs.y * ss.dy - cs.dy * ss.y - 1.0) <= 1e-9);
      }
    }
  }
}

TEST_CASE("sampled potentials integrate against the exact piecewise path") {
  // A piecewise-linear potential encoded as samples vs a fine piecewise-
  // constant staircase of the same function.
  const double len = 1.2;
  const int n = 241;
  std::vector<double> samples(n);
  for (int i = 0; i < n; ++i) {
    const double x = len * i / (n - 1);
    samples[i] = 3.0 * std::exp(-2.0 * x) - 1.0;
  }
  const auto q_grid = Potential::samples(len / (n - 1), samples);

  // Midpoint staircase of the same interpolant: the exact transfer-matrix
  // path on it converges to the adaptive path on the interpolant itself.
  const int m = 6000;
  std::vector<double> breaks(m), values(m);
  for (int i = 0; i < m; ++i) {
    breaks[i] = len * i / m;
    values[i] = q_grid.value(len * (i + 0.5) / m);
  }
  const auto q_stair = Potential::piecewise_const(breaks, values);

  const auto sp = SpectralPoint::from_lambda({2.2, 0.6});
  const auto [c1, s1] = local_basis(make_edge(len, q_grid), sp);
  const auto [c0, s0] = local_basis(make_edge(len, q_stair), sp);
  CHECK(std::abs(c1.at(len).y - c0.at(len).y) < 1e-7);
  CHECK(std::abs(s1.at(len).y - s0.at(len).y) < 1e-7);
}

TEST_CASE("analyticity probe: Cauchy-Riemann residual of lambda -> S(v)") {
  const auto q = Potential::piecewise_const({0.0, 0.6}, {2.0, -1.0});
  const auto edge = make_edge(1.4, q);
  auto f = [&](Complex lam) {
    const auto [c, s] = local_basis(edge, SpectralPoint::from_lambda(lam));
    (void)c;
    return s.at(edge.length).y;
  };
  const Complex z0{1.7, 1.1};
  const double h = 1e-5;
  const Complex dre = (f(z0 + h) - f(z0 - h)) / (2.0 * h);
  const Complex dim = (f(z0 + kI * h) - f(z0 - kI * h)) / (2.0 * h * kI);
  CHECK(std::abs(dre - dim) <= 1e-6 * (1.0 + std::abs(dre)));
}

TEST_CASE("reality: real basis for real data, real Jost on the imaginary axis") {
  const auto q = Potential::piecewise_const({0.0, 0.5}, {1.0, -1.5});
  const auto edge = make_edge(1.0, q);
  const auto sp = SpectralPoint::from_lambda(2.0, Side::PlusI0);
  const auto [c, s] = local_basis(edge, sp);
  CHECK(std::abs(c.at(0.7).y.imag()) < 1e-12);
  CHECK(std::abs(s.at(0.7).y.imag()) < 1e-12);

  const auto ray = make_ray(0.5, Potential::piecewise_const({0.0, 0.5}, {-2.0, 0.0}));
  const auto j = jost_at_rho(ray, {0.0, 0.9});
  CHECK(std::abs(j.d.imag()) < 1e-12);
}

TEST_CASE("classical lower bound on |d_r| for the free ray, fitted otherwise") {
  // q = 0: |d_r| = 1 >= C |rho|^{-1} exp(tau * 0) trivially with C = |rho|.
  // For a random compactly supported q the bound holds with a fitted C along
  // a vertical line away from the Dirichlet spectrum.
  const auto q = Potential::piecewise_const({0.0, 0.4, 0.8}, {3.0, -2.0, 0.0});
  const auto ray = make_ray(0.8, q);
  double fitted_c = 1e300;
  for (double t : {1.0, 2.0, 3.0}) {
    const Complex rho{4.0, t};
    const auto j = jost_at_rho(ray, rho);
    // Support radius stands in for |r| on the ray.
    const double bound_shape = std::exp(t * ray.support) / std::abs(rho);
    fitted_c = std::min(fitted_c, std::abs(j.d) / bound_shape);
  }
  CHECK(fitted_c > 0.0);
  // The fitted constant keeps working on a second sweep.
  for (double t : {1.5, 2.5}) {
    const Complex rho{6.0, t};
    const auto j = jost_at_rho(ray, rho);
    const double bound_shape = std::exp(t * ray.support) / std::abs(rho);
    CHECK(std::abs(j.d) >= 0.5 * fitted_c * bound_shape);
  }
}

TEST_CASE("rho = 0 Jost is flagged degenerate") {
  const auto ray = make_ray(0.0, Potential::zero());
  const auto j = jost_at_rho(ray, 0.0);
  CHECK(j.degenerate);
  CHECK(close(j.d, Complex(1.0), 1e-14));
  CHECK(close(j.wave.at(2.0).y, Complex(1.0), 1e-14));
}
