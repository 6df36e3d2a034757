#include "qgraph/scattering.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>

#include "qgraph/aedges.hpp"
#include "qgraph/errors.hpp"
#include "qgraph/surgery.hpp"

namespace qgraph {
namespace {

constexpr Complex kI{0.0, 1.0};

struct RaySystemSolve {
  Eigen::VectorXcd x;
  bool pole;
};

// Same matrix as the eigenvalue system; the incoming wave moves to the right
// hand side, and the tagged ray's gamma column carries the outgoing amplitude.
RaySystemSolve solve_ray_system(const Assembly& a, const MetricGraph& g, int ray,
                                const JostSolution& incoming) {
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(a.system.m.rows());
  const int base = g.ray(ray).base;
  const int ray_row = 2 * a.n_edges + ray;
  rhs(ray_row) = -incoming.d;
  if (g.vertex(base).kind != VertexKind::BoundaryD) {
    rhs(a.vertex_row(base)) = -incoming.d_deriv;
  }
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a.system.m);
  RaySystemSolve out;
  out.x = lu.solve(rhs);
  double scale = 1.0;
  for (Eigen::Index i = 0; i < a.system.m.rows(); ++i) {
    scale *= std::max(a.system.m.row(i).norm(), 1e-300);
  }
  const double rel = std::abs(lu.determinant()) / scale;
  const double residual = (a.system.m * out.x - rhs).norm();
  out.pole = rel < 1e-13 || !out.x.allFinite() || residual > 1e-6 * (1.0 + out.x.norm());
  return out;
}

}  // namespace

RaySolution weyl_type_solution(const MetricGraph& g, int ray, const SpectralPoint& sp) {
  if (ray < 0 || ray >= g.ray_count()) throw PreconditionError("weyl_type_solution: no such ray");
  if (sp.degenerate_rho()) {
    throw PreconditionError("weyl_type_solution: rho = 0 is outside the representation");
  }
  RaySolution out;
  auto assembly = std::make_shared<Assembly>(assemble_system(g, sp));
  out.incoming_ = jost_at_rho(g.ray(ray), -sp.rho);
  const auto solve = solve_ray_system(*assembly, g, ray, out.incoming_);
  out.assembly_ = std::move(assembly);
  out.graph_ = std::make_shared<MetricGraph>(g);
  out.coeffs_ = solve.x;
  out.ray_ = ray;
  out.pole_ = solve.pole;
  out.amplitude_ = solve.x(out.assembly_->gamma_col(ray));
  return out;
}

WaveState RaySolution::on_tagged_ray(double s) const {
  const WaveState in = incoming_.wave.at(s);
  const WaveState outg = assembly_->rays[static_cast<std::size_t>(ray_)].wave.at(s);
  return {in.y + amplitude_ * outg.y, in.dy + amplitude_ * outg.dy};
}

WaveState RaySolution::on_other_ray(int r, double s) const {
  if (r == ray_) return on_tagged_ray(s);
  const WaveState e = assembly_->rays[static_cast<std::size_t>(r)].wave.at(s);
  const Complex gm = coeffs_(assembly_->gamma_col(r));
  return {gm * e.y, gm * e.dy};
}

WaveState RaySolution::on_edge(int e, double s) const {
  const auto& el = assembly_->edges[static_cast<std::size_t>(e)];
  const WaveState c = el.c.at(s);
  const WaveState sv = el.s.at(s);
  const Complex b1 = coeffs_(assembly_->beta_col(e, 0));
  const Complex b2 = coeffs_(assembly_->beta_col(e, 1));
  return {b1 * c.y + b2 * sv.y, b1 * c.dy + b2 * sv.dy};
}

Complex RaySolution::value_at_base() const { return on_tagged_ray(0.0).y; }
Complex RaySolution::inward_deriv_at_base() const { return on_tagged_ray(0.0).dy; }

RayCoefficients weyl_type_coefficients(const MetricGraph& g, int ray, const SpectralPoint& sp) {
  const auto& ry = g.ray(ray);
  if (g.vertex(ry.base).kind == VertexKind::BoundaryD) {
    throw PreconditionError("weyl_type_coefficients: ray base must be internal or K-type");
  }
  const JostSolution j = jost(ry, sp);
  if (std::abs(j.d) < 1e-300) {
    throw NumericalError("weyl_type_coefficients: d_r(rho) = 0 (exceptional point)");
  }
  const Complex whole = delta(g, sp);
  if (std::abs(whole) < 1e-300) throw NumericalError("weyl_type_coefficients: Delta(lambda) = 0");
  const Complex cut = delta(cut_dirichlet_at(g, {{true, ray}}, ry.base), sp);
  RayCoefficients out;
  out.delta = -2.0 * kI * sp.rho / j.d;
  out.gamma = (2.0 * kI * sp.rho / j.d) * (cut / whole);
  return out;
}

Complex reflection(const MetricGraph& g, int ray, double rho) {
  if (!(rho > 0.0)) throw PreconditionError("reflection: rho must be positive");
  const auto sp = SpectralPoint::from_rho(rho);
  const RaySolution psi = weyl_type_solution(g, ray, sp);
  if (psi.pole()) throw NumericalError("reflection: Delta vanishes at this rho");
  // Two-point plane-wave match beyond the support radius.
  const double support = g.ray(ray).support;
  const double x1 = support + 0.25 / std::max(rho, 1.0);
  const double x2 = x1 + 0.5 * kPi / rho;  // keeps the 2x2 system well conditioned
  const Complex y1 = psi.on_tagged_ray(x1).y;
  const Complex y2 = psi.on_tagged_ray(x2).y;
  const Complex em1 = std::exp(-kI * rho * x1), ep1 = std::exp(kI * rho * x1);
  const Complex em2 = std::exp(-kI * rho * x2), ep2 = std::exp(kI * rho * x2);
  const Complex det = em1 * ep2 - ep1 * em2;
  const Complex a = (y1 * ep2 - ep1 * y2) / det;
  const Complex s = (em1 * y2 - y1 * em2) / det;
  if (std::abs(a - 1.0) > 1e-6) {
    throw NumericalError("reflection: incoming coefficient deviates from 1 by " +
                         std::to_string(std::abs(a - 1.0)));
  }
  return s;
}

ReflectionSample reflection_sample(const MetricGraph& g, int ray, double rho,
                                   std::span<const double> singular_rhos) {
  bool near_singular = false;
  for (double s : singular_rhos) {
    if (std::abs(rho - s) < 0.01) near_singular = true;
  }
  if (!near_singular) {
    return {rho, reflection(g, ray, rho), ReflectionQuality::Ok};
  }
  // Off-axis evaluation at lambda + i delta, Richardson-extrapolated to the axis.
  const double lambda = rho * rho;
  auto off_axis = [&](double delta_im) {
    const auto sp = SpectralPoint::from_lambda({lambda, delta_im});
    const RaySolution psi = weyl_type_solution(g, ray, sp);
    const double support = g.ray(ray).support;
    const double x1 = support + 0.25 / std::max(rho, 1.0);
    const double x2 = x1 + 0.5 * kPi / rho;
    const Complex y1 = psi.on_tagged_ray(x1).y;
    const Complex y2 = psi.on_tagged_ray(x2).y;
    // Plane-wave match against the true off-axis exponent.
    const Complex r = sp.rho;
    const Complex em1 = std::exp(-kI * r * x1), ep1 = std::exp(kI * r * x1);
    const Complex em2 = std::exp(-kI * r * x2), ep2 = std::exp(kI * r * x2);
    const Complex det = em1 * ep2 - ep1 * em2;
    return (em1 * y2 - y1 * em2) / det;
  };
  const Complex s1 = off_axis(1e-6);
  const Complex s2 = off_axis(5e-7);
  return {rho, 2.0 * s2 - s1, ReflectionQuality::NearSingular};
}

namespace {

// First two Laurent coefficients of the reflection amplitude b(rho) at
// rho0 = i kappa by trapezoidal contour quadrature; 64 nodes. The second
// coefficient vanishes exactly when the pole is simple.
struct LaurentPair {
  Complex residue;       // c_1
  Complex second_order;  // c_2
};

LaurentPair amplitude_laurent(const MetricGraph& g, int ray, Complex rho0, double radius) {
  constexpr int kNodes = 64;
  Complex sum1 = 0.0, sum2 = 0.0;
  for (int k = 0; k < kNodes; ++k) {
    const double th = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(kNodes);
    const Complex offset = radius * Complex(std::cos(th), std::sin(th));
    const Complex rho = rho0 + offset;
    const RaySolution psi = weyl_type_solution(g, ray, SpectralPoint::from_rho(rho));
    sum1 += psi.reflection_amplitude() * offset;
    sum2 += psi.reflection_amplitude() * offset * offset;
  }
  return {sum1 / static_cast<double>(kNodes), sum2 / static_cast<double>(kNodes)};
}

}  // namespace

std::vector<PoleWeight> pole_weights(const MetricGraph& g, int ray,
                                     const std::vector<NegativeEigenvalue>& negative) {
  std::vector<PoleWeight> out;
  std::vector<double> kappas;
  for (const auto& ev : negative) kappas.push_back(std::sqrt(-ev.lambda));
  std::sort(kappas.begin(), kappas.end());
  for (std::size_t i = 0; i < kappas.size(); ++i) {
    const double kappa = kappas[i];
    double gap = kappa;  // distance to rho = 0
    if (i > 0) gap = std::min(gap, kappa - kappas[i - 1]);
    if (i + 1 < kappas.size()) gap = std::min(gap, kappas[i + 1] - kappa);
    const double radius = std::min(0.1, 0.5 * gap);
    const Complex rho0 = kI * kappa;
    const auto laurent1 = amplitude_laurent(g, ray, rho0, radius);
    const Complex alpha1 = -kI * laurent1.residue;
    if (std::abs(alpha1) < 1e-9) continue;  // psi_r is regular here
    const auto laurent2 = amplitude_laurent(g, ray, rho0, 0.5 * radius);
    const Complex alpha2 = -kI * laurent2.residue;
    if (std::abs(alpha1 - alpha2) > 1e-8 * (1.0 + std::abs(alpha1))) {
      throw NumericalError("pole_weights: contour radius sensitivity at kappa = " +
                           std::to_string(kappa));
    }
    if (std::abs(alpha1.imag()) > 1e-8 || alpha1.real() <= 0.0) {
      throw NumericalError("pole_weights: weight not real positive at kappa = " +
                           std::to_string(kappa));
    }
    if (std::abs(laurent1.second_order) > 1e-6 * (1.0 + std::abs(laurent1.residue))) {
      throw NumericalError("pole_weights: pole at kappa = " + std::to_string(kappa) +
                           " is not simple");
    }
    out.push_back({kappa, alpha1.real()});
  }
  return out;
}

std::vector<double> pole_set(const MetricGraph& g, int ray,
                             const std::vector<NegativeEigenvalue>& negative) {
  std::vector<double> kappas;
  for (const auto& p : pole_weights(g, ray, negative)) kappas.push_back(p.kappa);
  return kappas;
}

std::vector<PoleWeight> weight_numbers(const MetricGraph& g, int ray,
                                       const std::vector<NegativeEigenvalue>& negative) {
  return pole_weights(g, ray, negative);
}

std::vector<double> GridSpec::points() const {
  std::vector<double> xs(static_cast<std::size_t>(n));
  const double step = (hi - lo) / static_cast<double>(n);
  for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = lo + step * (i + 1);
  return xs;
}

ScatteringData scattering_data(const MetricGraph& g, int ray, const GridSpec& grid) {
  ScatteringData out;
  out.ray_id = g.ray(ray).id;
  const auto neg = negative_spectrum(g, {.grid_points = 1200, .check_refinement = false});
  const auto pos = positive_singular_set(g, {.grid_points = 2000, .rho_max = grid.hi + 1.0});
  std::vector<double> singular;
  for (const auto& cand : pos.positive_singular) {
    if (cand.below_threshold) singular.push_back(std::sqrt(cand.lambda));
  }
  const auto rhos = grid.points();
  out.reflection = reflection_grid(g, ray, rhos, singular, default_exec());
  out.poles = pole_weights(g, ray, neg.negative);
  return out;
}

MSamples sample_weyl_function(const MetricGraph& g, int v, std::span<const Complex> lambdas) {
  MSamples out;
  out.label = g.vertex(v).id;
  out.lambdas.assign(lambdas.begin(), lambdas.end());
  out.values.resize(lambdas.size());
  std::vector<char> poles(lambdas.size(), 0);
  parallel_for(lambdas.size(), default_exec(), [&](std::size_t i) {
    const auto sp = SpectralPoint::from_lambda(lambdas[i]);
    const WeylSolution phi = weyl_solution(g, v, sp);
    out.values[i] = phi.weyl_derivative_sum();
    poles[i] = phi.pole() ? 1 : 0;
  });
  out.poles.assign(poles.begin(), poles.end());
  return out;
}

DataGrids DataGrids::defaults() {
  DataGrids grids;
  grids.rho = GridSpec{};
  for (int i = 0; i < 32; ++i) {
    const double re = 0.5 + 11.5 * static_cast<double>(i) / 31.0;
    grids.lambdas.push_back({re, 1.0});
  }
  for (int i = 0; i < 32; ++i) {
    const double re = 0.5 + 11.5 * static_cast<double>(i) / 31.0;
    grids.lambdas.push_back({re, -1.0});
  }
  return grids;
}

FullData full_data(const MetricGraph& g, const DataGrids& grids) {
  const int root = g.require_root();
  FullData out;
  for (int r = 0; r < g.ray_count(); ++r) {
    out.rays.push_back(scattering_data(g, r, grids.rho));
  }
  for (int v = 0; v < g.vertex_count(); ++v) {
    if (v == root || !g.is_boundary(v)) continue;
    out.boundary_m.push_back(sample_weyl_function(g, v, grids.lambdas));
  }
  const auto orders = compute_orders(g);
  for (const auto& a : orders.a_edges) {
    if (a.kind != AEdge::Kind::Cycle) continue;
    const auto unrolled = unroll_cycle(g, a);
    const int vc = unrolled.graph.vertex_index(unrolled.created.at(0));
    MSamples m = sample_weyl_function(unrolled.graph, vc, grids.lambdas);
    m.label = unrolled.created.at(0);
    out.cycle_m.push_back(std::move(m));
  }
  return out;
}

}  // namespace qgraph
