#include "qgraph/expsum.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "qgraph/aedges.hpp"
#include "qgraph/characteristic.hpp"
#include "qgraph/errors.hpp"
#include "qgraph/kernels.hpp"
#include "qgraph/surgery.hpp"

namespace qgraph {
namespace {

constexpr Complex kI{0.0, 1.0};

Complex int_pow(Complex z, int k) {
  if (k < 0) return 1.0 / int_pow(z, -k);
  Complex out = 1.0;
  for (int i = 0; i < k; ++i) out *= z;
  return out;
}

int n_factor_of(const MetricGraph& g) {
  return g.count_kind(VertexKind::BoundaryD) + static_cast<int>(enumerate_cycles(g).size());
}

}  // namespace

double ExpSumExpansion::coeff_at(double l, double tol) const {
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    if (std::abs(lengths[i] - l) <= tol) return coeffs[i];
  }
  return 0.0;
}

std::vector<double> signed_length_sums(const MetricGraph& g, double merge_tol) {
  const int e = g.edge_count();
  if (e > 14) throw PreconditionError("signed_length_sums: too many edges to enumerate");
  std::vector<double> sums;
  sums.reserve(static_cast<std::size_t>(std::pow(3.0, e)));
  std::vector<int> eps(static_cast<std::size_t>(e), -1);
  while (true) {
    double s = 0.0;
    for (int i = 0; i < e; ++i) s += eps[static_cast<std::size_t>(i)] * g.edge(i).length;
    sums.push_back(s);
    int i = 0;
    for (; i < e; ++i) {
      if (eps[static_cast<std::size_t>(i)] < 1) {
        ++eps[static_cast<std::size_t>(i)];
        break;
      }
      eps[static_cast<std::size_t>(i)] = -1;
    }
    if (i == e) break;
  }
  std::sort(sums.begin(), sums.end());
  std::vector<double> merged;
  for (double s : sums) {
    if (!merged.empty() && s - merged.back() <= merge_tol) continue;
    merged.push_back(s);
  }
  return merged;
}

ExpSumExpansion exp_sum_coefficients(const MetricGraph& g, const ExpSumOptions& opts) {
  const MetricGraph gf = opts.use_graph_potential ? g : g.with_zero_potential();

  ExpSumExpansion out;
  out.n_factor = n_factor_of(gf);
  out.total_length = gf.total_edge_length();

  const auto ls = signed_length_sums(gf);
  const int k = static_cast<int>(ls.size());
  if (k > 1000) throw PreconditionError("exp_sum_coefficients: candidate length set too large");

  // Grid: Im rho fixed, Re rho symmetric and wide enough to resolve the
  // smallest length gap. The height keeps the column dynamic range
  // e^{+-im_rho |G|} inside what double precision can invert cleanly.
  const double scale_len = std::max(out.total_length, 1.0);
  const double im_rho = opts.im_rho > 0.0 ? opts.im_rho : 8.0 / scale_len;
  double gap_min = scale_len;
  for (int i = 1; i < k; ++i) {
    gap_min = std::min(gap_min, ls[static_cast<std::size_t>(i)] - ls[static_cast<std::size_t>(i - 1)]);
  }
  const double width_needed = 2.5 * 2.0 * kPi / std::max(gap_min, 1e-12);
  if (width_needed > 1.0e4) {
    throw NumericalError(
        "exp_sum_coefficients: fit refused, length sums separated by only " +
        std::to_string(gap_min) + " (near-degenerate length set)");
  }
  // The grid keeps a fixed aspect: raising Im rho stretches the real extent
  // with it, so the whole remainder scale drops like 1 / Im rho.
  const double width = width_needed * std::max(1.0, im_rho * scale_len / 8.0);
  const int half = std::max({(opts.points_factor * k + 1) / 2, 32,
                             static_cast<int>(width * scale_len / kPi) + k});
  const int m = 2 * half;
  if (static_cast<double>(m) * k * k > 6.0e9) {
    throw NumericalError("exp_sum_coefficients: length set too degenerate to fit");
  }

  // Two mirrored bands Re rho in +-[2 im_rho, 2 im_rho + width]: staying away
  // from the imaginary axis keeps every |rho| proportional to the grid
  // height, and the exact +-x symmetry keeps the fitted coefficients real.
  std::vector<SpectralPoint> pts;
  pts.reserve(static_cast<std::size_t>(m));
  const double x0 = 2.0 * im_rho;
  for (int j = 0; j < half; ++j) {
    const double x = x0 + width * static_cast<double>(j) / (half - 1);
    pts.push_back(SpectralPoint::from_rho({x, im_rho}));
    pts.push_back(SpectralPoint::from_rho({-x, im_rho}));
  }
  const auto deltas = delta_grid(gf, pts, default_exec());

  // Targets normalized by the common magnitude e^{Im rho |G|}.
  const double mag = std::exp(im_rho * out.total_length);
  Eigen::VectorXcd t(m);
  for (int j = 0; j < m; ++j) {
    const Complex lead = int_pow(kI / (2.0 * pts[static_cast<std::size_t>(j)].rho), out.n_factor - 1);
    t(j) = deltas[static_cast<std::size_t>(j)] / lead / mag;
  }
  Eigen::MatrixXcd basis(m, k);
  for (int c = 0; c < k; ++c) {
    const double l = ls[static_cast<std::size_t>(c)];
    for (int j = 0; j < m; ++j) {
      basis(j, c) = std::exp(-kI * pts[static_cast<std::size_t>(j)].rho * l) / mag;
    }
  }
  // Column scaling keeps the small-|l| columns recoverable.
  Eigen::VectorXd col_norm(k);
  for (int c = 0; c < k; ++c) {
    col_norm(c) = std::max(basis.col(c).norm(), 1e-300);
    basis.col(c) /= col_norm(c);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(basis);
  const auto& r_diag = qr.matrixR().diagonal();
  double r_max = 0.0, r_min = std::numeric_limits<double>::infinity();
  for (int c = 0; c < k; ++c) {
    r_max = std::max(r_max, std::abs(r_diag(c)));
    r_min = std::min(r_min, std::abs(r_diag(c)));
  }
  out.condition = r_max / std::max(r_min, 1e-300);
  if (out.condition > opts.condition_limit) {
    throw NumericalError("exp_sum_coefficients: fit refused, condition " +
                         std::to_string(out.condition) + " (near-degenerate length set)");
  }
  const Eigen::VectorXcd scaled = qr.solve(t);
  // Relative l2 residual. On the fixed-aspect grid the unfittable remainder
  // integrates to O(1 / Im rho), so doubling the height halves it.
  out.fit_residual = (basis * scaled - t).norm() / std::max(t.norm(), 1e-300);

  for (int c = 0; c < k; ++c) {
    const Complex b = scaled(c) / col_norm(c);
    if (std::abs(b) < opts.drop_tol) continue;
    out.lengths.push_back(ls[static_cast<std::size_t>(c)]);
    out.coeffs.push_back(b.real());
    out.max_imag = std::max(out.max_imag, std::abs(b.imag()));
  }
  return out;
}

namespace {

// Decomposition site: an internal vertex splitting the graph into >= 2
// components, preferring vertices with at least three incidences.
int decomposition_vertex(const MetricGraph& g) {
  int fallback = -1;
  for (int v = 0; v < g.vertex_count(); ++v) {
    if (g.vertex(v).kind != VertexKind::Internal) continue;
    const auto parts = components_at(g, v);
    if (parts.size() < 2) continue;
    if (g.degree(v) >= 3) return v;
    if (fallback < 0) fallback = v;
  }
  return fallback;
}

}  // namespace

double leading_coefficient_recursive(const MetricGraph& g) {
  const int v = decomposition_vertex(g);
  if (v < 0) {
    const auto fit = exp_sum_coefficients(g);
    const double b = fit.coeff_at(fit.total_length, 1e-7);
    if (b == 0.0) {
      throw NumericalError("leading_coefficient_recursive: base-case fit lost the leading term");
    }
    return b;
  }
  const auto parts = components_at(g, v);
  std::vector<double> b_part, b_split;
  for (const auto& part : parts) {
    MetricGraph gk = edge_subgraph(g, part, true);
    const int vk = gk.vertex_index(g.vertex(v).id);
    if (vk < 0) throw NumericalError("leading_coefficient_recursive: lost the split vertex");
    b_part.push_back(leading_coefficient_recursive(gk));
    b_split.push_back(leading_coefficient_recursive(split_vertex(gk, vk).graph));
  }
  double total = 0.0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    double term = b_part[k];
    for (std::size_t j = 0; j < parts.size(); ++j) {
      if (j != k) term *= b_split[j];
    }
    total += term;
  }
  return total;
}

}  // namespace qgraph
