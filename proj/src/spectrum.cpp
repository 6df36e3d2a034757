#include "qgraph/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include "qgraph/aedges.hpp"
#include "qgraph/characteristic.hpp"
#include "qgraph/errors.hpp"
#include "qgraph/kernels.hpp"

namespace qgraph {
namespace {

constexpr Complex kI{0.0, 1.0};

double phase_total(const std::vector<Complex>& vals) {
  double total = 0.0;
  for (std::size_t k = 0; k < vals.size(); ++k) {
    const Complex a = vals[k];
    const Complex b = vals[(k + 1) % vals.size()];
    total += std::arg(b / a);
  }
  return total;
}

double max_phase_step(const std::vector<Complex>& vals) {
  double m = 0.0;
  for (std::size_t k = 0; k < vals.size(); ++k) {
    const Complex a = vals[k];
    const Complex b = vals[(k + 1) % vals.size()];
    m = std::max(m, std::abs(std::arg(b / a)));
  }
  return m;
}

}  // namespace

int winding_number(const std::function<Complex(Complex)>& f, Complex center, double radius,
                   int initial_samples) {
  int n = std::max(initial_samples, 16);
  int prev = std::numeric_limits<int>::min();
  for (int attempt = 0; attempt < 14; ++attempt, n *= 2) {
    std::vector<Complex> vals(static_cast<std::size_t>(n));
    bool bad = false;
    for (int k = 0; k < n; ++k) {
      const double th = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
      const Complex z = center + radius * Complex(std::cos(th), std::sin(th));
      vals[static_cast<std::size_t>(k)] = f(z);
      if (vals[static_cast<std::size_t>(k)] == Complex(0.0, 0.0)) {
        bad = true;
        break;
      }
    }
    if (bad) {
      radius *= 1.1892;  // nudge the contour off an exact zero
      prev = std::numeric_limits<int>::min();
      continue;
    }
    const double total = phase_total(vals);
    const int w = static_cast<int>(std::lround(total / (2.0 * kPi)));
    const bool clean = max_phase_step(vals) < 1.5 && std::abs(total / (2.0 * kPi) - w) < 1e-3;
    if (clean) {
      if (w == prev) return w;
      prev = w;
    } else {
      prev = std::numeric_limits<int>::min();
    }
  }
  throw NumericalError("winding_number: contour sampling did not stabilize");
}

namespace {

// Winding along the boundary of an axis-aligned rectangle; -1 when a sample
// hits an exact zero (caller perturbs the box).
int rect_winding(const std::function<Complex(Complex)>& f, Complex lo, Complex hi,
                 int samples_per_side) {
  int n = std::max(samples_per_side, 8);
  int prev = std::numeric_limits<int>::min();
  for (int attempt = 0; attempt < 12; ++attempt, n *= 2) {
    std::vector<Complex> vals;
    vals.reserve(static_cast<std::size_t>(4 * n));
    auto add_side = [&](Complex a, Complex b) {
      for (int k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(n);
        vals.push_back(f(a + t * (b - a)));
      }
    };
    const Complex c1{hi.real(), lo.imag()};
    const Complex c3{lo.real(), hi.imag()};
    add_side(lo, c1);
    add_side(c1, hi);
    add_side(hi, c3);
    add_side(c3, lo);
    const bool bad =
        std::any_of(vals.begin(), vals.end(), [](Complex v) { return v == Complex(0.0, 0.0); });
    if (bad) return -1;
    const double total = phase_total(vals);
    const int w = static_cast<int>(std::lround(total / (2.0 * kPi)));
    if (max_phase_step(vals) < 1.5 && std::abs(total / (2.0 * kPi) - w) < 1e-3) {
      if (w == prev) return w;
      prev = w;
    } else {
      prev = std::numeric_limits<int>::min();
    }
  }
  throw NumericalError("rect_winding: contour sampling did not stabilize");
}

void box_zeros_rec(const std::function<Complex(Complex)>& f, Complex lo, Complex hi,
                   double resolution, int depth, std::vector<Complex>& out) {
  int count = rect_winding(f, lo, hi, 12);
  if (count < 0) {
    const Complex pad = 1e-3 * (hi - lo);
    count = rect_winding(f, lo - pad, hi + pad, 16);
    if (count < 0) throw NumericalError("box_zeros: zero pinned to the contour");
  }
  if (count == 0) return;
  const Complex span = hi - lo;
  if ((std::abs(span.real()) <= resolution && std::abs(span.imag()) <= resolution) || depth > 40) {
    const Complex center = 0.5 * (lo + hi);
    for (int k = 0; k < count; ++k) out.push_back(center);
    return;
  }
  // Slightly uneven split so symmetric zeros do not land on the cut.
  if (std::abs(span.real()) >= std::abs(span.imag())) {
    const double mid = lo.real() + 0.5003 * span.real();
    box_zeros_rec(f, lo, {mid, hi.imag()}, resolution, depth + 1, out);
    box_zeros_rec(f, {mid, lo.imag()}, hi, resolution, depth + 1, out);
  } else {
    const double mid = lo.imag() + 0.5003 * span.imag();
    box_zeros_rec(f, lo, {hi.real(), mid}, resolution, depth + 1, out);
    box_zeros_rec(f, {lo.real(), mid}, hi, resolution, depth + 1, out);
  }
}

}  // namespace

std::vector<Complex> box_zeros(const std::function<Complex(Complex)>& f, Complex lo, Complex hi,
                               double resolution) {
  std::vector<Complex> out;
  box_zeros_rec(f, lo, hi, resolution, 0, out);
  std::sort(out.begin(), out.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return out;
}

MetricGraph compact_part(const MetricGraph& g) {
  std::vector<EdgeRef> keep;
  for (int e = 0; e < g.edge_count(); ++e) keep.push_back({false, e});
  return edge_subgraph(g, keep, true);
}

namespace {

struct RealScan {
  std::vector<double> xs;    // scan parameter (kappa or rho)
  std::vector<double> vals;  // real Delta values
};

struct LocatedZero {
  double x;
  bool from_sign_change;
};

// Zeros of a real-valued scan: sign-change brackets refined by bisection,
// plus below-threshold local dips of |Delta| (even-order zeros) refined by
// ternary search.
std::vector<LocatedZero> locate_real_zeros(const RealScan& scan,
                                           const std::function<double(double)>& f, double rel_tol,
                                           int* bisections) {
  std::vector<LocatedZero> zeros;
  double scale = 1e-300;
  for (double v : scan.vals) scale = std::max(scale, std::abs(v));

  for (std::size_t i = 0; i + 1 < scan.xs.size(); ++i) {
    const double fa = scan.vals[i], fb = scan.vals[i + 1];
    if (fa == 0.0) {
      zeros.push_back({scan.xs[i], true});
      continue;
    }
    if (fa * fb < 0.0) {
      double a = scan.xs[i], b = scan.xs[i + 1];
      double va = fa;
      for (int it = 0; it < 80 && (b - a) > 1e-15 * (1.0 + std::abs(a)); ++it) {
        const double m = 0.5 * (a + b);
        const double vm = f(m);
        ++*bisections;
        if (va * vm <= 0.0) {
          b = m;
        } else {
          a = m;
          va = vm;
        }
      }
      zeros.push_back({0.5 * (a + b), true});
    }
  }
  for (std::size_t i = 1; i + 1 < scan.xs.size(); ++i) {
    const double v = std::abs(scan.vals[i]);
    if (v >= std::abs(scan.vals[i - 1]) || v > std::abs(scan.vals[i + 1])) continue;
    if (scan.vals[i - 1] * scan.vals[i] < 0.0 || scan.vals[i] * scan.vals[i + 1] < 0.0) continue;
    double a = scan.xs[i - 1], b = scan.xs[i + 1];
    for (int it = 0; it < 200 && (b - a) > 1e-13 * (1.0 + std::abs(a)); ++it) {
      const double m1 = a + (b - a) / 3.0;
      const double m2 = b - (b - a) / 3.0;
      if (std::abs(f(m1)) < std::abs(f(m2))) {
        b = m2;
      } else {
        a = m1;
      }
    }
    const double x0 = 0.5 * (a + b);
    const double local = std::max(std::abs(scan.vals[i - 1]), std::abs(scan.vals[i + 1]));
    if (std::abs(f(x0)) < rel_tol * std::max(local, 1e-300)) zeros.push_back({x0, false});
  }
  std::sort(zeros.begin(), zeros.end(),
            [](const LocatedZero& a, const LocatedZero& b) { return a.x < b.x; });
  std::vector<LocatedZero> merged;
  for (const auto& z : zeros) {
    if (!merged.empty() && std::abs(z.x - merged.back().x) < 1e-8 * (1.0 + std::abs(z.x))) continue;
    merged.push_back(z);
  }
  return merged;
}

std::vector<double> kappa_grid(double kappa_max, int n) {
  std::vector<double> xs;
  const double h = kappa_max / static_cast<double>(n);
  for (double k = h * 1e-4; k < h; k *= 2.0) xs.push_back(k);  // geometric head near zero
  for (int i = 1; i <= n; ++i) xs.push_back(h * static_cast<double>(i));
  return xs;
}

std::vector<NegativeEigenvalue> negative_zeros_for_grid(const MetricGraph& g, double kappa_max,
                                                        int n, double rel_tol, int* bisections) {
  RealScan scan;
  scan.xs = kappa_grid(kappa_max, n);
  std::vector<SpectralPoint> pts;
  pts.reserve(scan.xs.size());
  for (double k : scan.xs) pts.push_back(SpectralPoint::from_rho(kI * k));
  const auto deltas = delta_grid(g, pts, default_exec());
  double max_abs = 0.0, max_imag = 0.0;
  scan.vals.resize(scan.xs.size());
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    scan.vals[i] = deltas[i].real();
    max_abs = std::max(max_abs, std::abs(deltas[i]));
    max_imag = std::max(max_imag, std::abs(deltas[i].imag()));
  }
  if (max_imag > 1e-8 * max_abs) {
    throw NumericalError("negative_spectrum: Delta is not real on the negative axis");
  }
  auto eval = [&g](double kappa) { return delta(g, SpectralPoint::from_rho(kI * kappa)).real(); };
  const auto zeros = locate_real_zeros(scan, eval, rel_tol, bisections);

  std::vector<NegativeEigenvalue> out;
  for (std::size_t i = 0; i < zeros.size(); ++i) {
    const double kappa0 = zeros[i].x;
    const double lambda0 = -kappa0 * kappa0;
    double gap = std::abs(lambda0);
    if (i > 0) gap = std::min(gap, std::abs(lambda0 + zeros[i - 1].x * zeros[i - 1].x));
    if (i + 1 < zeros.size()) {
      gap = std::min(gap, std::abs(zeros[i + 1].x * zeros[i + 1].x + lambda0));
    }
    const double radius = std::max(1e-10, std::min(0.45 * gap, 0.05 * (1.0 + std::abs(lambda0))));
    int mult = 1;
    try {
      mult = winding_number([&g](Complex z) { return delta(g, SpectralPoint::from_lambda(z)); },
                            Complex(lambda0, 0.0), radius);
    } catch (const NumericalError&) {
      mult = zeros[i].from_sign_change ? 1 : 2;
    }
    if (mult <= 0) continue;  // a dip that encloses no zero
    out.push_back({lambda0, mult});
  }
  std::sort(out.begin(), out.end(), [](const NegativeEigenvalue& a, const NegativeEigenvalue& b) {
    return a.lambda < b.lambda;
  });
  return out;
}

}  // namespace

SpectrumReport negative_spectrum(const MetricGraph& g, const SpectrumOptions& opts) {
  SpectrumReport report;
  const double qmax = g.max_abs_potential();
  const double kappa_max = std::sqrt(qmax + 1.0);
  report.diagnostics.lambda_min = -kappa_max * kappa_max;
  report.diagnostics.grid_points = opts.grid_points;

  report.negative = negative_zeros_for_grid(g, kappa_max, opts.grid_points, opts.zero_rel_tol,
                                            &report.diagnostics.bisections);
  for (const auto& z : report.negative) report.n_minus += z.multiplicity;

  if (opts.check_refinement) {
    report.diagnostics.refined_grid_points = 2 * opts.grid_points;
    const auto refined = negative_zeros_for_grid(g, kappa_max, 2 * opts.grid_points,
                                                 opts.zero_rel_tol, &report.diagnostics.bisections);
    int refined_count = 0;
    for (const auto& z : refined) refined_count += z.multiplicity;
    report.diagnostics.refinement_stable = (refined_count == report.n_minus);
  }
  return report;
}

SpectrumReport positive_singular_set(const MetricGraph& g, const SpectrumOptions& opts) {
  SpectrumReport report;
  report.diagnostics.grid_points = opts.grid_points;
  const MetricGraph gc = compact_part(g);
  if (gc.edge_count() == 0) return report;

  RealScan scan;
  const int n = std::max(opts.grid_points, 16);
  const double rho_min = opts.rho_max / static_cast<double>(n) * 0.5;
  scan.xs.resize(static_cast<std::size_t>(n));
  std::vector<SpectralPoint> pts(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double rho =
        rho_min + (opts.rho_max - rho_min) * static_cast<double>(i) / static_cast<double>(n - 1);
    scan.xs[static_cast<std::size_t>(i)] = rho;
    pts[static_cast<std::size_t>(i)] = SpectralPoint::from_rho(rho);
  }
  const auto deltas = delta_grid(gc, pts, default_exec());
  scan.vals.resize(scan.xs.size());
  double max_abs = 0.0, max_imag = 0.0;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    scan.vals[i] = deltas[i].real();
    max_abs = std::max(max_abs, std::abs(deltas[i]));
    max_imag = std::max(max_imag, std::abs(deltas[i].imag()));
  }
  if (max_imag > 1e-8 * max_abs) {
    throw NumericalError("positive_singular_set: compact Delta is not real for lambda > 0");
  }
  auto eval = [&gc](double rho) { return delta(gc, SpectralPoint::from_rho(rho)).real(); };
  const auto zeros =
      locate_real_zeros(scan, eval, opts.zero_rel_tol, &report.diagnostics.bisections);

  for (const auto& z : zeros) {
    PositiveCandidate cand;
    const double rho0 = z.x;
    cand.lambda = rho0 * rho0;
    cand.abs_delta_compact = std::abs(eval(rho0));
    cand.abs_delta_graph = std::abs(delta(g, SpectralPoint::from_rho(rho0)));
    double local = 0.0;
    for (double off : {-0.1, -0.05, 0.05, 0.1}) {
      const double rho = rho0 + off;
      if (rho <= 0.0) continue;
      local = std::max(local, std::abs(delta(g, SpectralPoint::from_rho(rho))));
    }
    cand.local_scale = local;
    cand.below_threshold = cand.abs_delta_graph < opts.zero_rel_tol * std::max(local, 1e-300);
    report.positive_singular.push_back(cand);
  }
  return report;
}

}  // namespace qgraph
