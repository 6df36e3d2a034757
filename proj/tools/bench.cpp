// Benchmark of the data-parallel kernels: serial reference vs OpenMP, with a
// bitwise equality check between the two paths.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "qgraph/graph.hpp"
#include "qgraph/kernels.hpp"
#include "qgraph/spectral.hpp"
#include "qgraph/spectrum.hpp"

using namespace qgraph;

namespace {

MetricGraph bench_graph() {
  GraphBuilder b;
  const int v0 = b.add_vertex("v0", VertexKind::BoundaryD);
  const int a = b.add_vertex("a", VertexKind::Internal);
  const int c = b.add_vertex("c", VertexKind::Internal);
  b.add_edge("e0", v0, a, 1.0, Potential::piecewise_const({0.0, 0.5}, {1.5, -2.0}));
  b.add_edge("e1", a, c, 0.7, Potential::constant(0.5));
  b.add_edge("c0", c, c, 1.3, Potential::zero());
  b.add_ray("r0", a, 1.0, Potential::piecewise_const({0.0, 1.0}, {-3.0, 0.0}));
  b.set_root(v0);
  return b.build();
}

template <class F>
double time_ms(F&& f, int reps) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

}  // namespace

int main() {
  const MetricGraph g = bench_graph();
  bool all_equal = true;

  // Kernel 1: determinant over a complex lambda grid.
  {
    std::vector<SpectralPoint> pts;
    for (int i = 0; i < 4096; ++i) {
      pts.push_back(SpectralPoint::from_lambda({-5.0 + 0.005 * i, 0.8}));
    }
    std::vector<Complex> serial, parallel;
    const double ts = time_ms([&] { serial = delta_grid(g, pts, Exec::Serial); }, 3);
    const double tp = time_ms([&] { parallel = delta_grid(g, pts, Exec::Parallel); }, 3);
    const bool eq = serial == parallel;
    all_equal = all_equal && eq;
    std::printf("delta_grid       n=%5zu  serial %8.1f ms  parallel %8.1f ms  speedup %.2fx  %s\n",
                pts.size(), ts, tp, ts / tp, eq ? "bitwise-equal" : "MISMATCH");
  }

  // Kernel 2: reflection coefficients over a rho grid.
  {
    std::vector<double> rhos;
    for (int i = 1; i <= 1024; ++i) rhos.push_back(0.05 + 15.0 * i / 1024.0);
    const std::vector<double> singular;
    std::vector<ReflectionSample> serial, parallel;
    const double ts =
        time_ms([&] { serial = reflection_grid(g, 0, rhos, singular, Exec::Serial); }, 3);
    const double tp =
        time_ms([&] { parallel = reflection_grid(g, 0, rhos, singular, Exec::Parallel); }, 3);
    bool eq = serial.size() == parallel.size();
    for (std::size_t i = 0; eq && i < serial.size(); ++i) {
      eq = serial[i].s == parallel[i].s && serial[i].quality == parallel[i].quality;
    }
    all_equal = all_equal && eq;
    std::printf("reflection_grid  n=%5zu  serial %8.1f ms  parallel %8.1f ms  speedup %.2fx  %s\n",
                rhos.size(), ts, tp, ts / tp, eq ? "bitwise-equal" : "MISMATCH");
  }

  // Kernel 3: negative-spectrum scan (grid evaluation dominates).
  {
    SpectrumOptions opts;
    opts.grid_points = 6000;
    opts.check_refinement = false;
    SpectrumReport rs, rp;
    const double ts = time_ms(
        [&] {
          set_default_exec(Exec::Serial);
          rs = negative_spectrum(g, opts);
        },
        3);
    const double tp = time_ms(
        [&] {
          set_default_exec(Exec::Parallel);
          rp = negative_spectrum(g, opts);
        },
        3);
    bool eq = rs.negative.size() == rp.negative.size();
    for (std::size_t i = 0; eq && i < rs.negative.size(); ++i) {
      eq = rs.negative[i].lambda == rp.negative[i].lambda &&
           rs.negative[i].multiplicity == rp.negative[i].multiplicity;
    }
    all_equal = all_equal && eq;
    std::printf("spectrum_scan    n=%5d  serial %8.1f ms  parallel %8.1f ms  speedup %.2fx  %s\n",
                opts.grid_points, ts, tp, ts / tp, eq ? "bitwise-equal" : "MISMATCH");
  }

  if (!all_equal) {
    std::printf("FAIL: serial and parallel paths disagree\n");
    return 1;
  }
  return 0;
}
