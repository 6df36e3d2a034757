#include "qgraph/kernels.hpp"

#include <cstdlib>
#include <string_view>

#include "qgraph/characteristic.hpp"
#include "qgraph/scattering.hpp"

namespace qgraph {

namespace detail {
bool openmp_enabled() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}
}  // namespace detail

namespace {

Exec initial_default_exec() {
  if (const char* env = std::getenv("QGRAPH_EXEC")) {
    if (std::string_view(env) == "serial") return Exec::Serial;
    if (std::string_view(env) == "parallel") return Exec::Parallel;
  }
  return detail::openmp_enabled() ? Exec::Parallel : Exec::Serial;
}

Exec g_default_exec = initial_default_exec();

}  // namespace

Exec default_exec() { return g_default_exec; }
void set_default_exec(Exec mode) { g_default_exec = mode; }

std::vector<Complex> delta_grid(const MetricGraph& g, std::span<const SpectralPoint> pts,
                                Exec mode) {
  std::vector<Complex> out(pts.size());
  parallel_for(pts.size(), mode, [&](std::size_t i) { out[i] = delta(g, pts[i]); });
  return out;
}

std::vector<ReflectionSample> reflection_grid(const MetricGraph& g, int ray,
                                              std::span<const double> rhos,
                                              std::span<const double> singular_rhos, Exec mode) {
  std::vector<ReflectionSample> out(rhos.size());
  parallel_for(rhos.size(), mode, [&](std::size_t i) {
    out[i] = reflection_sample(g, ray, rhos[i], singular_rhos);
  });
  return out;
}

}  // namespace qgraph
