#pragma once

#include <span>
#include <vector>

#include "qgraph/graph.hpp"
#include "qgraph/parallel.hpp"
#include "qgraph/spectral.hpp"

namespace qgraph {

// Data-parallel evaluation kernels. Each grid point is independent; results
// land in preassigned slots so serial and parallel runs agree bitwise.

std::vector<Complex> delta_grid(const MetricGraph& g, std::span<const SpectralPoint> pts,
                                Exec mode);

enum class ReflectionQuality { Ok, NearSingular };

struct ReflectionSample {
  double rho;
  Complex s;
  ReflectionQuality quality;
};

// Reflection coefficient of one ray over a positive rho grid. Values within
// `singular_guard` of a positive singular candidate are evaluated off-axis at
// lambda + i*delta and Richardson-extrapolated, and flagged.
std::vector<ReflectionSample> reflection_grid(const MetricGraph& g, int ray,
                                              std::span<const double> rhos,
                                              std::span<const double> singular_rhos, Exec mode);

}  // namespace qgraph
