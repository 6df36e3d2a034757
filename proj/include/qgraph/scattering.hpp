#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qgraph/characteristic.hpp"
#include "qgraph/graph.hpp"
#include "qgraph/kernels.hpp"
#include "qgraph/spectrum.hpp"

namespace qgraph {

// The Weyl-type solution psi_r: incoming wave e_r(x, -rho) on ray r, outgoing
// Jost components everywhere else, matching conditions at every vertex. Built
// by the direct modified-system solve, so it also covers the exceptional
// points where the quotient representation degenerates.
class RaySolution {
 public:
  bool pole() const { return pole_; }
  // Coefficient of e_r(x, rho) on the tagged ray; continues s_r into the
  // upper half plane.
  Complex reflection_amplitude() const { return amplitude_; }
  WaveState on_tagged_ray(double s) const;
  WaveState on_other_ray(int r, double s) const;
  WaveState on_edge(int e, double s) const;
  Complex value_at_base() const;
  Complex inward_deriv_at_base() const;

 private:
  friend RaySolution weyl_type_solution(const MetricGraph& g, int ray, const SpectralPoint& sp);
  std::shared_ptr<const Assembly> assembly_;
  std::shared_ptr<const MetricGraph> graph_;
  JostSolution incoming_;  // e_r(x, -rho)
  Eigen::VectorXcd coeffs_;
  int ray_ = -1;
  Complex amplitude_{};
  bool pole_ = false;
};

RaySolution weyl_type_solution(const MetricGraph& g, int ray, const SpectralPoint& sp);

// Quotient-representation coefficients: psi_r = gamma e_r(x, rho) + delta S_r.
struct RayCoefficients {
  Complex gamma;
  Complex delta;
};
RayCoefficients weyl_type_coefficients(const MetricGraph& g, int ray, const SpectralPoint& sp);

// Reflection coefficient at real rho > 0, extracted from a two-point
// plane-wave match beyond the support radius; the incoming coefficient must
// come back as 1 (consistency gate).
Complex reflection(const MetricGraph& g, int ray, double rho);

// Grid-point variant with the near-singular handling of reflection_grid.
ReflectionSample reflection_sample(const MetricGraph& g, int ray, double rho,
                                   std::span<const double> singular_rhos);

struct PoleWeight {
  double kappa;  // pole at rho = i kappa
  double alpha;  // weight number, real positive
};

// Poles of psi_r on the positive imaginary axis: candidates are i*sqrt(-lambda)
// over the negative spectrum, kept when the residue is nonzero; all verified
// simple. Weights via trapezoidal contour quadrature at two radii.
std::vector<PoleWeight> pole_weights(const MetricGraph& g, int ray,
                                     const std::vector<NegativeEigenvalue>& negative);

// The pole positions alone (kappa with rho0 = i kappa).
std::vector<double> pole_set(const MetricGraph& g, int ray,
                             const std::vector<NegativeEigenvalue>& negative);

// kappa -> alpha pairs; same computation as pole_weights.
std::vector<PoleWeight> weight_numbers(const MetricGraph& g, int ray,
                                       const std::vector<NegativeEigenvalue>& negative);

struct GridSpec {
  double lo = 0.05;
  double hi = 20.0;
  int n = 512;
  std::vector<double> points() const;  // n points on (lo, hi]
};

struct ScatteringData {
  std::string ray_id;
  std::vector<ReflectionSample> reflection;  // on the declared positive grid
  std::vector<PoleWeight> poles;
};

ScatteringData scattering_data(const MetricGraph& g, int ray, const GridSpec& grid = {});

struct MSamples {
  std::string label;    // vertex id, or cycle tag for unrolled graphs
  std::vector<Complex> lambdas;
  std::vector<Complex> values;
  std::vector<bool> poles;
};

struct FullData {
  std::vector<ScatteringData> rays;          // J_r per ray, in ray order
  std::vector<MSamples> boundary_m;          // M_v(., G), boundary v != root
  std::vector<MSamples> cycle_m;             // M_{v_c}(., G_c) per cycle
};

struct DataGrids {
  GridSpec rho;
  std::vector<Complex> lambdas;  // defaults to 64 points on Im lambda = +-1
  static DataGrids defaults();
};

FullData full_data(const MetricGraph& g, const DataGrids& grids = DataGrids::defaults());

// M_v sampled on a lambda grid via the modified system (any vertex kind).
MSamples sample_weyl_function(const MetricGraph& g, int v, std::span<const Complex> lambdas);

}  // namespace qgraph
