#pragma once

#include <memory>
#include <utility>

#include "qgraph/graph.hpp"
#include "qgraph/spectral.hpp"

namespace qgraph {

struct WaveState {
  Complex y;
  Complex dy;  // derivative with respect to arc length from the initial end
};

// Propagates states of -y'' + (q - lambda) y = 0 along one edge.
// Piecewise-constant potentials move by exact 2x2 transfer matrices;
// sampled potentials use an embedded RK4(5) pair with rtol 1e-10 / atol 1e-12.
class EdgePropagator {
 public:
  virtual ~EdgePropagator() = default;
  virtual WaveState advance(const WaveState& from, double s_from, double s_to) const = 0;
};

std::shared_ptr<const EdgePropagator> make_propagator(const Potential& q, Complex lambda,
                                                      double domain_len);

// One solution along one edge or ray: the propagated state on [0, domain],
// continued for rays past the support radius by the exact plane-wave tail.
class Wave {
 public:
  Wave() = default;
  Wave(std::shared_ptr<const EdgePropagator> prop, double domain, WaveState at_zero)
      : prop_(std::move(prop)), domain_(domain), y0_(at_zero) {}

  // Ray wave with tail out * e^{i rho (s-R)} + in * e^{-i rho (s-R)} beyond R.
  static Wave with_tail(std::shared_ptr<const EdgePropagator> prop, double support, Complex rho,
                        Complex out_coeff, Complex in_coeff);

  WaveState at(double s) const;
  WaveState at_zero() const { return y0_; }

  Wave scaled(Complex factor) const;

 private:
  std::shared_ptr<const EdgePropagator> prop_;
  double domain_ = 0.0;
  WaveState y0_{};
  bool has_tail_ = false;
  Complex rho_{};
  // rho != 0: coefficients of e^{+-i rho (s-R)}; rho == 0: value and slope at R.
  Complex tail_out_{}, tail_in_{};
};

// Cosine/sine pair anchored at the initial end: C(0)=1, C'(0)=0, S(0)=0, S'(0)=1.
std::pair<Wave, Wave> local_basis(const CompactEdge& edge, const SpectralPoint& sp);

enum class EdgeEnd { Initial, Terminal };

// Sine-type solution vanishing at the chosen end with unit inward derivative.
Wave local_basis_at(const CompactEdge& edge, EdgeEnd end, const SpectralPoint& sp);

struct JostSolution {
  Wave wave;
  Complex d;         // e_r(v, rho)
  Complex d_deriv;   // inward derivative at the base
  bool degenerate;   // rho == 0: the Jost normalization collapses
};

JostSolution jost(const Ray& ray, const SpectralPoint& sp);

// Jost at arbitrary rho (both half planes); used for the incoming wave e(x,-rho).
JostSolution jost_at_rho(const Ray& ray, Complex rho);

// Solution on a ray from initial data at the base, continued past the
// support radius by the exact plane-wave decomposition.
Wave ray_wave(const Ray& ray, const SpectralPoint& sp, WaveState at_base);

struct WeylM {
  Complex value;
  bool pole;
};

// Classical half-line Weyl function m_r = d^r / d_r.
WeylM classical_weyl_m(const Ray& ray, const SpectralPoint& sp);

}  // namespace qgraph
