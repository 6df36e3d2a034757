#pragma once

#include "qgraph/cxmath.hpp"

namespace qgraph {

enum class Side { None, PlusI0, MinusI0 };

// Spectral parameter pair (lambda, rho) with rho in the closed upper half
// plane and rho^2 = lambda. On the cut [0, inf) the side picks the boundary
// limit: lambda = rho^2 + sgn(rho) * i0, so rho > 0 means lambda + i0 and
// rho < 0 means lambda - i0.
struct SpectralPoint {
  Complex lambda;
  Complex rho;
  Side side = Side::None;

  static SpectralPoint from_lambda(Complex lambda, Side side = Side::None);
  static SpectralPoint from_rho(Complex rho);

  bool degenerate_rho() const { return rho == Complex(0.0, 0.0); }
  double tau() const { return rho.imag(); }  // Im rho
};

}  // namespace qgraph
