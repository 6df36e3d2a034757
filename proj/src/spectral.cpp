#include "qgraph/spectral.hpp"

#include <cmath>

#include "qgraph/errors.hpp"

namespace qgraph {

SpectralPoint SpectralPoint::from_lambda(Complex lambda, Side side) {
  SpectralPoint sp;
  sp.lambda = lambda;
  if (lambda.imag() == 0.0 && lambda.real() >= 0.0) {
    if (side == Side::None) {
      throw PreconditionError(
          "lambda on [0, inf) needs a boundary side (plus_i0 or minus_i0)");
    }
    sp.side = side;
    const double r = std::sqrt(lambda.real());
    sp.rho = (side == Side::PlusI0) ? Complex(r, 0.0) : Complex(-r, 0.0);
    return sp;
  }
  if (side != Side::None) {
    throw PreconditionError("boundary side applies only to lambda on [0, inf)");
  }
  Complex w = std::sqrt(lambda);
  if (w.imag() < 0.0) w = -w;
  sp.rho = w;
  sp.side = Side::None;
  return sp;
}

SpectralPoint SpectralPoint::from_rho(Complex rho) {
  if (rho.imag() < 0.0) throw PreconditionError("rho must lie in the closed upper half plane");
  SpectralPoint sp;
  sp.rho = rho;
  sp.lambda = rho * rho;
  if (rho.imag() == 0.0 && rho.real() != 0.0) {
    sp.side = rho.real() > 0.0 ? Side::PlusI0 : Side::MinusI0;
    sp.lambda = Complex(rho.real() * rho.real(), 0.0);
  }
  return sp;
}

}  // namespace qgraph
