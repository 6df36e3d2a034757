#pragma once

#include <cmath>
#include <complex>

namespace qgraph {

using Complex = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;

// cos(sqrt(w)), entire in w. Series below |w| = 1e-6 (i.e. |z| < 1e-3) to
// dodge the cancellation in cos(z) - 1 territory and the sqrt branch.
inline Complex cos_sqrt(Complex w) {
  if (std::abs(w) < 1e-6) {
    return 1.0 + w * (-1.0 / 2.0 + w * (1.0 / 24.0 + w * (-1.0 / 720.0)));
  }
  return std::cos(std::sqrt(w));
}

// sin(sqrt(w))/sqrt(w), entire in w.
inline Complex sinc_sqrt(Complex w) {
  if (std::abs(w) < 1e-6) {
    return 1.0 + w * (-1.0 / 6.0 + w * (1.0 / 120.0 + w * (-1.0 / 5040.0)));
  }
  const Complex z = std::sqrt(w);
  return std::sin(z) / z;
}

// (1 - cos(sqrt(w)))/w, entire in w.
inline Complex versinc_sqrt(Complex w) {
  if (std::abs(w) < 1e-6) {
    return 1.0 / 2.0 + w * (-1.0 / 24.0 + w * (1.0 / 720.0));
  }
  return (1.0 - std::cos(std::sqrt(w))) / w;
}

}  // namespace qgraph
