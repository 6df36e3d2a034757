#pragma once

#include <vector>

#include "qgraph/graph.hpp"
#include "qgraph/spectral.hpp"

namespace qgraph {

// Coefficients of the large-rho expansion
//   Delta(lambda, G) = (i/2 rho)^{N-1} sum_l B_l exp(-i rho l)
// over the signed length sums l; at q = 0 the normalized determinant lies in
// this space exactly, for general q the remainder decays like 1/rho.
struct ExpSumExpansion {
  int n_factor = 0;              // N(G) = #D-vertices + #cycles
  double total_length = 0.0;     // |G|
  std::vector<double> lengths;   // kept l values, ascending
  std::vector<double> coeffs;    // real B_l
  double max_imag = 0.0;         // largest |Im| discarded when realifying
  double fit_residual = 0.0;     // normalized LS residual
  double condition = 0.0;        // column-scaled QR condition estimate

  // B at the given length (0 when dropped / absent).
  double coeff_at(double l, double tol = 1e-9) const;
};

struct ExpSumOptions {
  bool use_graph_potential = false;  // default: fit the q = 0 determinant
  double im_rho = 0.0;               // 0: auto 8 / |G|
  int points_factor = 4;             // grid points = factor * #candidates
  double drop_tol = 1e-8;
  double condition_limit = 1e10;
};

ExpSumExpansion exp_sum_coefficients(const MetricGraph& g, const ExpSumOptions& opts = {});

// Leading coefficient B_{|G|} through the decomposition recursion
//   B_{|G|}(G) = sum_k B_{|G_k|}(G_k) prod_{j != k} B_{|G_j|}(G'_j),
// with direct fits at the one-a-edge base cases.
double leading_coefficient_recursive(const MetricGraph& g);

// All candidate signed length sums (deduplicated, ascending).
std::vector<double> signed_length_sums(const MetricGraph& g, double merge_tol = 1e-9);

}  // namespace qgraph
