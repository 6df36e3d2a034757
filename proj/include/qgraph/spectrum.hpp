#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "qgraph/graph.hpp"
#include "qgraph/spectral.hpp"

namespace qgraph {

struct NegativeEigenvalue {
  double lambda;
  int multiplicity;
};

struct PositiveCandidate {
  double lambda;
  double abs_delta_compact;  // |Delta(lambda, Gamma_c)| at the candidate
  double abs_delta_graph;    // |Delta(lambda + i0, G)|
  double local_scale;        // max |Delta(., G)| near the candidate
  bool below_threshold;      // relative zero test against the local scale
};

struct SpectrumDiagnostics {
  int grid_points = 0;
  int refined_grid_points = 0;
  bool refinement_stable = true;
  int bisections = 0;
  double lambda_min = 0.0;
};

struct SpectrumReport {
  std::vector<NegativeEigenvalue> negative;
  int n_minus = 0;  // with multiplicity
  std::vector<PositiveCandidate> positive_singular;
  SpectrumDiagnostics diagnostics;
};

struct SpectrumOptions {
  int grid_points = 2000;
  bool check_refinement = true;
  double rho_max = 20.0;       // positive scan reach (in rho)
  double zero_rel_tol = 1e-9;  // |Delta| threshold relative to the local scale
};

// All zeros of Delta on (lambda_min, 0) with multiplicities; Delta is real
// there and is bracketed on a kappa grid, with argument-principle winding
// supplying multiplicities (bisection alone misses even-order zeros).
SpectrumReport negative_spectrum(const MetricGraph& g, const SpectrumOptions& opts = {});

// Candidates for the positive singular set: eigenvalues of the compact part
// (all rays cut off) filtered by |Delta(lambda + i0, G)| against a local scale.
SpectrumReport positive_singular_set(const MetricGraph& g, const SpectrumOptions& opts = {});

// Compact part of the graph: every ray K-cut; isolated vertices dropped.
MetricGraph compact_part(const MetricGraph& g);

// Winding number of f around a circle, by adaptive phase accumulation.
int winding_number(const std::function<Complex(Complex)>& f, Complex center, double radius,
                   int initial_samples = 64);

// Zeros of an analytic function inside an axis-aligned box, located to
// `resolution` by recursive winding-count subdivision.
std::vector<Complex> box_zeros(const std::function<Complex(Complex)>& f, Complex lo, Complex hi,
                               double resolution);

}  // namespace qgraph
