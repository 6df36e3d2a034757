#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qgraph/aedges.hpp"
#include "qgraph/graph.hpp"
#include "qgraph/scattering.hpp"
#include "qgraph/spectral.hpp"

namespace qgraph {

// |M_v(g) - sum_j M_v(part_j)| for a decomposition of g at v; boundary copies
// of v inside the parts are K-typed.
double additivity_residual(const MetricGraph& g, int v, const std::vector<std::vector<EdgeRef>>& parts,
                           const SpectralPoint& sp);

// |d psi_r / psi_r (v) + M_v(lambda, C_K(g, r))| at the ray's base.
double matching_residual_ray(const MetricGraph& g, int ray, const SpectralPoint& sp);

// |M_v(g) - M_v(C_K(g, r)) - m_r(lambda)| at the ray's base.
double m_addition_residual(const MetricGraph& g, int ray, const SpectralPoint& sp);

// Compact boundary edge r = [v bdry, u]: |d Phi_v / Phi_v (u) + M_u(lambda, C_K(g, r))|.
double matching_residual_edge(const MetricGraph& g, int edge, const SpectralPoint& sp);

// |M_u(g) - M_u(r^*) - M_u(C_K(g, r))| for the same edge, r^* the lone edge
// with the far end K-typed.
double m_addition_residual_edge(const MetricGraph& g, int edge, const SpectralPoint& sp);

enum class PeelProblem { RayScattering, BoundaryEdge, InternalEdge, BoundaryCycle, InternalCycle };

std::string_view to_string(PeelProblem p);

struct PeelStep {
  int mu = 0;
  AEdge a_edge;
  PeelProblem problem;
  std::string a_edge_label;   // ids of member edges
  std::string input_datum;    // which J / M the step consumes
  std::string output_claim;   // which M the step propagates
  int input_vertex = -1;      // anchor of the consumed M (-1: scattering data)
  int output_vertex = -1;     // anchor of the propagated M (-1: none)
  int ray = -1;               // RayScattering: ray index
};

// The order-by-order schedule: a-edges of order omega down to 0, within each
// order rays, boundary edges, boundary cycles, internal edges, internal cycles.
std::vector<PeelStep> peel_schedule(const MetricGraph& g);

enum class StepVerdict { Match, Inconclusive, Mismatch };

struct ProbeStepReport {
  PeelStep step;
  double residual = 0.0;
  StepVerdict verdict = StepVerdict::Match;
};

struct ProbeReport {
  std::vector<ProbeStepReport> steps;
  std::optional<int> first_mismatch;
  double match_tol = 1e-8;
  double mismatch_tol = 1e-3;
};

struct ProbeGrids {
  std::vector<Complex> lambdas;      // for M comparisons
  std::vector<double> rhos;          // for reflection comparisons
  static ProbeGrids defaults();
};

// Forward-computes each schedule step's input datum for both operators and
// reports the per-step discrepancy; identical potentials give all-match.
// Residuals inside (match_tol, mismatch_tol) are reported inconclusive.
ProbeReport uniqueness_probe(const MetricGraph& g, const MetricGraph& g_tilde,
                             const ProbeGrids& grids = ProbeGrids::defaults(),
                             double match_tol = 1e-8, double mismatch_tol = 1e-3);

}  // namespace qgraph
