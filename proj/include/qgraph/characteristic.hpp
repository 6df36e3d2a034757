#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "qgraph/graph.hpp"
#include "qgraph/local_solutions.hpp"
#include "qgraph/spectral.hpp"

namespace qgraph {

struct RowLabel {
  enum class Type { EdgeValue, RayValue, Kirchhoff, Dirichlet };
  Type type;
  int index;        // edge / ray / vertex index
  bool at_initial;  // EdgeValue rows: which end
};

struct ColLabel {
  enum class Type { Beta1, Beta2, Gamma, Alpha };
  Type type;
  int index;
};

// The ordered linear system whose determinant is the characteristic function:
// per compact edge the two endpoint-value equations, per ray the base-value
// equation, per vertex its matching condition (Kirchhoff or Dirichlet).
// Rows: edge pairs by edge order, rays by ray order, vertices by vertex order.
// Columns: (beta1, beta2) per edge, gamma per ray, alpha per vertex.
struct CharacteristicMatrix {
  Eigen::MatrixXcd m;
  std::vector<RowLabel> row_labels;
  std::vector<ColLabel> col_labels;
};

// Cached per-edge local solutions together with the assembled system.
struct Assembly {
  SpectralPoint sp;
  struct EdgeLocal {
    Wave c, s;                 // anchored at the initial end
    WaveState c_end, s_end;    // values and d/ds at the terminal end
  };
  std::vector<EdgeLocal> edges;
  std::vector<JostSolution> rays;
  CharacteristicMatrix system;

  int n_edges = 0, n_rays = 0, n_vertices = 0;
  int beta_col(int e, int which) const { return 2 * e + which; }
  int gamma_col(int r) const { return 2 * n_edges + r; }
  int alpha_col(int v) const { return 2 * n_edges + n_rays + v; }
  int vertex_row(int v) const { return 2 * n_edges + n_rays + v; }

  // Inward derivative pair (for beta1, beta2) of the local basis at an edge end.
  std::pair<Complex, Complex> inward_basis_deriv(int e, bool at_initial) const;
};

Assembly assemble_system(const MetricGraph& g, const SpectralPoint& sp);

Complex delta(const MetricGraph& g, const SpectralPoint& sp);

// Characteristic determinant of an already assembled system.
Complex determinant(const CharacteristicMatrix& system);

// The Weyl solution Phi_v: the matching condition at v is replaced by the
// normalization alpha_v = 1; all other equations stay.
class WeylSolution {
 public:
  bool pole() const { return pole_; }
  Complex at_vertex(int v) const;
  WaveState on_edge(int e, double s) const;
  WaveState on_ray(int r, double s) const;
  // Sum of inward derivatives at the anchor vertex.
  Complex weyl_derivative_sum() const;
  const Assembly& assembly() const { return *assembly_; }
  Complex coefficient(int col) const { return coeffs_(col); }

 private:
  friend WeylSolution weyl_solution(const MetricGraph& g, int v, const SpectralPoint& sp);
  std::shared_ptr<const Assembly> assembly_;
  std::shared_ptr<const MetricGraph> graph_;
  Eigen::VectorXcd coeffs_;
  int vertex_ = -1;
  bool pole_ = false;
};

WeylSolution weyl_solution(const MetricGraph& g, int v, const SpectralPoint& sp);

struct WeylValue {
  Complex value;           // derivative sum
  Complex ratio;           // Delta(g) / Delta(E(g, v))
  double cross_check_rel;  // |value - ratio| / (1 + |value|)
  bool pole;
};

// M_v via the derivative sum, cross-checked against the determinant ratio.
// Defined for internal and K-type vertices.
WeylValue weyl_function(const MetricGraph& g, int v, const SpectralPoint& sp);

// Coefficients of Phi_v on a boundary edge r = [u, v] with v of D-type:
// Phi_v = gamma * S_{r,v} + delta * S_{r,u} on r.
struct WeylEdgeCoefficients {
  Complex gamma;
  Complex delta;
};
WeylEdgeCoefficients weyl_edge_coefficients(const MetricGraph& g, int edge,
                                            const SpectralPoint& sp);

}  // namespace qgraph
