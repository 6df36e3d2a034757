#include "qgraph/characteristic.hpp"

#include <Eigen/LU>
#include <cmath>

#include "qgraph/errors.hpp"
#include "qgraph/surgery.hpp"

namespace qgraph {

std::pair<Complex, Complex> Assembly::inward_basis_deriv(int e, bool at_initial) const {
  if (at_initial) {
    // C'(0) = 0, S'(0) = 1; inward = +d/ds at the initial end.
    return {Complex(0.0), Complex(1.0)};
  }
  const auto& el = edges[static_cast<std::size_t>(e)];
  return {-el.c_end.dy, -el.s_end.dy};
}

Assembly assemble_system(const MetricGraph& g, const SpectralPoint& sp) {
  Assembly a;
  a.sp = sp;
  a.n_edges = g.edge_count();
  a.n_rays = g.ray_count();
  a.n_vertices = g.vertex_count();

  a.edges.reserve(static_cast<std::size_t>(a.n_edges));
  for (int e = 0; e < a.n_edges; ++e) {
    auto [c, s] = local_basis(g.edge(e), sp);
    Assembly::EdgeLocal el{std::move(c), std::move(s), {}, {}};
    el.c_end = el.c.at(g.edge(e).length);
    el.s_end = el.s.at(g.edge(e).length);
    a.edges.push_back(std::move(el));
  }
  a.rays.reserve(static_cast<std::size_t>(a.n_rays));
  for (int r = 0; r < a.n_rays; ++r) a.rays.push_back(jost(g.ray(r), sp));

  const int n = 2 * a.n_edges + a.n_rays + a.n_vertices;
  auto& sys = a.system;
  sys.m = Eigen::MatrixXcd::Zero(n, n);
  sys.row_labels.clear();
  sys.col_labels.clear();

  for (int e = 0; e < a.n_edges; ++e) {
    sys.col_labels.push_back({ColLabel::Type::Beta1, e});
    sys.col_labels.push_back({ColLabel::Type::Beta2, e});
  }
  for (int r = 0; r < a.n_rays; ++r) sys.col_labels.push_back({ColLabel::Type::Gamma, r});
  for (int v = 0; v < a.n_vertices; ++v) sys.col_labels.push_back({ColLabel::Type::Alpha, v});

  int row = 0;
  // Edge endpoint values against the vertex values.
  for (int e = 0; e < a.n_edges; ++e) {
    const auto& ed = g.edge(e);
    const auto& el = a.edges[static_cast<std::size_t>(e)];
    sys.m(row, a.beta_col(e, 0)) = 1.0;  // C(0)
    sys.m(row, a.alpha_col(ed.initial)) = -1.0;
    sys.row_labels.push_back({RowLabel::Type::EdgeValue, e, true});
    ++row;
    sys.m(row, a.beta_col(e, 0)) = el.c_end.y;
    sys.m(row, a.beta_col(e, 1)) = el.s_end.y;
    sys.m(row, a.alpha_col(ed.terminal)) = -1.0;
    sys.row_labels.push_back({RowLabel::Type::EdgeValue, e, false});
    ++row;
  }
  // Ray base values.
  for (int r = 0; r < a.n_rays; ++r) {
    sys.m(row, a.gamma_col(r)) = a.rays[static_cast<std::size_t>(r)].d;
    sys.m(row, a.alpha_col(g.ray(r).base)) = -1.0;
    sys.row_labels.push_back({RowLabel::Type::RayValue, r, true});
    ++row;
  }
  // Matching conditions, one row per vertex in vertex order.
  for (int v = 0; v < a.n_vertices; ++v) {
    if (g.vertex(v).kind == VertexKind::BoundaryD) {
      sys.m(row, a.alpha_col(v)) = 1.0;
      sys.row_labels.push_back({RowLabel::Type::Dirichlet, v, true});
    } else {
      for (const auto& inc : g.incidences(v)) {
        if (inc.ref.is_ray) {
          sys.m(row, a.gamma_col(inc.ref.index)) +=
              a.rays[static_cast<std::size_t>(inc.ref.index)].d_deriv;
        } else {
          const auto [dc, ds] = a.inward_basis_deriv(inc.ref.index, inc.at_initial);
          sys.m(row, a.beta_col(inc.ref.index, 0)) += dc;
          sys.m(row, a.beta_col(inc.ref.index, 1)) += ds;
        }
      }
      sys.row_labels.push_back({RowLabel::Type::Kirchhoff, v, true});
    }
    ++row;
  }
  return a;
}

Complex determinant(const CharacteristicMatrix& system) {
  if (system.m.rows() == 0) return Complex(1.0);
  return Eigen::PartialPivLU<Eigen::MatrixXcd>(system.m).determinant();
}

Complex delta(const MetricGraph& g, const SpectralPoint& sp) {
  return determinant(assemble_system(g, sp).system);
}

namespace {

struct ModifiedSolve {
  Eigen::VectorXcd x;
  bool pole;
};

// Solve the system with vertex v's matching row replaced by alpha_v = 1.
ModifiedSolve solve_weyl_system(const Assembly& a, int v) {
  Eigen::MatrixXcd m = a.system.m;
  const int row = a.vertex_row(v);
  m.row(row).setZero();
  m(row, a.alpha_col(v)) = 1.0;
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(m.rows());
  rhs(row) = 1.0;

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
  ModifiedSolve out;
  out.x = lu.solve(rhs);
  // Pole detection: the modified determinant vanishes relative to row scales.
  double scale = 1.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) scale *= std::max(m.row(i).norm(), 1e-300);
  const double rel = std::abs(lu.determinant()) / scale;
  const double residual = (m * out.x - rhs).norm();
  out.pole = rel < 1e-13 || !out.x.allFinite() || residual > 1e-6 * (1.0 + out.x.norm());
  return out;
}

}  // namespace

WeylSolution weyl_solution(const MetricGraph& g, int v, const SpectralPoint& sp) {
  if (v < 0 || v >= g.vertex_count()) throw PreconditionError("weyl_solution: no such vertex");
  auto assembly = std::make_shared<Assembly>(assemble_system(g, sp));
  auto solve = solve_weyl_system(*assembly, v);
  WeylSolution w;
  w.assembly_ = std::move(assembly);
  w.graph_ = std::make_shared<MetricGraph>(g);
  w.coeffs_ = std::move(solve.x);
  w.vertex_ = v;
  w.pole_ = solve.pole;
  return w;
}

Complex WeylSolution::at_vertex(int v) const { return coeffs_(assembly_->alpha_col(v)); }

WaveState WeylSolution::on_edge(int e, double s) const {
  const auto& el = assembly_->edges[static_cast<std::size_t>(e)];
  const WaveState c = el.c.at(s);
  const WaveState sv = el.s.at(s);
  const Complex b1 = coeffs_(assembly_->beta_col(e, 0));
  const Complex b2 = coeffs_(assembly_->beta_col(e, 1));
  return {b1 * c.y + b2 * sv.y, b1 * c.dy + b2 * sv.dy};
}

WaveState WeylSolution::on_ray(int r, double s) const {
  const WaveState e = assembly_->rays[static_cast<std::size_t>(r)].wave.at(s);
  const Complex gm = coeffs_(assembly_->gamma_col(r));
  return {gm * e.y, gm * e.dy};
}

Complex WeylSolution::weyl_derivative_sum() const {
  const auto& g = *graph_;
  Complex sum = 0.0;
  for (const auto& inc : g.incidences(vertex_)) {
    if (inc.ref.is_ray) {
      sum += coeffs_(assembly_->gamma_col(inc.ref.index)) *
             assembly_->rays[static_cast<std::size_t>(inc.ref.index)].d_deriv;
    } else {
      const auto [dc, ds] = assembly_->inward_basis_deriv(inc.ref.index, inc.at_initial);
      sum += coeffs_(assembly_->beta_col(inc.ref.index, 0)) * dc +
             coeffs_(assembly_->beta_col(inc.ref.index, 1)) * ds;
    }
  }
  return sum;
}

WeylValue weyl_function(const MetricGraph& g, int v, const SpectralPoint& sp) {
  if (g.vertex(v).kind == VertexKind::BoundaryD) {
    throw PreconditionError("weyl_function: vertex must be internal or K-type");
  }
  const WeylSolution phi = weyl_solution(g, v, sp);
  WeylValue out;
  out.value = phi.weyl_derivative_sum();
  out.pole = phi.pole();

  const Complex num = delta(g, sp);
  const Complex den = delta(split_vertex(g, v).graph, sp);
  out.ratio = num / den;
  if (std::abs(den) < 1e-300) out.pole = true;
  out.cross_check_rel = std::abs(out.value - out.ratio) / (1.0 + std::abs(out.value));
  return out;
}

WeylEdgeCoefficients weyl_edge_coefficients(const MetricGraph& g, int edge,
                                            const SpectralPoint& sp) {
  const auto& ed = g.edge(edge);
  int v = -1, u = -1;
  if (g.vertex(ed.initial).kind == VertexKind::BoundaryD) {
    v = ed.initial;
    u = ed.terminal;
  } else if (g.vertex(ed.terminal).kind == VertexKind::BoundaryD) {
    v = ed.terminal;
    u = ed.initial;
  } else {
    throw PreconditionError("weyl_edge_coefficients: edge needs a D-type boundary end");
  }
  // d_r(lambda) = S_{r,v}(u, lambda): sine solution anchored at the boundary
  // end, evaluated at the inner end.
  const Wave s_rv =
      local_basis_at(ed, v == ed.terminal ? EdgeEnd::Terminal : EdgeEnd::Initial, sp);
  const Complex d_r = s_rv.at(v == ed.terminal ? 0.0 : ed.length).y;
  const Complex num = delta(cut_dirichlet_at(g, {{false, edge}}, u), sp);
  const Complex den = delta(g, sp);
  WeylEdgeCoefficients out;
  out.delta = 1.0 / d_r;
  out.gamma = -(num / den) / d_r;
  (void)u;
  return out;
}

}  // namespace qgraph
