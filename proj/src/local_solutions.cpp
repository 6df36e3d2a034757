#include "qgraph/local_solutions.hpp"

#include <algorithm>
#include <cmath>

#include "qgraph/errors.hpp"

namespace qgraph {
namespace {

struct Mat2 {
  Complex a, b, c, d;
};

constexpr Mat2 kIdentity{1.0, 0.0, 0.0, 1.0};

Mat2 mul(const Mat2& x, const Mat2& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c,
          x.c * y.b + x.d * y.d};
}

WaveState apply(const Mat2& m, const WaveState& s) {
  return {m.a * s.y + m.b * s.dy, m.c * s.y + m.d * s.dy};
}

// All transfer matrices here have determinant one.
Mat2 inverse_det1(const Mat2& m) { return {m.d, -m.b, -m.c, m.a}; }

// Transfer over a constant-q piece of length h: rows (value, derivative).
Mat2 piece_transfer(Complex lambda, double q, double h) {
  const Complex w = (lambda - q) * h * h;
  const Complex c = cos_sqrt(w);
  const Complex s = h * sinc_sqrt(w);
  return {c, s, (q - lambda) * s, c};
}

class PwcPropagator final : public EdgePropagator {
 public:
  PwcPropagator(const Potential& q, Complex lambda, double domain) : lambda_(lambda) {
    pieces_ = q.constant_pieces(domain);
    prefix_.reserve(pieces_.size());
    Mat2 m = kIdentity;
    for (const auto& p : pieces_) {
      prefix_.push_back(m);
      m = mul(piece_transfer(lambda_, p.value, p.end - p.begin), m);
    }
    domain_ = domain;
  }

  WaveState advance(const WaveState& from, double s_from, double s_to) const override {
    if (s_from == s_to) return from;
    const Mat2 m = mul(mat_at(s_to), inverse_det1(mat_at(s_from)));
    return apply(m, from);
  }

 private:
  Mat2 mat_at(double s) const {
    s = std::clamp(s, 0.0, domain_);
    // Last piece whose begin <= s.
    std::size_t i = pieces_.size();
    while (i > 0 && pieces_[i - 1].begin > s) --i;
    if (i == 0) return kIdentity;
    --i;
    const auto& p = pieces_[i];
    return mul(piece_transfer(lambda_, p.value, std::min(s, p.end) - p.begin), prefix_[i]);
  }

  Complex lambda_;
  double domain_ = 0.0;
  std::vector<PotentialPiece> pieces_;
  std::vector<Mat2> prefix_;
};

class Rk45Propagator final : public EdgePropagator {
 public:
  Rk45Propagator(Potential q, Complex lambda) : q_(std::move(q)), lambda_(lambda) {}

  WaveState advance(const WaveState& from, double s_from, double s_to) const override {
    if (s_from == s_to) return from;
    constexpr double rtol = 1e-10;
    constexpr double atol = 1e-12;
    const double dir = (s_to > s_from) ? 1.0 : -1.0;
    double s = s_from;
    double h = dir * std::max(1e-4, std::abs(s_to - s_from) / 64.0);
    WaveState y = from;
    auto f = [this](double x, const WaveState& st) -> WaveState {
      return {st.dy, (q_.value(x) - lambda_) * st.y};
    };
    int guard = 0;
    while (dir * (s_to - s) > 0.0) {
      if (++guard > 2000000) throw NumericalError("RK45: iteration guard tripped");
      if (dir * (s + h - s_to) > 0.0) h = s_to - s;
      if (std::abs(h) < 1e-14 * (1.0 + std::abs(s))) {
        throw NumericalError("RK45: step underflow at s = " + std::to_string(s));
      }
      const WaveState k1 = f(s, y);
      auto at = [&](double frac, std::initializer_list<std::pair<double, const WaveState*>> terms) {
        WaveState st = y;
        for (const auto& [c, k] : terms) {
          st.y += h * c * k->y;
          st.dy += h * c * k->dy;
        }
        return f(s + frac * h, st);
      };
      const WaveState k2 = at(1.0 / 5, {{1.0 / 5, &k1}});
      const WaveState k3 = at(3.0 / 10, {{3.0 / 40, &k1}, {9.0 / 40, &k2}});
      const WaveState k4 = at(4.0 / 5, {{44.0 / 45, &k1}, {-56.0 / 15, &k2}, {32.0 / 9, &k3}});
      const WaveState k5 = at(8.0 / 9, {{19372.0 / 6561, &k1},
                                        {-25360.0 / 2187, &k2},
                                        {64448.0 / 6561, &k3},
                                        {-212.0 / 729, &k4}});
      const WaveState k6 = at(1.0, {{9017.0 / 3168, &k1},
                                    {-355.0 / 33, &k2},
                                    {46732.0 / 5247, &k3},
                                    {49.0 / 176, &k4},
                                    {-5103.0 / 18656, &k5}});
      WaveState y5{y.y + h * (35.0 / 384 * k1.y + 500.0 / 1113 * k3.y + 125.0 / 192 * k4.y -
                              2187.0 / 6784 * k5.y + 11.0 / 84 * k6.y),
                   y.dy + h * (35.0 / 384 * k1.dy + 500.0 / 1113 * k3.dy + 125.0 / 192 * k4.dy -
                               2187.0 / 6784 * k5.dy + 11.0 / 84 * k6.dy)};
      const WaveState k7 = f(s + h, y5);
      WaveState y4{y.y + h * (5179.0 / 57600 * k1.y + 7571.0 / 16695 * k3.y + 393.0 / 640 * k4.y -
                              92097.0 / 339200 * k5.y + 187.0 / 2100 * k6.y + 1.0 / 40 * k7.y),
                   y.dy +
                       h * (5179.0 / 57600 * k1.dy + 7571.0 / 16695 * k3.dy + 393.0 / 640 * k4.dy -
                            92097.0 / 339200 * k5.dy + 187.0 / 2100 * k6.dy + 1.0 / 40 * k7.dy)};
      const double sc_y = atol + rtol * std::max(std::abs(y.y), std::abs(y5.y));
      const double sc_dy = atol + rtol * std::max(std::abs(y.dy), std::abs(y5.dy));
      const double err =
          std::max(std::abs(y5.y - y4.y) / sc_y, std::abs(y5.dy - y4.dy) / sc_dy);
      if (err <= 1.0) {
        s += h;
        y = y5;
      }
      const double factor =
          (err <= 1e-30) ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      h *= factor;
    }
    return y;
  }

 private:
  Potential q_;
  Complex lambda_;
};

}  // namespace

std::shared_ptr<const EdgePropagator> make_propagator(const Potential& q, Complex lambda,
                                                      double domain_len) {
  if (q.piecewise_constant_representable()) {
    return std::make_shared<PwcPropagator>(q, lambda, domain_len);
  }
  return std::make_shared<Rk45Propagator>(q, lambda);
}

Wave Wave::with_tail(std::shared_ptr<const EdgePropagator> prop, double support, Complex rho,
                     Complex out_coeff, Complex in_coeff) {
  Wave w;
  w.prop_ = std::move(prop);
  w.domain_ = support;
  w.has_tail_ = true;
  w.rho_ = rho;
  w.tail_out_ = out_coeff;
  w.tail_in_ = in_coeff;
  WaveState at_support;
  if (rho == Complex(0.0, 0.0)) {
    at_support = {out_coeff, in_coeff};  // value and slope
  } else {
    at_support = {out_coeff + in_coeff, Complex(0.0, 1.0) * rho * (out_coeff - in_coeff)};
  }
  w.y0_ = w.prop_->advance(at_support, support, 0.0);
  return w;
}

WaveState Wave::at(double s) const {
  if (!has_tail_ || s <= domain_) {
    return prop_ ? prop_->advance(y0_, 0.0, std::min(s, domain_)) : y0_;
  }
  const double t = s - domain_;
  if (rho_ == Complex(0.0, 0.0)) {
    return {tail_out_ + tail_in_ * t, tail_in_};
  }
  const Complex i_rho = Complex(0.0, 1.0) * rho_;
  const Complex ep = std::exp(i_rho * t);
  const Complex em = 1.0 / ep;
  return {tail_out_ * ep + tail_in_ * em, i_rho * (tail_out_ * ep - tail_in_ * em)};
}

Wave Wave::scaled(Complex factor) const {
  Wave w = *this;
  w.y0_.y *= factor;
  w.y0_.dy *= factor;
  w.tail_out_ *= factor;
  w.tail_in_ *= factor;
  return w;
}

std::pair<Wave, Wave> local_basis(const CompactEdge& edge, const SpectralPoint& sp) {
  auto prop = make_propagator(edge.q, sp.lambda, edge.length);
  Wave c(prop, edge.length, {1.0, 0.0});
  Wave s(prop, edge.length, {0.0, 1.0});
  return {std::move(c), std::move(s)};
}

Wave local_basis_at(const CompactEdge& edge, EdgeEnd end, const SpectralPoint& sp) {
  auto prop = make_propagator(edge.q, sp.lambda, edge.length);
  if (end == EdgeEnd::Initial) return Wave(prop, edge.length, {0.0, 1.0});
  // Vanishes at the terminal end; inward derivative there is -d/ds.
  const WaveState at_zero = prop->advance({0.0, -1.0}, edge.length, 0.0);
  return Wave(std::move(prop), edge.length, at_zero);
}

JostSolution jost_at_rho(const Ray& ray, Complex rho) {
  const Complex lambda = rho * rho;
  auto prop = make_propagator(ray.q, lambda, ray.support);
  Complex out = 1.0, in = 0.0;
  if (rho == Complex(0.0, 0.0)) {
    out = 1.0;  // value at the support radius
    in = 0.0;   // slope
  } else {
    out = std::exp(Complex(0.0, 1.0) * rho * ray.support);
    in = 0.0;
  }
  Wave w = Wave::with_tail(std::move(prop), ray.support, rho, out, in);
  JostSolution j;
  j.d = w.at_zero().y;
  j.d_deriv = w.at_zero().dy;
  j.degenerate = (rho == Complex(0.0, 0.0));
  j.wave = std::move(w);
  return j;
}

JostSolution jost(const Ray& ray, const SpectralPoint& sp) { return jost_at_rho(ray, sp.rho); }

Wave ray_wave(const Ray& ray, const SpectralPoint& sp, WaveState at_base) {
  auto prop = make_propagator(ray.q, sp.lambda, ray.support);
  const WaveState at_r = prop->advance(at_base, 0.0, ray.support);
  if (sp.degenerate_rho()) {
    return Wave::with_tail(std::move(prop), ray.support, sp.rho, at_r.y, at_r.dy);
  }
  const Complex i_rho = Complex(0.0, 1.0) * sp.rho;
  const Complex out = 0.5 * (at_r.y + at_r.dy / i_rho);
  const Complex in = 0.5 * (at_r.y - at_r.dy / i_rho);
  return Wave::with_tail(std::move(prop), ray.support, sp.rho, out, in);
}

WeylM classical_weyl_m(const Ray& ray, const SpectralPoint& sp) {
  const JostSolution j = jost(ray, sp);
  WeylM m;
  m.pole = std::abs(j.d) < 1e-13 * (1.0 + std::abs(j.d_deriv));
  m.value = j.d_deriv / j.d;
  return m;
}

}  // namespace qgraph
