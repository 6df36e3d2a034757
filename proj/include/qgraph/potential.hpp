#pragma once

#include <string>
#include <vector>

namespace qgraph {

struct PotentialPiece {
  double begin;
  double end;
  double value;
};

// Real potential on one edge, parameterized by arc length from the edge's
// initial end. Two families: piecewise-constant (zero / const / pw) which
// propagates exactly, and uniform samples (grid) which integrate adaptively
// with linear interpolation between samples.
class Potential {
 public:
  enum class Kind { Zero, Const, PiecewiseConst, Samples };

  Potential() : kind_(Kind::Zero) {}

  static Potential zero() { return Potential(); }
  static Potential constant(double v);
  // breaks[0] must be 0; value breaks[i] holds on [breaks[i], breaks[i+1]).
  static Potential piecewise_const(std::vector<double> breaks, std::vector<double> values);
  // values at s = 0, h, 2h, ...; linear interpolation in between.
  static Potential samples(double step, std::vector<double> values);

  Kind kind() const { return kind_; }
  bool piecewise_constant_representable() const { return kind_ != Kind::Samples; }
  bool identically_zero() const;

  double value(double s) const;

  // Constant pieces covering [0, domain_len]; only for PWC-representable kinds.
  std::vector<PotentialPiece> constant_pieces(double domain_len) const;

  double max_abs(double domain_len) const;

  // True when the structural description vanishes for all s > radius.
  bool zero_beyond(double radius) const;

  // Sample grid must reach at least this far for a domain of this length.
  bool covers(double domain_len) const;

  double sample_step() const { return step_; }
  const std::vector<double>& breakpoints() const { return breaks_; }
  const std::vector<double>& values() const { return values_; }

  // Round-trippable text form: "zero" | "const c" | "pw b v ..." | "grid h v ...".
  std::string format_spec() const;

  bool operator==(const Potential& other) const = default;

 private:
  Kind kind_;
  std::vector<double> breaks_;
  std::vector<double> values_;
  double step_ = 0.0;
};

}  // namespace qgraph
