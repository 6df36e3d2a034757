#include "qgraph/potential.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "qgraph/errors.hpp"

namespace qgraph {
namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Potential Potential::constant(double v) {
  Potential p;
  p.kind_ = Kind::Const;
  p.values_ = {v};
  return p;
}

Potential Potential::piecewise_const(std::vector<double> breaks, std::vector<double> values) {
  if (breaks.empty() || breaks.size() != values.size()) {
    throw InputError("piecewise potential needs matching breakpoint/value lists");
  }
  if (breaks.front() != 0.0) {
    throw InputError("piecewise potential must start at breakpoint 0");
  }
  for (std::size_t i = 1; i < breaks.size(); ++i) {
    if (!(breaks[i] > breaks[i - 1])) {
      throw InputError("piecewise potential breakpoints must be strictly increasing");
    }
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw InputError("piecewise potential value not finite");
  }
  Potential p;
  p.kind_ = Kind::PiecewiseConst;
  p.breaks_ = std::move(breaks);
  p.values_ = std::move(values);
  return p;
}

Potential Potential::samples(double step, std::vector<double> values) {
  if (!(step > 0.0)) throw InputError("grid potential step must be positive");
  if (values.empty()) throw InputError("grid potential needs at least one sample");
  for (double v : values) {
    if (!std::isfinite(v)) throw InputError("grid potential value not finite");
  }
  Potential p;
  p.kind_ = Kind::Samples;
  p.step_ = step;
  p.values_ = std::move(values);
  return p;
}

bool Potential::identically_zero() const {
  switch (kind_) {
    case Kind::Zero:
      return true;
    case Kind::Const:
    case Kind::PiecewiseConst:
    case Kind::Samples:
      return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
  }
  return true;
}

double Potential::value(double s) const {
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::Const:
      return values_[0];
    case Kind::PiecewiseConst: {
      auto it = std::upper_bound(breaks_.begin(), breaks_.end(), s);
      if (it == breaks_.begin()) return values_.front();
      return values_[static_cast<std::size_t>(it - breaks_.begin()) - 1];
    }
    case Kind::Samples: {
      if (s <= 0.0) return values_.front();
      const double t = s / step_;
      const auto i = static_cast<std::size_t>(t);
      if (i + 1 >= values_.size()) return values_.back();
      const double frac = t - static_cast<double>(i);
      return values_[i] * (1.0 - frac) + values_[i + 1] * frac;
    }
  }
  return 0.0;
}

std::vector<PotentialPiece> Potential::constant_pieces(double domain_len) const {
  std::vector<PotentialPiece> pieces;
  switch (kind_) {
    case Kind::Zero:
      pieces.push_back({0.0, domain_len, 0.0});
      break;
    case Kind::Const:
      pieces.push_back({0.0, domain_len, values_[0]});
      break;
    case Kind::PiecewiseConst:
      for (std::size_t i = 0; i < breaks_.size(); ++i) {
        const double b = breaks_[i];
        if (b >= domain_len) break;
        const double e = (i + 1 < breaks_.size()) ? std::min(breaks_[i + 1], domain_len) : domain_len;
        pieces.push_back({b, e, values_[i]});
      }
      break;
    case Kind::Samples:
      throw PreconditionError("sampled potential has no exact constant pieces");
  }
  return pieces;
}

double Potential::max_abs(double domain_len) const {
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::Const:
      return std::abs(values_[0]);
    case Kind::PiecewiseConst: {
      double m = 0.0;
      for (std::size_t i = 0; i < breaks_.size(); ++i) {
        if (breaks_[i] >= domain_len) break;
        m = std::max(m, std::abs(values_[i]));
      }
      return m;
    }
    case Kind::Samples: {
      double m = 0.0;
      const auto n = static_cast<std::size_t>(domain_len / step_) + 2;
      for (std::size_t i = 0; i < values_.size() && i <= n; ++i) m = std::max(m, std::abs(values_[i]));
      return m;
    }
  }
  return 0.0;
}

bool Potential::zero_beyond(double radius) const {
  switch (kind_) {
    case Kind::Zero:
      return true;
    case Kind::Const:
      return values_[0] == 0.0;
    case Kind::PiecewiseConst:
      for (std::size_t i = 0; i < breaks_.size(); ++i) {
        const double piece_end =
            (i + 1 < breaks_.size()) ? breaks_[i + 1] : std::numeric_limits<double>::infinity();
        if (piece_end > radius + 1e-12 && values_[i] != 0.0) return false;
      }
      return true;
    case Kind::Samples: {
      // The linear interpolant must vanish beyond the radius: every sample at
      // or past it must be zero, and so must the last sample before it unless
      // the interpolant already reaches zero exactly at the radius.
      for (std::size_t i = 0; i < values_.size(); ++i) {
        const double x = static_cast<double>(i) * step_;
        if (x >= radius - 1e-12) {
          if (values_[i] != 0.0) return false;
        } else if (x + step_ > radius + 1e-12 && values_[i] != 0.0) {
          return false;
        }
      }
      return true;
    }
  }
  return true;
}

bool Potential::covers(double domain_len) const {
  if (kind_ != Kind::Samples) return true;
  return step_ * static_cast<double>(values_.size() - 1) >= domain_len - 1e-9;
}

std::string Potential::format_spec() const {
  switch (kind_) {
    case Kind::Zero:
      return "zero";
    case Kind::Const:
      return "const " + format_double(values_[0]);
    case Kind::PiecewiseConst: {
      std::string s = "pw";
      for (std::size_t i = 0; i < breaks_.size(); ++i) {
        s += " " + format_double(breaks_[i]) + " " + format_double(values_[i]);
      }
      return s;
    }
    case Kind::Samples: {
      std::string s = "grid " + format_double(step_);
      for (double v : values_) s += " " + format_double(v);
      return s;
    }
  }
  return "zero";
}

}  // namespace qgraph
