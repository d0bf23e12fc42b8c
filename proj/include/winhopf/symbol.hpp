#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "winhopf/error.hpp"
#include "winhopf/rational.hpp"
#include "winhopf/types.hpp"

namespace winhopf {

/// Exponential-rational symbol g(t) = exp(i*delta*t) * r(t) with r proper and
/// free of poles near the real axis.
class Symbol {
 public:
  Symbol() = default;

  explicit Symbol(Rational rat, double delta = 0.0) : delta_(delta), rat_(std::move(rat)) {
    if (!rat_.is_proper())
      throw Error(ErrorCode::schema, "symbol must be bounded at infinity (deg num <= deg den)");
    for (const Complex& p : rat_.poles())
      if (std::abs(p.imag()) <= default_tolerances().root_margin)
        throw Error(ErrorCode::root_margin, "pole within the root margin of the real axis");
  }

  static Symbol constant(Complex c) { return Symbol(Rational::constant(c)); }
  static Symbol exponential(double delta) { return Symbol(Rational::constant(1.0), delta); }
  /// zeta(t)^power with zeta(t) = (t - i)/(t + i).
  static Symbol zeta(int power = 1) {
    std::vector<Complex> up(static_cast<std::size_t>(std::abs(power)), I_unit);
    std::vector<Complex> down(static_cast<std::size_t>(std::abs(power)), -I_unit);
    return power >= 0 ? Symbol(Rational::from_zpk(1.0, up, down))
                      : Symbol(Rational::from_zpk(1.0, down, up));
  }

  double delta() const { return delta_; }
  const Rational& rat() const { return rat_; }

  Complex operator()(double t) const { return std::exp(I_unit * (delta_ * t)) * rat_(Complex(t)); }

  /// Limit of the rational part at infinity.
  Complex rat_at_infinity() const { return rat_.at_infinity(); }

  bool is_rational() const { return delta_ == 0.0; }

  friend bool operator==(const Symbol& f, const Symbol& g) {
    return f.delta_ == g.delta_ && f.rat_ == g.rat_;
  }

 private:
  double delta_ = 0.0;
  Rational rat_;
};

inline Symbol reflect(const Symbol& g) { return Symbol(g.rat().reflected(), -g.delta()); }

inline Symbol mul(const Symbol& g, const Symbol& h) {
  return Symbol(g.rat() * h.rat(), g.delta() + h.delta());
}

inline Symbol operator*(const Symbol& g, const Symbol& h) { return mul(g, h); }

inline Symbol scale(Complex c, const Symbol& g) { return Symbol(g.rat().scaled(c), g.delta()); }

/// Throws unless g is invertible in the symbol class: balanced degrees, nonzero,
/// and zeros at least the root margin away from the real axis.
inline void require_invertible(const Symbol& g, ErrorCode margin_code = ErrorCode::not_invertible) {
  const Rational& r = g.rat();
  if (r.is_zero() || r.num_degree() != r.den_degree())
    throw Error(ErrorCode::not_invertible, "symbol vanishes at infinity or identically");
  for (const Complex& z : r.zeros())
    if (std::abs(z.imag()) <= default_tolerances().root_margin)
      throw Error(margin_code, "zero within the root margin of the real axis");
}

inline bool is_invertible(const Symbol& g) {
  try {
    require_invertible(g);
    return true;
  } catch (const Error&) {
    return false;
  }
}

inline Symbol inv(const Symbol& g) {
  require_invertible(g);
  return Symbol(g.rat().inverse(), -g.delta());
}

/// Pointwise complex conjugate on the real line.
inline Symbol conj(const Symbol& g) { return Symbol(g.rat().conjugated(), -g.delta()); }

/// Mean motion of the almost periodic part; equals delta in this class.
inline double ap_index(const Symbol& g) {
  require_invertible(g);
  return g.delta();
}

/// Winding number of the rational part along the real line, computed as the
/// number of zeros minus poles in the upper half-plane.
inline int winding_index(const Symbol& g) {
  require_invertible(g, ErrorCode::root_margin);
  return g.rat().upper_half_plane_balance();
}

/// Deterministic sample points spread over the whole real line.
inline std::vector<double> real_sample_points(int count) {
  std::vector<double> t(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) t[std::size_t(k)] = std::tan(pi * (k + 0.5) / count - pi / 2);
  return t;
}

/// Max relative deviation of g(t)g(-t) from 1 over the sample points.
inline double matching_defect(const Symbol& g, int samples = 200) {
  double worst = 0.0;
  for (double t : real_sample_points(samples)) worst = std::max(worst, std::abs(g(t) * g(-t) - 1.0));
  return worst;
}

/// (-1)^n(g) g(0) for a matching function g (g g~ = 1).
inline int sigma(const Symbol& g) {
  require_invertible(g);
  if (matching_defect(g) > 1e-10)
    throw Error(ErrorCode::not_matching, "sigma requires g(t) g(-t) = 1");
  const int n = winding_index(g);
  const Complex v = (n % 2 == 0 ? 1.0 : -1.0) * g(0.0);
  if (std::abs(v - 1.0) <= 1e-10) return 1;
  if (std::abs(v + 1.0) <= 1e-10) return -1;
  throw Error(ErrorCode::not_unimodular_at_0, "(-1)^n g(0) is not +-1");
}

}  // namespace winhopf
