#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "winhopf/error.hpp"
#include "winhopf/poly.hpp"
#include "winhopf/types.hpp"

namespace winhopf {

/// Rational function gain * prod(x - z) / prod(x - p), kept in reduced form.
///
/// The zero/pole/gain form is the storage format because reflection,
/// conjugation, products and inverses are then exact operations on root lists;
/// coefficient polynomials are available on demand.
class Rational {
 public:
  Rational() : gain_(1.0) {}

  static Rational constant(Complex c) { return Rational(c, {}, {}, 0.0); }

  static Rational from_zpk(Complex gain, std::vector<Complex> zeros, std::vector<Complex> poles,
                           double merge_tol = default_tolerances().root_merge) {
    return Rational(gain, std::move(zeros), std::move(poles), merge_tol);
  }

  /// Builds from coefficient polynomials; roots found numerically.
  static Rational from_polys(const ComplexPoly& num, const ComplexPoly& den,
                             double merge_tol = default_tolerances().root_merge) {
    if (den.is_zero()) throw Error(ErrorCode::schema, "rational denominator is identically zero");
    if (num.is_zero()) return constant(0.0);
    return Rational(num.leading() / den.leading(), num.root_list(), den.root_list(), merge_tol);
  }

  Complex gain() const { return gain_; }
  const std::vector<Complex>& zeros() const { return zeros_; }
  const std::vector<Complex>& poles() const { return poles_; }

  bool is_zero() const { return gain_ == Complex(0.0); }
  bool is_constant() const { return zeros_.empty() && poles_.empty(); }
  int num_degree() const { return static_cast<int>(zeros_.size()); }
  int den_degree() const { return static_cast<int>(poles_.size()); }
  bool is_proper() const { return is_zero() || num_degree() <= den_degree(); }
  bool is_strictly_proper() const { return is_zero() || num_degree() < den_degree(); }

  ComplexPoly numerator() const { return ComplexPoly::from_roots(zeros_, gain_); }
  ComplexPoly denominator() const { return ComplexPoly::from_roots(poles_, 1.0); }

  /// Limit as |x| -> infinity along the real line; requires a proper function.
  Complex at_infinity() const {
    if (is_zero() || num_degree() < den_degree()) return 0.0;
    if (num_degree() == den_degree()) return gain_;
    throw Error(ErrorCode::precondition, "rational function is unbounded at infinity");
  }

  Complex operator()(Complex x) const {
    Complex v = gain_;
    for (const Complex& z : zeros_) v *= (x - z);
    for (const Complex& p : poles_) v /= (x - p);
    return v;
  }

  friend Rational operator*(const Rational& f, const Rational& g) {
    if (f.is_zero() || g.is_zero()) return constant(0.0);
    std::vector<Complex> zeros = f.zeros_;
    zeros.insert(zeros.end(), g.zeros_.begin(), g.zeros_.end());
    std::vector<Complex> poles = f.poles_;
    poles.insert(poles.end(), g.poles_.begin(), g.poles_.end());
    return Rational(f.gain_ * g.gain_, std::move(zeros), std::move(poles),
                    default_tolerances().root_merge);
  }

  Rational scaled(Complex c) const { return Rational(gain_ * c, zeros_, poles_, 0.0); }

  Rational inverse() const {
    if (is_zero()) throw Error(ErrorCode::not_invertible, "zero rational function has no inverse");
    return Rational(1.0 / gain_, poles_, zeros_, 0.0);
  }

  /// x -> f(-x): roots are negated and the gain picks up (-1)^(deg num - deg den).
  Rational reflected() const {
    std::vector<Complex> zeros, poles;
    for (const Complex& z : zeros_) zeros.push_back(-z);
    for (const Complex& p : poles_) poles.push_back(-p);
    const int parity = (num_degree() - den_degree()) % 2;
    return Rational(parity == 0 ? gain_ : -gain_, std::move(zeros), std::move(poles), 0.0);
  }

  /// x -> conj(f(conj(x))), which equals conj(f(x)) on the real line.
  Rational conjugated() const {
    std::vector<Complex> zeros, poles;
    for (const Complex& z : zeros_) zeros.push_back(std::conj(z));
    for (const Complex& p : poles_) poles.push_back(std::conj(p));
    return Rational(std::conj(gain_), std::move(zeros), std::move(poles), 0.0);
  }

  /// Smallest distance of any zero or pole from the real axis (infinity if none).
  double min_root_distance() const {
    double m = std::numeric_limits<double>::infinity();
    for (const Complex& z : zeros_) m = std::min(m, std::abs(z.imag()));
    for (const Complex& p : poles_) m = std::min(m, std::abs(p.imag()));
    return m;
  }

  /// Zeros minus poles in the open upper half-plane.
  int upper_half_plane_balance() const {
    int count = 0;
    for (const Complex& z : zeros_) count += z.imag() > 0 ? 1 : 0;
    for (const Complex& p : poles_) count -= p.imag() > 0 ? 1 : 0;
    return count;
  }

  friend bool operator==(const Rational& f, const Rational& g) {
    return f.gain_ == g.gain_ && f.zeros_ == g.zeros_ && f.poles_ == g.poles_;
  }

 private:
  Rational(Complex gain, std::vector<Complex> zeros, std::vector<Complex> poles, double merge_tol)
      : gain_(gain), zeros_(std::move(zeros)), poles_(std::move(poles)) {
    if (gain_ == Complex(0.0)) {
      zeros_.clear();
      poles_.clear();
      return;
    }
    if (merge_tol > 0.0) cancel_common_roots(merge_tol);
    sort_roots(zeros_);
    sort_roots(poles_);
  }

  void cancel_common_roots(double tol) {
    for (std::size_t i = 0; i < zeros_.size();) {
      const Complex z = zeros_[i];
      auto match = std::find_if(poles_.begin(), poles_.end(), [&](const Complex& p) {
        return std::abs(z - p) <= tol * std::max(1.0, std::abs(z));
      });
      if (match != poles_.end()) {
        poles_.erase(match);
        zeros_.erase(zeros_.begin() + static_cast<std::ptrdiff_t>(i));
      } else {
        ++i;
      }
    }
  }

  static void sort_roots(std::vector<Complex>& roots) {
    std::sort(roots.begin(), roots.end(), [](const Complex& x, const Complex& y) {
      if (x.real() != y.real()) return x.real() < y.real();
      return x.imag() < y.imag();
    });
  }

  Complex gain_;
  std::vector<Complex> zeros_;
  std::vector<Complex> poles_;
};

}  // namespace winhopf
