#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "winhopf/symbol.hpp"

namespace winhopf {

/// g = g_minus * exp(i nu t) * zeta^n * g_plus with g_plus analytic and
/// invertible in the upper half-plane (roots below the axis) and g_minus
/// analytic and invertible in the lower half-plane (roots above the axis).
struct Factorization {
  Symbol g_minus;
  double nu = 0.0;
  int n = 0;
  Symbol g_plus;
  std::optional<int> sigma;

  Complex operator()(double t) const {
    return g_minus(t) * std::exp(I_unit * (nu * t)) * Symbol::zeta(n)(t) * g_plus(t);
  }
};

/// Factors are built from the half-plane root partition; the surplus degree
/// (the winding number n) is balanced by (t - i)^-n in g_minus and (t + i)^n in
/// g_plus. Normalized so that g_minus(infinity) = 1.
inline Factorization wiener_hopf_factor(const Symbol& g) {
  require_invertible(g, ErrorCode::root_margin);
  const Rational& r = g.rat();
  std::vector<Complex> zu, zl, pu, pl;
  for (const Complex& z : r.zeros()) (z.imag() > 0 ? zu : zl).push_back(z);
  for (const Complex& p : r.poles()) (p.imag() > 0 ? pu : pl).push_back(p);
  const int n = static_cast<int>(zu.size()) - static_cast<int>(pu.size());
  for (int k = 0; k < std::abs(n); ++k) {
    if (n > 0) {
      pu.push_back(I_unit);
      zl.push_back(-I_unit);
    } else {
      zu.push_back(I_unit);
      pl.push_back(-I_unit);
    }
  }
  Factorization f;
  f.g_minus = Symbol(Rational::from_zpk(1.0, zu, pu));
  f.g_plus = Symbol(Rational::from_zpk(r.gain(), zl, pl));
  f.nu = g.delta();
  f.n = n;
  return f;
}

/// Factorization of a matching function normalized by g_minus(0) = 1, in which
/// case g_minus = sigma(g) / g_plus(-t).
inline Factorization matching_factor(const Symbol& g) {
  const int s = sigma(g);
  Factorization f = wiener_hopf_factor(g);
  const Complex at0 = f.g_minus(0.0);
  f.g_minus = scale(1.0 / at0, f.g_minus);
  f.g_plus = scale(at0, f.g_plus);
  f.sigma = s;
  for (double t : real_sample_points(200)) {
    const Complex expected = double(s) / f.g_plus(-t);
    if (std::abs(f.g_minus(t) - expected) > 1e-10 * std::abs(expected))
      throw Error(ErrorCode::not_matching, "normalized factors do not satisfy g_minus = sigma / g_plus~");
  }
  return f;
}

struct FactorizationReport {
  double max_relative_error = 0.0;
  /// Smallest distance below the axis among g_plus roots (negative if violated).
  double plus_margin = std::numeric_limits<double>::infinity();
  /// Smallest distance above the axis among g_minus roots (negative if violated).
  double minus_margin = std::numeric_limits<double>::infinity();
  bool plus_certified = true;
  bool minus_certified = true;

  bool ok(double tol = 1e-9) const {
    return plus_certified && minus_certified && max_relative_error <= tol;
  }
};

inline FactorizationReport verify_factorization(const Factorization& f, const Symbol& g,
                                                int samples = 1000) {
  FactorizationReport rep;
  for (double t : real_sample_points(samples)) {
    const Complex v = g(t);
    rep.max_relative_error = std::max(rep.max_relative_error, std::abs(f(t) - v) / std::abs(v));
  }
  const double mu = default_tolerances().root_margin;
  auto scan = [&](const Rational& r, double sign, double& margin, bool& certified) {
    for (const auto* roots : {&r.zeros(), &r.poles()})
      for (const Complex& z : *roots) {
        margin = std::min(margin, sign * z.imag());
        if (sign * z.imag() <= mu) certified = false;
      }
  };
  scan(f.g_plus.rat(), -1.0, rep.plus_margin, rep.plus_certified);
  scan(f.g_minus.rat(), 1.0, rep.minus_margin, rep.minus_certified);
  if (f.g_plus.delta() != 0.0 || f.g_minus.delta() != 0.0) rep.plus_certified = rep.minus_certified = false;
  return rep;
}

}  // namespace winhopf
