#pragma once

#include <cmath>
#include <vector>

#include "winhopf/rational.hpp"

namespace winhopf {

/// coeff * s^power * exp(-rate * s) for s > 0, Re(rate) > 0.
struct KernelTerm {
  Complex coeff;
  int power = 0;
  Complex rate;

  Complex operator()(double s) const {
    return coeff * std::pow(s, power) * std::exp(-rate * s);
  }
};

/// Inverse Fourier transform of a rational function, written as a sum of
/// exponential-polynomial terms. Causal terms act at x > 0 in the variable x;
/// anticausal terms act at x < 0 in the variable -x.
struct ExpPolyKernel {
  std::vector<KernelTerm> causal;
  std::vector<KernelTerm> anticausal;

  bool empty() const { return causal.empty() && anticausal.empty(); }

  Complex operator()(double x) const {
    Complex v(0.0);
    if (x > 0)
      for (const KernelTerm& k : causal) v += k(x);
    if (x < 0)
      for (const KernelTerm& k : anticausal) v += k(-x);
    return v;
  }
};

namespace detail {

struct PolePart {
  Complex pole;
  /// coefficients[l-1] multiplies (x - pole)^(-l).
  std::vector<Complex> coefficients;
};

/// Truncated Taylor product in the local variable u = x - pole.
inline std::vector<Complex> taylor_mul(const std::vector<Complex>& f, const std::vector<Complex>& g) {
  std::vector<Complex> h(f.size(), Complex(0.0));
  for (std::size_t i = 0; i < f.size(); ++i)
    for (std::size_t j = 0; i + j < f.size(); ++j) h[i + j] += f[i] * g[j];
  return h;
}

/// Principal parts of r at each distinct pole (partial fractions without the
/// polynomial part). Each coefficient is a Taylor coefficient of (x-p)^m r(x).
inline std::vector<PolePart> principal_parts(const Rational& r) {
  std::vector<PolePart> parts;
  if (r.is_zero()) return parts;
  const auto& poles = r.poles();
  std::vector<bool> used(poles.size(), false);
  for (std::size_t i = 0; i < poles.size(); ++i) {
    if (used[i]) continue;
    const Complex p = poles[i];
    auto same = [&](const Complex& q) { return std::abs(q - p) <= 1e-12 * std::max(1.0, std::abs(p)); };
    int m = 0;
    for (std::size_t j = i; j < poles.size(); ++j)
      if (!used[j] && same(poles[j])) {
        used[j] = true;
        ++m;
      }
    std::vector<Complex> series(std::size_t(m), Complex(0.0));
    series[0] = r.gain();
    for (const Complex& z : r.zeros()) {
      std::vector<Complex> factor(std::size_t(m), Complex(0.0));
      factor[0] = p - z;
      if (m > 1) factor[1] = 1.0;
      series = taylor_mul(series, factor);
    }
    for (const Complex& q : poles) {
      if (same(q)) continue;
      std::vector<Complex> factor(static_cast<std::size_t>(m));
      const Complex inv_gap = 1.0 / (p - q);
      Complex term = inv_gap;
      for (int k = 0; k < m; ++k) {
        factor[std::size_t(k)] = term;
        term *= -inv_gap;
      }
      series = taylor_mul(series, factor);
    }
    PolePart part{p, std::vector<Complex>(std::size_t(m))};
    for (int l = 1; l <= m; ++l) part.coefficients[std::size_t(l - 1)] = series[std::size_t(m - l)];
    parts.push_back(std::move(part));
  }
  return parts;
}

inline double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

}  // namespace detail

/// Kernel of r - r(infinity) for a proper r with no real poles. Residues at
/// lower half-plane poles give the causal part, upper half-plane poles the
/// anticausal part, with the Fourier convention F(k)(x) = int exp(i x s) k(s) ds.
inline ExpPolyKernel kernel_of_regular_part(const Rational& r) {
  ExpPolyKernel k;
  for (const detail::PolePart& part : detail::principal_parts(r)) {
    const Complex p = part.pole;
    if (std::abs(p.imag()) <= default_tolerances().root_margin)
      throw Error(ErrorCode::root_margin, "pole within the root margin of the real axis");
    for (std::size_t idx = 0; idx < part.coefficients.size(); ++idx) {
      const int l = int(idx) + 1;
      const Complex a = part.coefficients[idx];
      if (a == Complex(0.0)) continue;
      const double fact = detail::factorial(l - 1);
      if (p.imag() < 0)
        k.causal.push_back({a * std::pow(-I_unit, l) / fact, l - 1, I_unit * p});
      else
        k.anticausal.push_back({a * std::pow(I_unit, l) / fact, l - 1, -I_unit * p});
    }
  }
  return k;
}

/// Kernel k with F(k) = r for a strictly proper rational r.
inline ExpPolyKernel kernel_expansion(const Rational& r) {
  if (!r.is_strictly_proper())
    throw Error(ErrorCode::not_strictly_proper, "kernel expansion needs deg num < deg den");
  return kernel_of_regular_part(r);
}

}  // namespace winhopf
