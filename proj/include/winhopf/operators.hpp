#pragma once

#include <cmath>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "winhopf/discrete_operator.hpp"
#include "winhopf/kernel.hpp"
#include "winhopf/symbol.hpp"

namespace winhopf {

inline std::string describe(const Symbol& g) {
  std::ostringstream os;
  os.precision(6);
  if (g.delta() != 0.0) os << "e^{" << g.delta() << "it}";
  const Rational& r = g.rat();
  if (r.is_constant()) {
    if (g.delta() == 0.0 || r.gain() != Complex(1.0)) os << (g.delta() != 0.0 ? "*" : "") << r.gain();
    return os.str();
  }
  if (g.delta() != 0.0) os << "*";
  os << "rat[" << r.gain() << "; z=";
  for (const Complex& z : r.zeros()) os << z;
  os << "; p=";
  for (const Complex& p : r.poles()) os << p;
  os << "]";
  return os.str();
}

/// Fourier coefficients of the circle transplant theta -> r(i(1+e^{i theta})/(1-e^{i theta}))
/// for m in [-count, count], computed by FFT on `samples` equispaced points.
/// Index m is stored at position m + count.
struct TransplantCoefficients {
  std::vector<Complex> values;
  int count = 0;
  /// Largest coefficient magnitude outside the range used by the operators,
  /// an estimate of the truncation and aliasing error.
  double tail = 0.0;

  Complex operator[](int m) const {
    return std::abs(m) > count ? Complex(0.0) : values[std::size_t(m + count)];
  }
};

inline TransplantCoefficients transplant_coefficients(const Rational& r, int count, int samples) {
  std::vector<Complex> on_circle(static_cast<std::size_t>(samples));
  const Complex r_inf = r.at_infinity();
  for (int k = 0; k < samples; ++k) {
    if (k == 0) {
      on_circle[0] = r_inf;
      continue;
    }
    const double theta = 2.0 * pi * k / samples;
    on_circle[std::size_t(k)] = r(Complex(-1.0 / std::tan(0.5 * theta)));
  }
  Eigen::FFT<double> fft;
  std::vector<Complex> spectrum;
  fft.fwd(spectrum, on_circle);
  TransplantCoefficients c;
  c.count = count;
  c.values.resize(std::size_t(2 * count + 1));
  for (int m = -count; m <= count; ++m)
    c.values[std::size_t(m + count)] = spectrum[std::size_t((m + samples) % samples)] / double(samples);
  for (int m = count + 1; m <= samples / 2; ++m)
    c.tail = std::max({c.tail, std::abs(spectrum[std::size_t(m)]) / samples,
                       std::abs(spectrum[std::size_t(samples - m)]) / samples});
  return c;
}

namespace detail {

inline void require_rational_for_laguerre(const Symbol& g) {
  if (g.delta() != 0.0)
    throw Error(ErrorCode::backend_unsupported,
                "the Laguerre backend handles rational symbols only (delta = " + std::to_string(g.delta()) + ")");
}

inline DiscreteOperator grid_shift(const Grid& grid, double nu) {
  const int steps = grid.shift_steps(nu);
  if (steps == 0) return DiscreteOperator::identity(Backend::grid, grid.size());
  std::ostringstream os;
  os << "U[" << nu << "]";
  return {Backend::grid, std::make_shared<PanelShiftMap>(grid.panels(), steps), os.str()};
}

inline DiscreteOperator grid_flip(const Grid& grid, double delta) {
  const int steps = grid.shift_steps(delta);
  if (steps <= 0) return DiscreteOperator::zero(Backend::grid, grid.size());
  std::ostringstream os;
  os << "H[e^{" << delta << "it}]";
  return {Backend::grid, std::make_shared<PanelFlipMap>(grid.panels(), steps), os.str()};
}

/// W(r) for the rational part only.
inline DiscreteOperator grid_convolution(const Grid& grid, const Rational& r, const std::string& recipe) {
  const Complex r_inf = r.at_infinity();
  if (r.is_constant()) {
    if (r_inf == Complex(0.0)) return DiscreteOperator::zero(Backend::grid, grid.size());
    if (r_inf == Complex(1.0)) return DiscreteOperator::identity(Backend::grid, grid.size());
  }
  return {Backend::grid, std::make_shared<GridConvolutionMap>(grid, kernel_of_regular_part(r), r_inf), recipe};
}

inline DiscreteOperator grid_hankel(const Grid& grid, const Rational& r, const std::string& recipe) {
  const ExpPolyKernel k = kernel_of_regular_part(r);
  if (k.causal.empty()) return DiscreteOperator::zero(Backend::grid, grid.size());
  return {Backend::grid, std::make_shared<GridHankelMap>(grid, k), recipe};
}

inline CMatrix laguerre_toeplitz(const Rational& r, int n) {
  const TransplantCoefficients c = transplant_coefficients(r, 2 * n, 8 * n);
  CMatrix m(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) m(j, k) = c[j - k];
  return m;
}

inline CMatrix laguerre_hankel(const Rational& r, int n) {
  const TransplantCoefficients c = transplant_coefficients(r, 2 * n, 8 * n);
  CMatrix m(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) m(j, k) = -c[j + k + 1];
  return m;
}

}  // namespace detail

/// Wiener-Hopf operator W(g) = P F^-1 g F restricted to the half-line.
inline DiscreteOperator build_W(const Symbol& g, const Discretization& disc) {
  const std::string recipe = "W[" + describe(g) + "]";
  if (const Grid* grid = std::get_if<Grid>(&disc)) {
    const DiscreteOperator conv = detail::grid_convolution(*grid, g.rat(), recipe);
    if (g.delta() == 0.0) return conv;
    const DiscreteOperator shift = detail::grid_shift(*grid, g.delta());
    // W(e^{i delta t} r) = W(r) U_delta for delta > 0 and U_delta W(r) for delta < 0.
    return (g.delta() > 0 ? compose(conv, shift) : compose(shift, conv)).with_recipe(recipe);
  }
  detail::require_rational_for_laguerre(g);
  const int n = std::get<LaguerreBasis>(disc).size();
  if (g.rat().is_constant()) {
    if (g.rat().gain() == Complex(1.0)) return DiscreteOperator::identity(Backend::laguerre, n);
    return DiscreteOperator::dense(Backend::laguerre, g.rat().gain() * CMatrix::Identity(n, n), recipe);
  }
  return DiscreteOperator::dense(Backend::laguerre, detail::laguerre_toeplitz(g.rat(), n), recipe);
}

/// Hankel operator H(g) = P W0(g) Q J with kernel k(t + s).
inline DiscreteOperator build_H(const Symbol& g, const Discretization& disc) {
  const std::string recipe = "H[" + describe(g) + "]";
  if (const Grid* grid = std::get_if<Grid>(&disc)) {
    const DiscreteOperator hr = detail::grid_hankel(*grid, g.rat(), recipe);
    if (g.delta() == 0.0) return hr;
    // H(e^{i delta t} r) = W(e^{i delta t}) H(r) + H(e^{i delta t}) W(r~).
    const DiscreteOperator shifted = compose(detail::grid_shift(*grid, g.delta()), hr);
    if (g.delta() < 0) return shifted.with_recipe(recipe);
    const DiscreteOperator flip = detail::grid_flip(*grid, g.delta());
    const DiscreteOperator tail = compose(flip, detail::grid_convolution(*grid, g.rat().reflected(), "W[r~]"));
    return add(shifted, tail).with_recipe(recipe);
  }
  detail::require_rational_for_laguerre(g);
  const int n = std::get<LaguerreBasis>(disc).size();
  if (g.rat().is_constant()) return DiscreteOperator::zero(Backend::laguerre, n);
  return DiscreteOperator::dense(Backend::laguerre, detail::laguerre_hankel(g.rat(), n), recipe);
}

/// Shift (U_nu f)(t) = f(t - nu), zero for t < nu.
inline DiscreteOperator op_U(double nu, const Discretization& disc) {
  if (const Grid* grid = std::get_if<Grid>(&disc)) return detail::grid_shift(*grid, nu);
  const LaguerreBasis& basis = std::get<LaguerreBasis>(disc);
  const int n = basis.size();
  if (nu == 0.0) return DiscreteOperator::identity(Backend::laguerre, n);
  RVector x, w;
  basis.quadrature(x, w);
  const RVector shifted = x.array() + std::abs(nu);
  const Eigen::MatrixXd near = basis.evaluate(x);
  const Eigen::MatrixXd far = basis.evaluate(shifted);
  // entries <U_nu psi_j, psi_k> = int_0^inf psi_j(x) psi_k(x + nu) dx for nu > 0
  Eigen::MatrixXd m = far.transpose() * w.asDiagonal() * near;
  if (nu < 0) m.transposeInPlace();
  std::ostringstream os;
  os << "U[" << nu << "]";
  return DiscreteOperator::dense(Backend::laguerre, m.cast<Complex>(), os.str());
}

/// V^(m) = W(zeta^m). For m >= 0 the m-fold power of
/// (V f)(t) = f(t) - 2 int_0^t e^{s-t} f(s) ds; for m < 0 powers of
/// (V^(-1) f)(t) = f(t) - 2 int_t^inf e^{t-s} f(s) ds.
inline DiscreteOperator op_V(int m, const Discretization& disc) {
  if (m == 0) return DiscreteOperator::identity(disc);
  const std::string recipe = "V[" + std::to_string(m) + "]";
  DiscreteOperator single = DiscreteOperator::identity(disc);
  if (const Grid* grid = std::get_if<Grid>(&disc)) {
    ExpPolyKernel k;
    (m > 0 ? k.causal : k.anticausal).push_back({-2.0, 0, 1.0});
    single = {Backend::grid, std::make_shared<detail::GridConvolutionMap>(*grid, k, 1.0),
              m > 0 ? "V" : "V^(-1)"};
  } else {
    const int n = std::get<LaguerreBasis>(disc).size();
    CMatrix s = CMatrix::Zero(n, n);
    for (int j = 0; j + 1 < n; ++j) {
      if (m > 0) s(j + 1, j) = 1.0;
      else s(j, j + 1) = 1.0;
    }
    single = DiscreteOperator::dense(Backend::laguerre, s, m > 0 ? "V" : "V^(-1)");
  }
  DiscreteOperator acc = single;
  for (int k = 1; k < std::abs(m); ++k) acc = compose(acc, single);
  return acc.with_recipe(recipe);
}

/// P_m = I - V^(m) V^(-m), the projection onto span{psi_0, ..., psi_{m-1}}.
inline DiscreteOperator op_P(int m, const Discretization& disc) {
  if (m <= 0) return DiscreteOperator::zero(disc);
  return subtract(DiscreteOperator::identity(disc), compose(op_V(m, disc), op_V(-m, disc)))
      .with_recipe("P[" + std::to_string(m) + "]");
}

/// Realizes J Q W0(g) P through the identity J Q W0(g) P = H(g~).
inline DiscreteOperator op_flipped_hankel(const Symbol& g, const Discretization& disc) {
  return build_H(reflect(g), disc).with_recipe("JQW0P[" + describe(g) + "]");
}

}  // namespace winhopf
