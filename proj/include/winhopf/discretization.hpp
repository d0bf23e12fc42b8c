#pragma once

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "winhopf/error.hpp"
#include "winhopf/quadrature.hpp"
#include "winhopf/types.hpp"

namespace winhopf {

enum class Backend { grid, laguerre };

inline const char* backend_name(Backend b) { return b == Backend::grid ? "grid" : "laguerre"; }

/// Composite 8-point Gauss-Legendre panels of equal width on [0, T].
class Grid {
 public:
  static constexpr int order = 8;

  Grid(double T = 40.0, int N = 2560) : T_(T), N_(N) {
    if (!(T > 0) || N < 16 || N % order != 0)
      throw Error(ErrorCode::precondition, "grid needs T > 0 and N >= 16 divisible by 8");
    panels_ = N / order;
    h_ = T / panels_;
    rule_ = gauss_legendre(order);
    nodes_.resize(N);
    weights_.resize(N);
    for (int p = 0; p < panels_; ++p)
      for (int q = 0; q < order; ++q) {
        nodes_[p * order + q] = h_ * (p + 0.5 * (1.0 + rule_.nodes[std::size_t(q)]));
        weights_[p * order + q] = 0.5 * h_ * rule_.weights[std::size_t(q)];
      }
  }

  double T() const { return T_; }
  int size() const { return N_; }
  int panels() const { return panels_; }
  double panel_width() const { return h_; }
  const RVector& nodes() const { return nodes_; }
  const RVector& weights() const { return weights_; }
  /// Reference rule on [-1, 1].
  const GaussRule& rule() const { return rule_; }

  /// Number of whole panels corresponding to a shift by nu.
  int shift_steps(double nu) const {
    const double steps = nu / h_;
    const double rounded = std::round(steps);
    if (std::abs(steps - rounded) > 1e-9 * std::max(1.0, std::abs(steps)))
      throw Error(ErrorCode::shift_off_grid,
                  "shift " + std::to_string(nu) + " is not a multiple of the panel width " +
                      std::to_string(h_));
    return static_cast<int>(rounded);
  }

  /// L2 inner product approximated by the grid quadrature.
  Complex inner(const CVector& f, const CVector& g) const {
    return (f.conjugate().array() * weights_.array().cast<Complex>() * g.array()).sum();
  }

  double norm(const CVector& f) const {
    return std::sqrt((f.array().abs2() * weights_.array()).sum());
  }

  friend bool operator==(const Grid& x, const Grid& y) { return x.T_ == y.T_ && x.N_ == y.N_; }

 private:
  double T_;
  int N_;
  int panels_ = 0;
  double h_ = 0.0;
  GaussRule rule_;
  RVector nodes_;
  RVector weights_;
};

/// psi_j(t) = sqrt(2) exp(-t) L_j(2t), j < N, orthonormal in L2(0, infinity).
class LaguerreBasis {
 public:
  explicit LaguerreBasis(int modes = 200) : N_(modes) {
    if (modes < 1) throw Error(ErrorCode::precondition, "Laguerre basis needs at least one mode");
  }

  int size() const { return N_; }

  /// Matrix with rows indexed by the points t and columns by the modes.
  /// The three-term recurrence is run with a separate exponent so that large
  /// t neither overflows the polynomial nor underflows the weight.
  Eigen::MatrixXd evaluate(const RVector& t, int modes = -1) const {
    const int m = modes < 0 ? N_ : modes;
    Eigen::MatrixXd out(t.size(), m);
    constexpr double big = 1e100;
    for (Index i = 0; i < t.size(); ++i) {
      const double x = 2.0 * t[i];
      double log_scale = -t[i] + 0.5 * std::log(2.0);
      double prev = 0.0, cur = 1.0;
      for (int j = 0; j < m; ++j) {
        out(i, j) = log_scale < -745.0 ? 0.0 : cur * std::exp(log_scale);
        const double next = ((2.0 * j + 1.0 - x) * cur - j * prev) / (j + 1.0);
        prev = cur;
        cur = next;
        if (std::abs(cur) > big) {
          cur /= big;
          prev /= big;
          log_scale += std::log(big);
        }
      }
    }
    return out;
  }

  /// Quadrature nodes and weights adequate for products of the first N modes:
  /// 16-point panels, finer near the origin where the modes oscillate fastest.
  void quadrature(RVector& nodes, RVector& weights) const {
    const GaussRule rule = gauss_legendre(16);
    std::vector<double> x, w;
    const double tail = 4.0 * N_ + 100.0;
    append_composite_rule(0.0, 4.0, 0.0625, rule, x, w);
    append_composite_rule(4.0, tail, 0.25, rule, x, w);
    nodes = Eigen::Map<RVector>(x.data(), Index(x.size()));
    weights = Eigen::Map<RVector>(w.data(), Index(w.size()));
  }

  friend bool operator==(const LaguerreBasis& x, const LaguerreBasis& y) { return x.N_ == y.N_; }

 private:
  int N_;
};

using Discretization = std::variant<Grid, LaguerreBasis>;

inline Backend backend_of(const Discretization& d) {
  return std::holds_alternative<Grid>(d) ? Backend::grid : Backend::laguerre;
}

inline int size_of(const Discretization& d) {
  return std::visit([](const auto& x) { return x.size(); }, d);
}

/// Norm matching the backend: weighted L2 on the grid, Euclidean on Laguerre
/// coefficients (the basis is orthonormal).
inline double backend_norm(const Discretization& d, const CVector& v) {
  if (const Grid* g = std::get_if<Grid>(&d)) return g->norm(v);
  return v.norm();
}

}  // namespace winhopf
