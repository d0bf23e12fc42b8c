#pragma once

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace winhopf {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double pi = std::numbers::pi;
inline constexpr Complex I_unit{0.0, 1.0};

/// Numerical defaults shared across modules.
struct Tolerances {
  /// Minimum distance of a zero or pole from the real axis.
  double root_margin = 1e-6;
  /// Zeros and poles closer than this are cancelled.
  double root_merge = 1e-8;
  /// Relative singular-value threshold for numerical nullity.
  double rank = 1e-8;
  /// Minimal ratio between the smallest non-null and largest null singular value.
  double rank_gap = 1e4;
  /// Default residual tolerance for grid checks.
  double grid = 1e-5;
  /// Residual tolerance for checks that are exact up to rounding.
  double exact = 1e-8;
};

inline const Tolerances& default_tolerances() {
  static const Tolerances tol{};
  return tol;
}

}  // namespace winhopf
