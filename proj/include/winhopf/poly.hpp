#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Eigenvalues>

#include "winhopf/types.hpp"

namespace winhopf {

/// A root together with its multiplicity.
struct Root {
  Complex value;
  int multiplicity = 1;
};

/// Polynomial with complex coefficients stored in ascending order of degree.
class ComplexPoly {
 public:
  ComplexPoly() : coeffs_{Complex(0.0)} {}
  explicit ComplexPoly(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

  static ComplexPoly constant(Complex c) { return ComplexPoly({c}); }

  /// gain * prod (x - r) over the listed roots.
  static ComplexPoly from_roots(const std::vector<Complex>& roots, Complex gain = 1.0) {
    std::vector<Complex> c{gain};
    for (const Complex& r : roots) {
      std::vector<Complex> next(c.size() + 1, Complex(0.0));
      for (std::size_t k = 0; k < c.size(); ++k) {
        next[k + 1] += c[k];
        next[k] -= r * c[k];
      }
      c = std::move(next);
    }
    return ComplexPoly(std::move(c));
  }

  const std::vector<Complex>& coeffs() const { return coeffs_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == Complex(0.0); }
  Complex leading() const { return coeffs_.back(); }

  Complex operator()(Complex x) const {
    Complex acc(0.0);
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  ComplexPoly derivative() const {
    if (coeffs_.size() <= 1) return ComplexPoly();
    std::vector<Complex> d(coeffs_.size() - 1);
    for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = coeffs_[k] * static_cast<double>(k);
    return ComplexPoly(std::move(d));
  }

  friend ComplexPoly operator*(const ComplexPoly& p, const ComplexPoly& q) {
    std::vector<Complex> c(p.coeffs_.size() + q.coeffs_.size() - 1, Complex(0.0));
    for (std::size_t i = 0; i < p.coeffs_.size(); ++i)
      for (std::size_t j = 0; j < q.coeffs_.size(); ++j) c[i + j] += p.coeffs_[i] * q.coeffs_[j];
    return ComplexPoly(std::move(c));
  }

  /// Roots from the companion-matrix eigenvalues. Eigenvalues that belong to
  /// one multiple root scatter by roughly eps^(1/m); they are grouped, replaced
  /// by their centroid and polished with Newton on the (m-1)-th derivative.
  std::vector<Root> roots(double cluster_rel = 1e-4) const;

  /// Roots listed with repetition.
  std::vector<Complex> root_list(double cluster_rel = 1e-4) const {
    std::vector<Complex> out;
    for (const Root& r : roots(cluster_rel))
      for (int k = 0; k < r.multiplicity; ++k) out.push_back(r.value);
    return out;
  }

 private:
  void trim() {
    if (coeffs_.empty()) coeffs_.push_back(Complex(0.0));
    double scale = 0.0;
    for (const Complex& c : coeffs_) scale = std::max(scale, std::abs(c));
    while (coeffs_.size() > 1 && std::abs(coeffs_.back()) <= 1e-14 * scale) coeffs_.pop_back();
  }

  std::vector<Complex> coeffs_;
};

namespace detail {

inline Complex newton_polish(const ComplexPoly& p, Complex x, int steps) {
  const ComplexPoly dp = p.derivative();
  for (int s = 0; s < steps; ++s) {
    const Complex fx = p(x);
    const Complex dfx = dp(x);
    if (std::abs(dfx) == 0.0) break;
    const Complex candidate = x - fx / dfx;
    if (std::abs(p(candidate)) > std::abs(fx)) break;
    x = candidate;
  }
  return x;
}

}  // namespace detail

inline std::vector<Root> ComplexPoly::roots(double cluster_rel) const {
  const int n = degree();
  std::vector<Root> out;
  if (n <= 0) return out;
  std::vector<Complex> eig;
  if (n == 1) {
    eig.push_back(-coeffs_[0] / coeffs_[1]);
  } else {
    CMatrix companion = CMatrix::Zero(n, n);
    for (int k = 1; k < n; ++k) companion(k, k - 1) = 1.0;
    for (int k = 0; k < n; ++k) companion(k, n - 1) = -coeffs_[k] / coeffs_[n];
    Eigen::ComplexEigenSolver<CMatrix> solver(companion, false);
    for (int k = 0; k < n; ++k) eig.push_back(solver.eigenvalues()[k]);
  }

  // Union-find style grouping of nearby eigenvalues.
  std::vector<int> label(eig.size());
  std::iota(label.begin(), label.end(), 0);
  auto find = [&](int i) {
    while (label[i] != i) i = label[i] = label[label[i]];
    return i;
  };
  for (std::size_t i = 0; i < eig.size(); ++i)
    for (std::size_t j = i + 1; j < eig.size(); ++j) {
      const double scale = std::max({1.0, std::abs(eig[i]), std::abs(eig[j])});
      if (std::abs(eig[i] - eig[j]) <= cluster_rel * scale) label[find(int(j))] = find(int(i));
    }
  std::vector<int> seen;
  for (std::size_t i = 0; i < eig.size(); ++i) {
    const int root = find(int(i));
    if (std::find(seen.begin(), seen.end(), root) != seen.end()) continue;
    seen.push_back(root);
    Complex centroid(0.0);
    int m = 0;
    for (std::size_t j = 0; j < eig.size(); ++j)
      if (find(int(j)) == root) {
        centroid += eig[j];
        ++m;
      }
    centroid /= double(m);
    ComplexPoly target = *this;
    for (int k = 1; k < m; ++k) target = target.derivative();
    out.push_back({detail::newton_polish(target, centroid, m == 1 ? 1 : 3), m});
  }
  return out;
}

}  // namespace winhopf
