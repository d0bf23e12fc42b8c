#pragma once

#include <string>
#include <vector>

#include "winhopf/inverses.hpp"

namespace winhopf {

/// Bases of the images of the complementary projections
/// P+-_g = (1/2)(I +- H(g~)) on ker W(g). Columns are discretized functions.
struct KernelBasis {
  CMatrix plus;
  CMatrix minus;
  /// "even" or "odd" branch of the Laguerre construction, or a composite
  /// label for kernels of W(a) + H(b).
  std::string construction;

  int plus_dim() const { return int(plus.cols()); }
  int minus_dim() const { return int(minus.cols()); }
  int dim() const { return plus_dim() + minus_dim(); }

  CMatrix vectors() const {
    CMatrix v(plus.rows() > 0 ? plus.rows() : minus.rows(), dim());
    if (plus_dim() > 0) v.leftCols(plus_dim()) = plus;
    if (minus_dim() > 0) v.rightCols(minus_dim()) = minus;
    return v;
  }
};

/// dim im P+-_g for a matching g with nu = 0 and n < 0.
inline int projection_dim(int n, int sigma, bool plus) {
  if (n >= 0) return 0;
  const int m = (-n) / 2;
  if (n % 2 == 0) return m;
  return m + (plus ? (1 - sigma) / 2 : (1 + sigma) / 2);
}

namespace detail {

/// Laguerre functions psi_0..psi_{count-1} on the discretization.
inline CMatrix laguerre_columns(int count, const Discretization& disc) {
  if (const Grid* g = std::get_if<Grid>(&disc))
    return LaguerreBasis(std::max(count, 1)).evaluate(g->nodes()).leftCols(count).cast<Complex>();
  const int n = size_of(disc);
  if (count > n) throw Error(ErrorCode::precondition, "not enough Laguerre modes for the kernel basis");
  return CMatrix::Identity(n, count);
}

}  // namespace detail

/// Bases W(g+^-1)(psi_{m-k-1} -+ sigma psi_{m+k}), k < m, for n = -2m and
/// W(g+^-1)(psi_{m+k} -+ sigma psi_{m-k}), k <= m, without the zero vector,
/// for n = -2m-1. g+ is the plus factor of the normalized matching
/// factorization.
inline KernelBasis kernel_basis(const Symbol& g, const Discretization& disc) {
  if (ap_index(g) != 0.0 || winding_index(g) >= 0)
    throw Error(ErrorCode::precondition, "kernel basis needs nu(g) = 0 and n(g) < 0");
  const Factorization f = matching_factor(g);
  const int n = f.n;
  const double s = double(*f.sigma);
  const int m = n % 2 == 0 ? -n / 2 : (-n - 1) / 2;
  const CMatrix psi = detail::laguerre_columns(2 * m + 1, disc);
  std::vector<CVector> plus, minus;
  KernelBasis basis;
  if (n % 2 == 0) {
    basis.construction = "even";
    for (int k = 0; k < m; ++k) {
      plus.push_back(psi.col(m - k - 1) - s * psi.col(m + k));
      minus.push_back(psi.col(m - k - 1) + s * psi.col(m + k));
    }
  } else {
    basis.construction = "odd";
    for (int k = 0; k <= m; ++k) {
      // For k = 0 the combination is (1 -+ sigma) psi_m, which vanishes for one sign.
      if (k > 0 || s < 0) plus.push_back(psi.col(m + k) - s * psi.col(m - k));
      if (k > 0 || s > 0) minus.push_back(psi.col(m + k) + s * psi.col(m - k));
    }
  }
  const DiscreteOperator wp = build_W(inv(f.g_plus), disc);
  auto assemble = [&](const std::vector<CVector>& cols) {
    CMatrix v(size_of(disc), Index(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) v.col(Index(k)) = cols[k];
    return cols.empty() ? v : wp.apply(v);
  };
  basis.plus = assemble(plus);
  basis.minus = assemble(minus);
  return basis;
}

/// The injection of ker W(d) into ker(W(a) + H(b)):
///   (1/2)(Rc W(a~^-1) - H(c~) Rc W(a~^-1)) + (1/2) H(a^-1)
/// with Rc a right inverse of W(c). The reflected terms J Q W0(g) P are
/// realized as H(g~).
inline DiscreteOperator phi_plus(const MatchingPair& p, const Discretization& disc) {
  InverseRecipe scratch;
  const DiscreteOperator Rc = detail::side_inverse(p.c, disc, true, scratch, "c");
  const DiscreteOperator RcA = compose(Rc, build_W(inv(reflect(p.a)), disc));
  const DiscreteOperator I = DiscreteOperator::identity(disc);
  return add(scale(0.5, compose(subtract(I, op_flipped_hankel(p.c, disc)), RcA)),
             scale(0.5, op_flipped_hankel(inv(reflect(p.a)), disc)))
      .with_recipe("phi+ = (1/2)(I - JQW0(c)P) Rc W(a~^-1) + (1/2) JQW0(a~^-1)P");
}

/// ker(W(a) + H(b)) = phi+(im P+_d) + im P-_c, for W(c) right invertible.
/// Both summands must be finite dimensional, which needs nu(c) = 0 and
/// nu(d) >= 0 (or nu(d) = 0).
inline KernelBasis kernel_of_whh(const MatchingPair& p, const Discretization& disc) {
  const Sides sc = wh_sides(p.nu1, p.n1);
  if (!sc.right) throw Error(ErrorCode::precondition, "kernel description needs W(c) right invertible");
  if (p.nu1 < 0 || p.nu2 < 0)
    throw Error(ErrorCode::precondition, "kernel is infinite dimensional when nu(c) < 0 or nu(d) < 0");
  KernelBasis k;
  k.construction = "phi+(im P+_d) + im P-_c";
  const Index n = size_of(disc);
  k.plus = CMatrix(n, 0);
  k.minus = CMatrix(n, 0);
  if (p.nu2 == 0 && p.n2 < 0) {
    const KernelBasis bd = kernel_basis(p.d, disc);
    if (bd.plus_dim() > 0) k.plus = phi_plus(p, disc).apply(bd.plus);
  }
  if (p.n1 < 0) k.minus = kernel_basis(p.c, disc).minus;
  return k;
}

/// coker(W(a) + H(b)) described as the kernel of the adjoint operator
/// W(conj(a)) + H(conj(b~)); needs W(d) left invertible.
inline KernelBasis cokernel_of_whh(const MatchingPair& p, const Discretization& disc) {
  if (!wh_sides(p.nu2, p.n2).left)
    throw Error(ErrorCode::precondition, "cokernel description needs W(d) left invertible");
  KernelBasis k = kernel_of_whh(adjoint_pair(p), disc);
  k.construction = "phi+(im P+_conj(c)) + im P-_conj(d) of the adjoint pair";
  return k;
}

}  // namespace winhopf
