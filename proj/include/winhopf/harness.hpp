#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "winhopf/classify.hpp"
#include "winhopf/test_functions.hpp"

namespace winhopf {

/// Largest relative residual |X v - Y v| / |Y v| over the columns of v, in
/// the backend norm. Passing an empty `expected` compares against I.
inline double residual(const DiscreteOperator& op, const DiscreteOperator* expected, const CMatrix& vectors,
                       const Discretization& disc) {
  if (expected) detail::check_compatible(op, *expected);
  if (op.size() != size_of(disc)) throw Error(ErrorCode::backend_mismatch, "operator and discretization differ");
  const CMatrix got = op.apply(vectors);
  const CMatrix want = expected ? expected->apply(vectors) : vectors;
  double worst = 0.0;
  for (Index k = 0; k < vectors.cols(); ++k) {
    const double scale = backend_norm(disc, want.col(k));
    const double diff = backend_norm(disc, got.col(k) - want.col(k));
    worst = std::max(worst, scale > 0 ? diff / scale : diff);
  }
  return worst;
}

inline double residual_to_identity(const DiscreteOperator& op, const CMatrix& vectors, const Discretization& disc) {
  return residual(op, nullptr, vectors, disc);
}

/// Numerical rank data of a matrix: singular values below tol * s_max count
/// as null; gap_ratio is the smallest kept over the largest null value.
struct RankGap {
  int nullity = 0;
  double gap_ratio = std::numeric_limits<double>::infinity();
  RVector singular_values;
};

/// Nullity of the column space (columns that are numerically dependent).
/// Raises E_RANK_AMBIGUOUS when a null value exists but the gap to the
/// next singular value is below `min_gap`.
inline RankGap rank_gap(const CMatrix& m, double tol = 1e-8, double min_gap = 1e4) {
  RankGap r;
  r.singular_values = m.bdcSvd().singularValues();
  const RVector& s = r.singular_values;
  const Index full = std::min(m.rows(), m.cols());
  // Missing singular values of a wide matrix are exact zeros.
  const Index missing = m.cols() - full;
  const double smax = s.size() > 0 ? s[0] : 0.0;
  Index kept = 0;
  while (kept < s.size() && s[kept] > tol * smax) ++kept;
  r.nullity = int(s.size() - kept + missing);
  if (r.nullity > 0 && kept > 0) {
    const double largest_null = kept < s.size() ? s[kept] : 0.0;
    r.gap_ratio = largest_null > 0 ? s[kept - 1] / largest_null : std::numeric_limits<double>::infinity();
    if (r.gap_ratio < min_gap)
      throw Error(ErrorCode::rank_ambiguous, "singular value gap " + std::to_string(r.gap_ratio) +
                                                 " below " + std::to_string(min_gap));
  }
  return r;
}

inline RankGap rank_gap(const DiscreteOperator& op, double tol = 1e-8, double min_gap = 1e4) {
  return rank_gap(op.matrix(), tol, min_gap);
}

/// Tall section of W(a) + H(b): the operator applied to the first half of a
/// doubled discretization (the first N Laguerre modes, or functions supported
/// on [0, T]) and observed on all of it. Square truncations of one-sided
/// invertible operators have spurious small singular values; tall sections
/// do not, and their column nullity approximates dim ker.
inline CMatrix whh_tall_section(const MatchingPair& p, const Discretization& disc) {
  if (const Grid* g = std::get_if<Grid>(&disc)) {
    const Grid big(2.0 * g->T(), 2 * g->size());
    const CMatrix full = whh_operator(p, big).apply(CMatrix(CMatrix::Identity(big.size(), g->size())));
    const RVector sw = big.weights().cwiseSqrt();
    return sw.asDiagonal() * full * sw.head(g->size()).cwiseInverse().asDiagonal();
  }
  const int n = size_of(disc);
  const LaguerreBasis big(2 * n);
  return whh_operator(p, big).apply(CMatrix(CMatrix::Identity(2 * n, n)));
}

inline RankGap whh_nullity(const MatchingPair& p, const Discretization& disc) {
  return rank_gap(whh_tall_section(p, disc));
}

/// Residuals of the product identities
///   W(ab) = W(a)W(b) + H(a)H(b~),  H(ab) = W(a)H(b) + H(a)W(b~).
struct IdentityReport {
  double w_identity = 0.0;
  double h_identity = 0.0;
};

inline IdentityReport identity_suite(const Symbol& a, const Symbol& b, const Discretization& disc,
                                     const CMatrix& vectors) {
  const Symbol bt = reflect(b);
  const DiscreteOperator Wa = build_W(a, disc), Ha = build_H(a, disc);
  const DiscreteOperator w_rhs = add(compose(Wa, build_W(b, disc)), compose(Ha, build_H(bt, disc)));
  const DiscreteOperator h_rhs = add(compose(Wa, build_H(b, disc)), compose(Ha, build_W(bt, disc)));
  const Symbol ab = a * b;
  IdentityReport r;
  const DiscreteOperator Wab = build_W(ab, disc), Hab = build_H(ab, disc);
  r.w_identity = residual(w_rhs, &Wab, vectors, disc);
  // H(ab) may vanish (e.g. for negative frequencies); measure against |v| then.
  const CMatrix got = h_rhs.apply(vectors), want = Hab.apply(vectors);
  for (Index k = 0; k < vectors.cols(); ++k) {
    const double scale = std::max(backend_norm(disc, want.col(k)), backend_norm(disc, vectors.col(k)));
    r.h_identity = std::max(r.h_identity, backend_norm(disc, got.col(k) - want.col(k)) / scale);
  }
  return r;
}

/// Solution of (W(a) + H(b)) x = f through the classified inverse, compared
/// with a dense least-squares solve of the same truncated operator.
struct SolveReport {
  Verdict verdict = Verdict::undetermined;
  std::string formula_id;
  CVector x;
  /// |(W + H) x - f| / |f|.
  double equation_residual = 0.0;
  /// Distance of f from the range of the truncated operator, relative to |f|.
  double range_residual = 0.0;
  /// |x - x_dense| / |x_dense|; the dense solution is the minimum-norm
  /// least-squares one, so it only has to agree when the kernel is trivial.
  double dense_difference = 0.0;
  Dim kernel_dim;
};

/// The inverse matching a verdict. Sufficient conditions do not always put
/// W(c) and W(d) on the side the one-sided formulas need, so the remaining
/// formulas are tried in turn; a generalized inverse of a one-sided
/// invertible operator is a one-sided inverse.
inline InverseRecipe inverse_for(const MatchingPair& p, const Discretization& disc, Verdict v) {
  std::vector<InverseRecipe (*)(const MatchingPair&, const Discretization&)> order;
  switch (v) {
    case Verdict::two_sided:
      if (p.nu1 == 0 && p.nu2 == 0 && p.n1 == 0 && p.n2 == 0) return whh_two_sided_inverse(p, disc);
      order = {whh_right_inverse, whh_left_inverse, whh_generalized_inverse};
      break;
    case Verdict::right_only: order = {whh_right_inverse, whh_generalized_inverse}; break;
    case Verdict::left_only: order = {whh_left_inverse, whh_generalized_inverse}; break;
    case Verdict::generalized:
    case Verdict::not_one_sided: order = {whh_generalized_inverse}; break;
    default:
      throw Error(ErrorCode::precondition, std::string("no inverse available for verdict ") + verdict_name(v));
  }
  for (std::size_t k = 0; k + 1 < order.size(); ++k) {
    try {
      return order[k](p, disc);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::precondition) throw;
    }
  }
  return order.back()(p, disc);
}

inline SolveReport solve(const MatchingPair& p, const CVector& f, const Discretization& disc) {
  SolveReport rep;
  const ClassificationReport cls = classify(p);
  rep.verdict = cls.verdict;
  rep.kernel_dim = cls.ker;
  const InverseRecipe recipe = inverse_for(p, disc, cls.verdict);
  rep.formula_id = recipe.formula_id;
  rep.x = recipe.assembled.apply(f);
  const double fn = backend_norm(disc, f);
  const double denom = fn > 0 ? fn : 1.0;
  rep.equation_residual = backend_norm(disc, recipe.target.apply(rep.x) - f) / denom;

  // Dense oracle in the backend's Euclidean coordinates.
  CMatrix m = recipe.target.matrix();
  CVector rhs = f;
  RVector sw = RVector::Ones(m.rows());
  if (const Grid* g = std::get_if<Grid>(&disc)) sw = g->weights().cwiseSqrt();
  m = sw.asDiagonal() * m * sw.cwiseInverse().asDiagonal();
  rhs = sw.asDiagonal() * rhs;
  Eigen::BDCSVD<CMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-8);
  const CVector y = svd.solve(rhs);
  const CVector x_dense = sw.cwiseInverse().asDiagonal() * y;
  rep.range_residual = (m * y - rhs).norm() / (rhs.norm() > 0 ? rhs.norm() : 1.0);
  const double xn = backend_norm(disc, x_dense);
  rep.dense_difference = backend_norm(disc, rep.x - x_dense) / (xn > 0 ? xn : 1.0);
  return rep;
}

/// Relative L2 difference between grid and Laguerre realizations of W(g) f
/// and H(g) f, compared on the grid nodes.
struct BackendDiscrepancy {
  double w = 0.0;
  double h = 0.0;
};

inline BackendDiscrepancy cross_backend(const Symbol& g, const TestFunction& f, const Grid& grid,
                                        const LaguerreBasis& basis) {
  const Discretization gd = grid, ld = basis;
  if (!g.is_rational()) detail::require_rational_for_laguerre(g);
  const CVector fg = f.discretize(gd);
  const CVector fl = f.discretize(ld);
  const Eigen::MatrixXd psi = basis.evaluate(grid.nodes());
  auto compare = [&](const DiscreteOperator& og, const DiscreteOperator& ol) {
    const CVector on_grid = og.apply(fg);
    const CVector from_modes = psi.cast<Complex>() * ol.apply(fl);
    const double scale = std::max(grid.norm(on_grid), grid.norm(fg));
    return grid.norm(on_grid - from_modes) / scale;
  };
  BackendDiscrepancy d;
  d.w = compare(build_W(g, gd), build_W(g, ld));
  d.h = compare(build_H(g, gd), build_H(g, ld));
  return d;
}

/// Winding number of the rational part, (1/2 pi) times the total change of
/// its argument along the real line; independent of the root counts.
inline double numerical_winding(const Symbol& g, int samples = 200001) {
  double total = 0.0;
  double prev = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double theta = -0.5 * pi + pi * (k + 0.5) / samples;
    const double arg = std::arg(g.rat()(Complex(std::tan(theta))));
    if (k > 0) total += std::remainder(arg - prev, 2.0 * pi);
    prev = arg;
  }
  return total / (2.0 * pi);
}

/// Mean motion (1/2l)[arg g(t)] over [-l, l] by unwrapping sampled arguments.
inline double numerical_mean_motion(const Symbol& g, double l = 1e3, double step = 1e-2) {
  const long count = long(std::ceil(2.0 * l / step));
  double total = 0.0, prev = std::arg(g(-l));
  for (long k = 1; k <= count; ++k) {
    const double arg = std::arg(g(-l + 2.0 * l * double(k) / double(count)));
    total += std::remainder(arg - prev, 2.0 * pi);
    prev = arg;
  }
  return total / (2.0 * l);
}

/// Random generators used by the property suites. Roots keep
/// |Re| <= 2 and 0.5 <= |Im| <= 3 so that every backend resolves them.
struct SymbolGenerator {
  std::mt19937_64 rng;

  explicit SymbolGenerator(std::uint64_t seed) : rng(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

  Complex root(double min_imag = 0.5, double max_imag = 3.0, int side = 0) {
    const double im = uniform(min_imag, max_imag);
    const int s = side != 0 ? side : (uniform(0, 1) < 0.5 ? -1 : 1);
    return {uniform(-2.0, 2.0), s * im};
  }

  Complex unit() { return std::polar(uniform(0.5, 2.0), uniform(0.0, 2.0 * pi)); }

  /// Invertible rational symbol with `pairs` zero/pole pairs.
  Rational rational(int pairs, double min_imag = 0.5) {
    std::vector<Complex> z, p;
    for (int k = 0; k < pairs; ++k) {
      z.push_back(root(min_imag));
      p.push_back(root(min_imag));
    }
    return Rational::from_zpk(unit(), z, p);
  }

  Symbol symbol(int pairs, const std::vector<double>& deltas = {0.0}) {
    const double delta = deltas[std::size_t(std::uniform_int_distribution<int>(0, int(deltas.size()) - 1)(rng))];
    return Symbol(rational(pairs), delta);
  }

  /// h / h~ with h of winding 0 (each zero shares its pole's half-plane);
  /// a matching function with winding 0 and value 1 at 0.
  Symbol matching_ratio(int pairs) {
    std::vector<Complex> z, p;
    for (int k = 0; k < pairs; ++k) {
      const int side = uniform(0, 1) < 0.5 ? -1 : 1;
      z.push_back(root(0.5, 3.0, side));
      p.push_back(root(0.5, 3.0, side));
    }
    const Symbol h(Rational::from_zpk(unit(), z, p));
    return h * inv(reflect(h));
  }
};

/// Pair with prescribed subordinated c: b = a / c. Then
/// d = a / (a~ c), so nu(d) = 2 nu(a) - nu(c) and n(d) = 2 n(a) - n(c).
inline MatchingPair pair_from(const Symbol& a, const Symbol& c) { return make_matching_pair(a, a * inv(c)); }

}  // namespace winhopf
