// Grid and Laguerre realizations of W, H, U, V, P and their algebra.

#include <gtest/gtest.h>

#include <cmath>

#include "winhopf/harness.hpp"
#include "winhopf/operators.hpp"
#include "winhopf/quadrature.hpp"

namespace winhopf {
namespace {

const Complex i1 = I_unit;

Symbol zpk(Complex gain, std::vector<Complex> zeros, std::vector<Complex> poles, double delta = 0.0) {
  return Symbol(Rational::from_zpk(gain, std::move(zeros), std::move(poles)), delta);
}

/// 1 / (1 - i xi), the transform of exp(-x) on x > 0.
Symbol causal_exp() { return zpk(i1, {}, {-i1}); }

const Grid& small_grid() {
  static const Grid g(40.0, 640);
  return g;
}

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

/// Gaussian bumps well inside [0, T] and resolved by 200 Laguerre modes, for
/// checks that are exact up to rounding. The Laguerre mixtures of
/// TestVectorSet still carry about 1e-8 of their mass near t = 40.
CMatrix smooth_probes(const Discretization& d) {
  CMatrix v(size_of(d), 6);
  for (int k = 0; k < 6; ++k)
    v.col(k) = TestFunction::gaussian(2.0 + 1.3 * k, 0.8 + 0.2 * k, std::polar(1.0, 0.7 * k)).discretize(d);
  return v;
}

double op_gap(const DiscreteOperator& x, const DiscreteOperator& y, const Discretization& d) {
  return residual(x, &y, smooth_probes(d), d);
}

// ------------------------------------------------------------------ build_W

TEST(BuildW, UnitSymbolIsIdentity) {
  for (const Discretization& d : {Discretization(small_grid()), Discretization(LaguerreBasis(40))}) {
    const CMatrix m = build_W(Symbol::constant(1.0), d).matrix();
    EXPECT_EQ(m, CMatrix::Identity(m.rows(), m.cols()));
  }
}

TEST(BuildW, CausalConvolutionOfFirstLaguerreFunction) {
  const Grid& g = small_grid();
  const CVector psi0 = TestFunction::laguerre(0).discretize(g);
  const CVector out = build_W(causal_exp(), g).apply(psi0);
  double worst = 0.0;
  for (Index i = 0; i < g.size(); ++i) {
    const double t = g.nodes()[i];
    worst = std::max(worst, std::abs(out[i] - std::sqrt(2.0) * t * std::exp(-t)));
  }
  EXPECT_LE(worst, 1e-8);
}

TEST(BuildW, ZetaIsLowerShiftOnLaguerreModes) {
  const LaguerreBasis basis(30);
  const CMatrix m = build_W(Symbol::zeta(), basis).matrix();
  CMatrix shift = CMatrix::Zero(30, 30);
  for (int j = 0; j + 1 < 30; ++j) shift(j + 1, j) = 1.0;
  EXPECT_LE(max_abs(m - shift), 1e-12);
}

TEST(BuildW, LaguerreRefusesExponentials) {
  try {
    build_W(Symbol::exponential(1.0), LaguerreBasis(10));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::backend_unsupported);
  }
}

TEST(BuildW, OffGridShiftRaises) {
  try {
    build_W(Symbol::exponential(0.3), small_grid());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::shift_off_grid);
  }
}

// ------------------------------------------------------------------ build_H

TEST(BuildH, PositiveExponentialFlipsInitialSegment) {
  const Grid& g = small_grid();
  const TestFunction f = TestFunction::gaussian(0.3, 0.4);
  const CVector out = build_H(Symbol::exponential(1.0), g).apply(f.discretize(g));
  double worst = 0.0;
  for (Index i = 0; i < g.size(); ++i) {
    const double t = g.nodes()[i];
    const Complex want = t < 1.0 ? f.sample(RVector::Constant(1, 1.0 - t))[0] : Complex(0.0);
    worst = std::max(worst, std::abs(out[i] - want));
  }
  EXPECT_LE(worst, 1e-13);
}

TEST(BuildH, NegativeExponentialVanishes) {
  EXPECT_EQ(max_abs(build_H(Symbol::exponential(-2.0), small_grid()).matrix()), 0.0);
}

TEST(BuildH, SeparableKernelIsRankOne) {
  const Grid& g = small_grid();
  const CMatrix m = build_H(zpk(2.0, {}, {i1, -i1}), g).matrix();
  // (H phi)(t) = exp(-t) sum_j w_j exp(-s_j) phi(s_j).
  const RVector e = (-g.nodes().array()).exp().matrix();
  const CMatrix want = (e * (g.weights().array() * e.array()).matrix().transpose()).cast<Complex>();
  EXPECT_LE(max_abs(m - want), 1e-9);
  EXPECT_EQ(rank_gap(m, 1e-8, 1.0).nullity, g.size() - 1);
}

// ---------------------------------------------------------------------- U, V

TEST(ShiftU, ZeroShiftIsIdentity) {
  const CMatrix m = op_U(0.0, small_grid()).matrix();
  EXPECT_EQ(m, CMatrix::Identity(m.rows(), m.cols()));
}

TEST(ShiftU, NegativeShiftIsLeftInverse) {
  const Discretization d = small_grid();
  EXPECT_LE(residual_to_identity(compose(op_U(-1.0, d), op_U(1.0, d)), smooth_probes(d), d), 1e-12);
}

TEST(ShiftU, ComplementIsIndicatorOfInitialInterval) {
  const Grid& g = small_grid();
  const CMatrix m = (DiscreteOperator::identity(Discretization(g)) - compose(op_U(1.0, g), op_U(-1.0, g))).matrix();
  CMatrix want = CMatrix::Zero(g.size(), g.size());
  for (Index i = 0; i < g.size(); ++i)
    if (g.nodes()[i] < 1.0) want(i, i) = 1.0;
  EXPECT_EQ(max_abs(m - want), 0.0);
}

TEST(ShiftU, LaguerreMatchesGridOnSmoothFunctions) {
  const Grid& g = small_grid();
  const LaguerreBasis basis(120);
  const TestFunction f = TestFunction::gaussian(4.0, 1.0);
  const CVector on_grid = op_U(1.0, g).apply(f.discretize(g));
  const CVector modes = op_U(1.0, basis).apply(f.discretize(basis));
  const CVector back = basis.evaluate(g.nodes()).cast<Complex>() * modes;
  EXPECT_LE(g.norm(on_grid - back) / g.norm(on_grid), 1e-4);
}

TEST(OperatorV, MinusOneIsLeftInverseOfOne) {
  for (const Discretization& d : {Discretization(small_grid()), Discretization(LaguerreBasis(200))}) {
    const CMatrix v = smooth_probes(d);
    EXPECT_LE(residual_to_identity(compose(op_V(-1, d), op_V(1, d)), v, d), 1e-10);
    // On the grid V^(3) leaves a t^2 e^{-t} tail past T that V^(-3) never sees.
    const double limit = std::holds_alternative<Grid>(d) ? 1e-8 : 1e-10;
    EXPECT_LE(residual_to_identity(compose(op_V(-3, d), op_V(3, d)), v, d), limit);
  }
}

TEST(OperatorV, EqualsWOfZeta) {
  const Discretization d = small_grid();
  EXPECT_LE(op_gap(op_V(1, d), build_W(Symbol::zeta(), d), d), 1e-9);
  EXPECT_LE(op_gap(op_V(-2, d), build_W(Symbol::zeta(-2), d), d), 1e-9);
}

TEST(OperatorV, ComplementIsProjection) {
  for (const Discretization& d : {Discretization(small_grid()), Discretization(LaguerreBasis(200))}) {
    const DiscreteOperator P = op_P(1, d);
    EXPECT_LE(op_gap(compose(P, P), P, d), 1e-9);
  }
  EXPECT_LE(max_abs(op_P(2, LaguerreBasis(20)).matrix() -
                    CMatrix(CMatrix::Identity(20, 20)).topLeftCorner(20, 2) *
                        CMatrix(CMatrix::Identity(20, 20)).topLeftCorner(20, 2).transpose()),
            1e-12);
}

// ----------------------------------------------------------- flipped Hankel

TEST(FlippedHankel, PositiveExponentialGivesZero) {
  EXPECT_EQ(max_abs(op_flipped_hankel(Symbol::exponential(1.0), small_grid()).matrix()), 0.0);
}

TEST(FlippedHankel, ConstantGivesZero) {
  EXPECT_EQ(max_abs(op_flipped_hankel(Symbol::constant(3.0), small_grid()).matrix()), 0.0);
}

TEST(FlippedHankel, MatchesReflectedRestrictedConvolution) {
  // (J Q W0(g) P phi)(t) = int_0^inf k(-t - s) phi(s) ds with F(k) = g - g(inf).
  const Grid& g = small_grid();
  SymbolGenerator gen(12);
  std::vector<Symbol> symbols = {Symbol::zeta()};
  for (int k = 0; k < 3; ++k) symbols.push_back(Symbol(gen.rational(3)));
  const CMatrix v = TestVectorSet(6, 6).matrix(g);
  for (const Symbol& sym : symbols) {
    const ExpPolyKernel k = kernel_of_regular_part(sym.rat());
    CMatrix direct(g.size(), g.size());
    for (Index i = 0; i < g.size(); ++i)
      for (Index j = 0; j < g.size(); ++j) direct(i, j) = k(-g.nodes()[i] - g.nodes()[j]) * g.weights()[j];
    const CMatrix got = op_flipped_hankel(sym, g).apply(v);
    const CMatrix want = direct * v;
    for (Index c = 0; c < v.cols(); ++c)
      EXPECT_LE(g.norm(got.col(c) - want.col(c)), 1e-8 * std::max(1.0, g.norm(want.col(c))));
  }
}

// ----------------------------------------------------------------- algebra

TEST(Algebra, IdentityApply) {
  const CVector v = TestVectorSet(7, 1).matrix(small_grid()).col(0);
  EXPECT_EQ(winhopf::apply(DiscreteOperator::identity(Discretization(small_grid())), v), v);
}

TEST(Algebra, ComposeWithDenseInverse) {
  const Discretization d = small_grid();
  // Winding 0, so W(g) is invertible and its truncation well conditioned.
  const DiscreteOperator A = build_W(zpk(2.0, {Complex(0.5, 1.0)}, {Complex(-0.5, 1.5)}), d);
  const CMatrix v = TestVectorSet(8, 6).matrix(d);
  EXPECT_LE(residual_to_identity(compose(A, dense_inverse(A)), v, d), 1e-8);
}

TEST(Algebra, AddNegationIsZero) {
  const DiscreteOperator A = build_H(zpk(1.0, {Complex(0.2, 1.0)}, {Complex(1.0, -0.7), Complex(0.0, 2.0)}),
                                     small_grid());
  EXPECT_EQ(max_abs(add(A, scale(-1.0, A)).matrix()), 0.0);
}

TEST(Algebra, MixedBackendsRaise) {
  try {
    compose(DiscreteOperator::identity(Discretization(small_grid())),
            DiscreteOperator::identity(Discretization(LaguerreBasis(640))));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::backend_mismatch);
  }
}

TEST(Algebra, AdjointUsesWeightedInnerProduct) {
  const Grid& g = small_grid();
  const DiscreteOperator A = build_W(zpk(1.0, {Complex(0.3, 0.8)}, {Complex(-1.0, -1.2)}), g);
  const DiscreteOperator B = adjoint(A, g);
  const CMatrix v = TestVectorSet(9, 2).matrix(g);
  const Complex lhs = g.inner(A.apply(CVector(v.col(0))), v.col(1));
  const Complex rhs = g.inner(v.col(0), B.apply(CVector(v.col(1))));
  EXPECT_LE(std::abs(lhs - rhs), 1e-12 * std::abs(lhs));
}

// --------------------------------------------------------- product identities

TEST(ProductIdentities, RandomPairsOnGrid) {
  const Discretization grid = Grid(40.0, 1600);
  SymbolGenerator gen(13);
  for (int trial = 0; trial < 3; ++trial) {
    const Symbol a(gen.rational(2)), b(gen.rational(2));
    const IdentityReport r = identity_suite(a, b, grid, TestVectorSet(17, 4).matrix(grid));
    EXPECT_LE(r.w_identity, 1e-5);
    EXPECT_LE(r.h_identity, 1e-5);
  }
}

TEST(ProductIdentities, TripleProductWithAnalyticFactors) {
  // W(m x p) = W(m) W(x) W(p) when H(m) = 0 and H(p~) = 0: m has its roots in
  // the upper half-plane, p in the lower one.
  const Discretization d = Grid(40.0, 1600);
  SymbolGenerator gen(14);
  const CMatrix v = TestVectorSet(15, 6).matrix(d);
  for (int trial = 0; trial < 3; ++trial) {
    const Symbol m = zpk(gen.unit(), {gen.root(0.5, 3.0, 1)}, {gen.root(0.5, 3.0, 1)});
    const Symbol p = zpk(gen.unit(), {gen.root(0.5, 3.0, -1)}, {gen.root(0.5, 3.0, -1)});
    const Symbol x(gen.rational(2));
    const DiscreteOperator lhs = build_W(m * x * p, d);
    const DiscreteOperator rhs = compose({build_W(m, d), build_W(x, d), build_W(p, d)});
    EXPECT_LE(residual(rhs, &lhs, v, d), 1e-5);
  }
}

// ------------------------------------------------------- backend agreement

TEST(Backends, LaguerreOrthonormality) {
  const LaguerreBasis basis(120);
  RVector x, w;
  basis.quadrature(x, w);
  const Eigen::MatrixXd psi = basis.evaluate(x);
  const Eigen::MatrixXd gram = psi.transpose() * w.asDiagonal() * psi;
  EXPECT_LE((gram - Eigen::MatrixXd::Identity(120, 120)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Backends, GridAndLaguerreAgree) {
  SymbolGenerator gen(16);
  for (int trial = 0; trial < 3; ++trial) {
    const Symbol g(gen.rational(2));
    const BackendDiscrepancy dis = cross_backend(g, TestFunction::gaussian(4.0, 1.2), Grid(40.0, 1280),
                                                 LaguerreBasis(200));
    EXPECT_LE(dis.w, 1e-4);
    EXPECT_LE(dis.h, 1e-4);
  }
}

}  // namespace
}  // namespace winhopf
