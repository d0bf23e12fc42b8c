// Symbol algebra, indices, kernels, factorization and JSON I/O.

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "winhopf/factorization.hpp"
#include "winhopf/harness.hpp"
#include "winhopf/io.hpp"
#include "winhopf/kernel.hpp"
#include "winhopf/matching.hpp"
#include "winhopf/quadrature.hpp"

namespace winhopf {
namespace {

const Complex i1 = I_unit;

Symbol zpk(Complex gain, std::vector<Complex> zeros, std::vector<Complex> poles, double delta = 0.0) {
  return Symbol(Rational::from_zpk(gain, std::move(zeros), std::move(poles)), delta);
}

/// b = (t - i)(t + 2i) / ((t + i)(t - 2i)): matching, winding 0.
Symbol example_b() { return zpk(1.0, {i1, -2.0 * i1}, {-i1, 2.0 * i1}); }

double max_pointwise_gap(const Symbol& f, const Symbol& g) {
  double worst = 0.0;
  for (double t : real_sample_points(400)) worst = std::max(worst, std::abs(f(t) - g(t)) / std::abs(g(t)));
  return worst;
}

/// Argument increment of g over [-l, l] divided by 2l, by unwrapping samples.
double mean_motion_oracle(const Symbol& g, double l) {
  const int count = 400000;
  double total = 0.0, prev = std::arg(g(-l));
  for (int k = 1; k <= count; ++k) {
    const double arg = std::arg(g(-l + 2.0 * l * k / count));
    total += std::remainder(arg - prev, 2.0 * pi);
    prev = arg;
  }
  return total / (2.0 * l);
}

/// (1/2pi) times the argument change of the rational part along the real line,
/// parametrized by t = tan(theta).
double winding_oracle(const Symbol& g) {
  const int count = 100000;
  double total = 0.0, prev = 0.0;
  for (int k = 0; k < count; ++k) {
    const double theta = -0.5 * pi + pi * (k + 0.5) / count;
    const double arg = std::arg(g.rat()(Complex(std::tan(theta))));
    if (k > 0) total += std::remainder(arg - prev, 2.0 * pi);
    prev = arg;
  }
  return total / (2.0 * pi);
}

/// Composite Gauss rule on [-L, 0] and [0, L] for int exp(i xi x) k(x) dx.
Complex fourier_oracle(const ExpPolyKernel& k, double xi, double L = 50.0) {
  static const GaussRule rule = gauss_legendre(16);
  const double h = 0.25;
  Complex sum(0.0);
  for (double a = -L; a < L - 1e-12; a += h)
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double x = a + 0.5 * h * (1.0 + rule.nodes[q]);
      sum += 0.5 * h * rule.weights[q] * std::exp(i1 * (xi * x)) * k(x);
    }
  return sum;
}

// ---------------------------------------------------------------- indices

TEST(ApIndex, PureExponential) { EXPECT_EQ(ap_index(Symbol::exponential(2.0)), 2.0); }

TEST(ApIndex, RationalIsZero) { EXPECT_EQ(ap_index(Symbol::zeta(-2)), 0.0); }

TEST(ApIndex, AgreesWithMeanMotion) {
  const Symbol g = zpk(1.0, {2.0 * i1}, {-2.0 * i1}, -1.0);
  EXPECT_EQ(ap_index(g), -1.0);
  // The rational part adds 2 pi / 2l to the exponential's -1.
  EXPECT_NEAR(mean_motion_oracle(g, 1e3), -1.0, 5e-3);
}

TEST(ApIndex, NonInvertibleRaises) {
  try {
    ap_index(zpk(1.0, {}, {-i1}));
    FAIL() << "expected E_NOT_INVERTIBLE";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::not_invertible);
  }
}

TEST(WindingIndex, Zeta) { EXPECT_EQ(winding_index(Symbol::zeta()), 1); }

TEST(WindingIndex, MatchingExampleHasWindingZero) {
  const Symbol b = example_b();
  EXPECT_EQ(winding_index(b), 0);
  EXPECT_NEAR(winding_oracle(b), 0.0, 1e-3);
}

TEST(WindingIndex, ZetaInverseSquared) { EXPECT_EQ(winding_index(Symbol::zeta(-2)), -2); }

TEST(WindingIndex, RootMarginRaises) {
  EXPECT_THROW(zpk(1.0, {}, {Complex(0.3, 1e-8)}), Error);
  try {
    winding_index(zpk(1.0, {Complex(0.3, 1e-8)}, {-i1}));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_TRUE(e.code() == ErrorCode::root_margin || e.code() == ErrorCode::not_invertible);
  }
}

TEST(Sigma, Examples) {
  EXPECT_EQ(sigma(Symbol::zeta(-2)), 1);
  EXPECT_EQ(sigma(Symbol::zeta(1)), 1);
  EXPECT_EQ(sigma(Symbol::zeta(-1)), 1);
  EXPECT_EQ(sigma(example_b()), 1);
  EXPECT_EQ(sigma(scale(-1.0, Symbol::zeta(2))), -1);
}

TEST(Sigma, NonMatchingRaises) {
  try {
    sigma(zpk(2.0, {}, {}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::not_matching);
  }
}

TEST(Sigma, OddWindingNegativeValue) {
  const Symbol g = zpk(1.0, {-2.0 * i1}, {2.0 * i1});  // g(0) = -1, n = -1
  EXPECT_EQ(sigma(g), 1);
}

// ----------------------------------------------------------- matching pairs

TEST(MatchingPair, Exponentials) {
  const MatchingPair p = make_matching_pair(Symbol::exponential(-2.0), Symbol::exponential(1.0));
  EXPECT_EQ(p.c, Symbol::exponential(-3.0));
  EXPECT_EQ(p.d, Symbol::exponential(-1.0));
  EXPECT_EQ(p.nu1, -3.0);
  EXPECT_EQ(p.nu2, -1.0);
}

TEST(MatchingPair, EqualSymbols) {
  const Symbol a = zpk(1.5, {Complex(0.5, 2.0)}, {Complex(-1.0, 1.5)});
  const MatchingPair p = make_matching_pair(a, a);
  EXPECT_LE(max_pointwise_gap(p.c, Symbol::constant(1.0)), 1e-12);
  EXPECT_LE(max_pointwise_gap(p.d, a * inv(reflect(a))), 1e-12);
}

TEST(MatchingPair, UnitAndMatchingB) {
  const Symbol b = example_b();
  const MatchingPair p = make_matching_pair(Symbol::constant(1.0), b);
  EXPECT_LE(max_pointwise_gap(p.c, reflect(b)), 1e-12);
  EXPECT_LE(max_pointwise_gap(p.d, b), 1e-12);
}

TEST(MatchingPair, NotMatchingRaises) {
  try {
    make_matching_pair(Symbol::zeta(), Symbol::constant(2.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::not_matching);
  }
}

// ---------------------------------------------------------------- kernels

TEST(KernelExpansion, CausalExponential) {
  const Rational r = Rational::from_zpk(i1, {}, {-i1});  // 1 / (1 - i xi)
  const ExpPolyKernel k = kernel_expansion(r);
  for (double x : {0.1, 0.7, 2.0, 5.0}) EXPECT_NEAR(std::abs(k(x) - std::exp(-x)), 0.0, 1e-14);
  for (double x : {-0.1, -3.0}) EXPECT_EQ(k(x), Complex(0.0));
}

TEST(KernelExpansion, TwoSidedExponential) {
  const Rational r = Rational::from_zpk(2.0, {}, {i1, -i1});  // 2 / (1 + xi^2)
  const ExpPolyKernel k = kernel_expansion(r);
  for (double x : {-4.0, -0.5, 0.25, 3.0}) EXPECT_NEAR(std::abs(k(x) - std::exp(-std::abs(x))), 0.0, 1e-14);
}

TEST(KernelExpansion, ZeroSymbol) { EXPECT_TRUE(kernel_expansion(Rational::constant(0.0)).empty()); }

TEST(KernelExpansion, NotStrictlyProperRaises) {
  try {
    kernel_expansion(Symbol::zeta().rat());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::not_strictly_proper);
  }
}

TEST(KernelExpansion, FourierTransformReproducesSymbol) {
  SymbolGenerator gen(31);
  for (int trial = 0; trial < 4; ++trial) {
    // Strictly proper with a double pole to exercise polynomial terms.
    const Complex dp = gen.root();
    const Rational r = Rational::from_zpk(gen.unit(), {gen.root()}, {gen.root(), dp, dp});
    const ExpPolyKernel k = kernel_expansion(r);
    double worst = 0.0;
    for (int j = 0; j < 100; ++j) {
      const double xi = -10.0 + 20.0 * (j + 0.5) / 100.0;
      worst = std::max(worst, std::abs(fourier_oracle(k, xi) - r(Complex(xi))));
    }
    EXPECT_LE(worst, 1e-8) << "trial " << trial;
  }
}

// ----------------------------------------------------- algebraic invariants

TEST(SymbolProperties, IndexAdditivity) {
  SymbolGenerator gen(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Symbol g = gen.symbol(3, {-1.5, 0.0, 2.0});
    const Symbol h = gen.symbol(2, {-0.5, 0.0, 1.0});
    EXPECT_EQ(winding_index(g * h), winding_index(g) + winding_index(h));
    EXPECT_DOUBLE_EQ(ap_index(g * h), ap_index(g) + ap_index(h));
  }
}

TEST(SymbolProperties, Reflection) {
  SymbolGenerator gen(6);
  for (int trial = 0; trial < 20; ++trial) {
    const Symbol g = gen.symbol(3, {-1.0, 0.0, 0.5});
    EXPECT_EQ(winding_index(reflect(g)), -winding_index(g));
    EXPECT_EQ(ap_index(reflect(g)), -ap_index(g));
    EXPECT_EQ(reflect(reflect(g)), g);
  }
}

TEST(SymbolProperties, WindingAgreesWithArgumentOracle) {
  SymbolGenerator gen(8);
  for (int trial = 0; trial < 10; ++trial) {
    const Symbol g = gen.symbol(4);
    EXPECT_NEAR(winding_oracle(g), double(winding_index(g)), 1e-3);
  }
}

TEST(SymbolProperties, SubordinatedPairsAreMatching) {
  SymbolGenerator gen(9);
  for (int trial = 0; trial < 15; ++trial) {
    const Symbol a = gen.symbol(2, {-1.0, 0.0, 1.0});
    const Symbol c = gen.matching_ratio(2) * Symbol::zeta(trial % 5 - 2) * Symbol::exponential(0.5 * (trial % 3 - 1));
    const MatchingPair p = pair_from(a, c);
    EXPECT_LE(matching_defect(p.c), 1e-10);
    EXPECT_LE(matching_defect(p.d), 1e-10);
    EXPECT_EQ(p.sigma_c, p.sigma_d);
    EXPECT_EQ((p.n1 + p.n2) % 2, 0);
  }
}

TEST(SymbolProperties, AdjointPairBookkeeping) {
  SymbolGenerator gen(10);
  for (int trial = 0; trial < 10; ++trial) {
    const Symbol a = gen.symbol(2, {-1.0, 0.0, 1.0});
    const MatchingPair p = pair_from(a, gen.matching_ratio(1) * Symbol::zeta(trial % 4 - 2));
    const MatchingPair q = adjoint_pair(p);
    EXPECT_LE(max_pointwise_gap(q.c, conj(p.d)), 1e-10);
    EXPECT_LE(max_pointwise_gap(q.d, conj(p.c)), 1e-10);
    EXPECT_EQ(q.n1, -p.n2);
    EXPECT_EQ(q.n2, -p.n1);
    EXPECT_EQ(q.nu1, -p.nu2);
    EXPECT_EQ(q.nu2, -p.nu1);
  }
}

// ------------------------------------------------------------ factorization

TEST(Factorization, Zeta) {
  const Factorization f = wiener_hopf_factor(Symbol::zeta());
  EXPECT_EQ(f.g_minus, Symbol::constant(1.0));
  EXPECT_EQ(f.g_plus, Symbol::constant(1.0));
  EXPECT_EQ(f.nu, 0.0);
  EXPECT_EQ(f.n, 1);
  const FactorizationReport rep = verify_factorization(f, Symbol::zeta());
  EXPECT_LE(rep.max_relative_error, 1e-12);
  EXPECT_TRUE(rep.plus_certified && rep.minus_certified);
}

TEST(Factorization, RationalWithWindingOne) {
  const Symbol g = zpk(1.0, {2.0 * i1}, {-3.0 * i1});
  const Factorization f = wiener_hopf_factor(g);
  EXPECT_EQ(f.n, 1);
  EXPECT_EQ(f.nu, 0.0);
  EXPECT_LE(max_pointwise_gap(f.g_minus, zpk(1.0, {2.0 * i1}, {i1})), 1e-12);
  EXPECT_LE(max_pointwise_gap(f.g_plus, zpk(1.0, {-i1}, {-3.0 * i1})), 1e-12);
  EXPECT_TRUE(verify_factorization(f, g).ok(1e-10));
}

TEST(Factorization, ExponentialTimesZetaPower) {
  const Symbol g = Symbol::exponential(2.0) * Symbol::zeta(-2);
  const Factorization f = wiener_hopf_factor(g);
  EXPECT_EQ(f.g_minus, Symbol::constant(1.0));
  EXPECT_EQ(f.g_plus, Symbol::constant(1.0));
  EXPECT_EQ(f.nu, 2.0);
  EXPECT_EQ(f.n, -2);
}

TEST(Factorization, MatchingZetaInverseSquared) {
  const Factorization f = matching_factor(Symbol::zeta(-2));
  EXPECT_LE(max_pointwise_gap(f.g_plus, Symbol::constant(1.0)), 1e-14);
  EXPECT_LE(max_pointwise_gap(f.g_minus, Symbol::constant(1.0)), 1e-14);
  EXPECT_EQ(f.sigma, 1);
}

TEST(Factorization, MatchingFromSymbolAlgebra) {
  const Symbol a = zpk(1.0, {-i1}, {i1});  // (t + i)/(t - i)
  const Symbol d = a * inv(reflect(a));
  EXPECT_LE(max_pointwise_gap(d, Symbol::zeta(-2)), 1e-12);
  const Factorization f = matching_factor(d);
  EXPECT_EQ(f.n, -2);
  EXPECT_EQ(f.sigma, 1);
  EXPECT_LE(max_pointwise_gap(f.g_plus, Symbol::constant(1.0)), 1e-12);
}

TEST(Factorization, MatchingExampleB) {
  const Symbol b = example_b();
  const Factorization f = matching_factor(b);
  EXPECT_EQ(f.n, 0);
  EXPECT_EQ(f.sigma, 1);
  EXPECT_NEAR(std::abs(f.g_minus(0.0) - 1.0), 0.0, 1e-14);
  // g_minus = sigma / g_plus~ and the product reconstructs b.
  for (double t : real_sample_points(50)) EXPECT_NEAR(std::abs(f.g_minus(t) * f.g_plus(-t) - 1.0), 0.0, 1e-12);
  EXPECT_TRUE(verify_factorization(f, b).ok(1e-10));
}

TEST(Factorization, SwappedFactorsFailCertificate) {
  const Symbol g = zpk(1.0, {2.0 * i1}, {-3.0 * i1});
  Factorization f = wiener_hopf_factor(g);
  std::swap(f.g_plus, f.g_minus);
  const FactorizationReport rep = verify_factorization(f, g);
  EXPECT_FALSE(rep.plus_certified);
  EXPECT_FALSE(rep.minus_certified);
  EXPECT_LT(rep.plus_margin, 0.0);
}

TEST(Factorization, RandomSymbolsReconstruct) {
  SymbolGenerator gen(20);
  for (int trial = 0; trial < 10; ++trial) {
    const Symbol g(gen.rational(10, 0.5), 0.5 * (trial % 5 - 2));
    const Factorization f = wiener_hopf_factor(g);
    const FactorizationReport rep = verify_factorization(f, g);
    EXPECT_LE(rep.max_relative_error, 1e-9) << "trial " << trial;
    EXPECT_GT(rep.plus_margin, 0.0);
    EXPECT_GT(rep.minus_margin, 0.0);
    EXPECT_EQ(f.n, winding_index(g));
    EXPECT_EQ(f.nu, ap_index(g));
  }
}

TEST(Factorization, UniqueUnderNormalization) {
  SymbolGenerator gen(21);
  for (int trial = 0; trial < 5; ++trial) {
    const Symbol g(gen.rational(4));
    const Factorization f1 = wiener_hopf_factor(g), f2 = wiener_hopf_factor(g);
    EXPECT_EQ(f1.g_minus, f2.g_minus);
    EXPECT_EQ(f1.g_plus, f2.g_plus);
  }
}

TEST(Factorization, MatchingSigmaAgreesWithSymbolSigma) {
  SymbolGenerator gen(22);
  for (int trial = 0; trial < 8; ++trial) {
    Symbol g = gen.matching_ratio(2) * Symbol::zeta(trial - 4);
    if (trial % 2) g = scale(-1.0, g);
    EXPECT_EQ(*matching_factor(g).sigma, sigma(g));
  }
}

// ---------------------------------------------------------------------- I/O

TEST(Io, SymbolRoundTrip) {
  SymbolGenerator gen(40);
  for (int trial = 0; trial < 5; ++trial) {
    const Symbol g = gen.symbol(3, {-1.0, 0.0, 2.5});
    const Symbol back = symbol_from_json(json::parse(to_json(g).dump()));
    EXPECT_LE(max_pointwise_gap(back, g), 1e-15);
    EXPECT_EQ(back.delta(), g.delta());
  }
}

TEST(Io, CoefficientSchema) {
  // zeta = (t - i)/(t + i), ascending coefficients.
  const Symbol g = symbol_from_json(json::parse(R"({"num": [[0,-1],[1,0]], "den": [[0,1],[1,0]]})"));
  EXPECT_LE(max_pointwise_gap(g, Symbol::zeta()), 1e-12);
  EXPECT_EQ(symbol_from_json(json::parse(R"({"delta": -2})")), Symbol::exponential(-2.0));
}

TEST(Io, FactorizationRoundTrip) {
  const Symbol g = zpk(1.0, {2.0 * i1}, {-3.0 * i1}, 1.0);
  const Factorization f = wiener_hopf_factor(g);
  const Factorization back = factorization_from_json(json::parse(to_json(f).dump()));
  EXPECT_LE(max_pointwise_gap(reassemble(back), g), 1e-12);
}

TEST(Io, MalformedInputsRaiseSchemaErrors) {
  for (const char* text : {R"([1, 2])", R"({"num": [1]})", R"({"delta": "x"})", R"({"zeros": [[1]]})",
                           R"({"num": [[1,0],[0,0],[1,0]], "den": [[1,0]]})"}) {
    try {
      symbol_from_json(json::parse(text));
      ADD_FAILURE() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::schema) << text;
    }
  }
  try {
    pair_from_json(json::parse(R"({"a": {"delta": 0}})"));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::schema);
  }
}

TEST(Io, RhsCsvAcceptsHeaderAndSubnormals) {
  std::stringstream in("t,re,im\n0.0,1.0,0\n0.5,2.5e-310,1\r\n1.0,3.0\n");
  const SampledFunction f = read_rhs_csv(in);
  ASSERT_EQ(f.t.size(), 3u);
  EXPECT_EQ(f.v[1], Complex(2.5e-310, 1.0));
  EXPECT_EQ(f.v[2], Complex(3.0, 0.0));
  std::stringstream bad("t,re\n0,1\n0,2\n");
  EXPECT_THROW(read_rhs_csv(bad), Error);
  std::stringstream junk("0,1\n1,abc\n");
  EXPECT_THROW(read_rhs_csv(junk), Error);
}

TEST(Io, MatrixBinaryRoundTrip) {
  CMatrix m(3, 2);
  m << Complex(1, 2), Complex(-3, 0.5), Complex(0, 0), Complex(7, -1), Complex(1e-300, 2), Complex(4, 4);
  std::stringstream buf;
  write_matrix_binary(m, buf);
  char magic[8];
  buf.read(magic, 8);
  EXPECT_EQ(std::string(magic, 8), "WHOPMTX1");
  buf.seekg(0);
  EXPECT_EQ(read_matrix_binary(buf, 3, 2), m);
}

}  // namespace
}  // namespace winhopf
