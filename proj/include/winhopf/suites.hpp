#pragma once

#include <algorithm>
#include <chrono>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "winhopf/harness.hpp"

namespace winhopf {

/// One measured quantity against its threshold.
struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string note;
};

struct SuiteResult {
  std::string id;
  std::string title;
  std::vector<Check> checks;
  double seconds = 0.0;

  bool passed() const {
    for (const Check& c : checks)
      if (!c.passed) return false;
    return !checks.empty();
  }

  /// value <= tolerance
  void at_most(const std::string& name, double value, double tolerance, std::string note = {}) {
    checks.push_back({name, value, tolerance, value <= tolerance, std::move(note)});
  }
  /// value >= tolerance
  void at_least(const std::string& name, double value, double tolerance, std::string note = {}) {
    checks.push_back({name, value, tolerance, value >= tolerance, std::move(note)});
  }
  void exact(const std::string& name, bool ok, std::string note = {}) {
    checks.push_back({name, ok ? 0.0 : 1.0, 0.0, ok, std::move(note)});
  }
};

/// Settings shared by the suites; defaults are the desk-scale sizes.
struct SuiteConfig {
  double T = 40.0;
  int N = 2560;
  int modes = 200;
  std::uint64_t seed = 20240611;
  int test_vectors = 20;

  Grid grid() const { return Grid(T, N); }
};

namespace suites {

inline double two_sided_residual(const DiscreteOperator& A, const DiscreteOperator& X, const CMatrix& v,
                                 const Discretization& disc, double* right = nullptr, double* left = nullptr) {
  const double r = residual_to_identity(compose(A, X), v, disc);
  const double l = residual_to_identity(compose(X, A), v, disc);
  if (right) *right = r;
  if (left) *left = l;
  return std::max(r, l);
}

inline Symbol zpk(Complex gain, std::vector<Complex> zeros, std::vector<Complex> poles, double delta = 0.0) {
  return Symbol(Rational::from_zpk(gain, std::move(zeros), std::move(poles)), delta);
}

/// Product identities on 25 random exponential-rational pairs, at the base
/// grid and at doubled T and N.
inline SuiteResult product_identities(const SuiteConfig& cfg) {
  SuiteResult s{"product-identities", "W(ab) = W(a)W(b) + H(a)H(b~) and H(ab) = W(a)H(b) + H(a)W(b~)", {}, 0};
  SymbolGenerator gen(cfg.seed + 1);
  const std::vector<double> deltas = {-1.0, -0.5, 0.0, 0.0, 0.5, 1.0};
  const Discretization base = cfg.grid();
  const Discretization fine = Grid(2 * cfg.T, 2 * cfg.N);
  const TestVectorSet tv(cfg.seed + 2, 4);
  const CMatrix vb = tv.matrix(base), vf = tv.matrix(fine);
  double worst = 0.0, worst_fine = 0.0;
  const double roundoff_floor = 1e-12;
  int grew = 0, at_floor = 0;
  std::ostringstream stalled;
  stalled.precision(3);
  for (int k = 0; k < 25; ++k) {
    const Symbol a = gen.symbol(1 + k % 3, deltas);
    const Symbol b = gen.symbol(1 + (k + 1) % 3, deltas);
    const IdentityReport r0 = identity_suite(a, b, base, vb);
    const IdentityReport r1 = identity_suite(a, b, fine, vf);
    const double e0 = std::max(r0.w_identity, r0.h_identity);
    const double e1 = std::max(r1.w_identity, r1.h_identity);
    worst = std::max(worst, e0);
    worst_fine = std::max(worst_fine, e1);
    // Pairs already at the rounding floor on the base grid cannot shrink further.
    if (e0 > roundoff_floor && e1 >= e0) {
      ++grew;
      stalled << " #" << k << " " << e0 << " -> " << e1;
    } else if (e0 <= roundoff_floor) {
      ++at_floor;
    }
  }
  s.at_most("max identity residual, T=" + std::to_string(int(cfg.T)) + " N=" + std::to_string(cfg.N), worst, 1e-5);
  s.at_most("max identity residual at doubled T, N (must be below the base value)", worst_fine, worst * (1 - 1e-12));
  s.at_most("pairs above the 1e-12 rounding floor whose residual did not shrink", grew, 0,
            std::to_string(at_floor) + " pairs already at the floor" + stalled.str());
  return s;
}

/// Factorization of 50 random invertible symbols.
inline SuiteResult factorizations(const SuiteConfig& cfg) {
  SuiteResult s{"factorization", "Wiener-Hopf factorization of random symbols", {}, 0};
  SymbolGenerator gen(cfg.seed + 3);
  double worst = 0.0, winding_gap = 0.0;
  bool certified = true, winding_ok = true;
  for (int k = 0; k < 50; ++k) {
    const Symbol g = gen.symbol(1 + k % 10, {-2.0, -1.0, 0.0, 1.5});
    const Factorization f = wiener_hopf_factor(g);
    const FactorizationReport r = verify_factorization(f, g);
    worst = std::max(worst, r.max_relative_error);
    certified = certified && r.plus_certified && r.minus_certified;
    const double w = numerical_winding(g);
    winding_gap = std::max(winding_gap, std::abs(w - f.n));
    winding_ok = winding_ok && std::lround(w) == f.n;
  }
  s.at_most("max reconstruction error", worst, 1e-9);
  s.exact("half-plane certificates", certified);
  s.exact("n equals the numerical winding integral", winding_ok,
          "max |winding - n| = " + std::to_string(winding_gap));
  return s;
}

/// One-sided inverses of W(g), one instance per case.
inline SuiteResult one_sided_inverses(const SuiteConfig& cfg) {
  SuiteResult s{"wh-one-sided", "one-sided inverses of W(g) from the factorization", {}, 0};
  const Discretization disc = cfg.grid();
  const CMatrix v = TestVectorSet(cfg.seed + 4, cfg.test_vectors).matrix(disc);
  // A rational factor with nontrivial plus and minus parts and winding 0.
  const Symbol r = zpk(1.5, {{0.5, 2.0}, {-1.0, -3.0}}, {{0.3, 3.0}, {1.0, -2.0}});
  const std::vector<Symbol> cases = {Symbol::exponential(1.0) * Symbol::zeta(1) * r,
                                     Symbol::exponential(1.0) * Symbol::zeta(-1) * r,
                                     Symbol::exponential(-1.0) * Symbol::zeta(-1) * r,
                                     Symbol::exponential(-1.0) * Symbol::zeta(2) * r, Symbol::zeta(2) * r};
  for (const Symbol& g : cases) {
    const InverseRecipe rec = wh_one_sided_inverse(g, disc);
    const DiscreteOperator prod =
        rec.kind == InverseKind::left ? compose(rec.assembled, rec.target) : compose(rec.target, rec.assembled);
    s.at_most(std::string(rec.formula_id) + " " + kind_name(rec.kind) + " identity", residual_to_identity(prod, v, disc),
              1e-6);
    if (rec.diagnostics.count("neumann_vs_dense")) {
      s.at_most(std::string(rec.formula_id) + " Neumann series tail bound", rec.diagnostics.at("neumann_tail_bound"),
                1e-10);
      s.at_most(std::string(rec.formula_id) + " Neumann series vs dense solve", rec.diagnostics.at("neumann_vs_dense"),
                1e-8, std::to_string(int(rec.diagnostics.at("neumann_terms"))) + " terms");
    }
  }
  return s;
}

/// a = e^{i nu1 t}, b = e^{i nu2 t} with nu1 = -2, nu2 = 1. The closed-form
/// simplification H(e^{-i nu1 t})W(e^{-i(nu1+nu2)t}) + W(e^{-i nu1 t}) is
/// compared with the assembled right inverse.
inline SuiteResult exponential_example(const SuiteConfig& cfg) {
  SuiteResult s{"exponential-example", "right inverse for a = e^{-2it}, b = e^{it}", {}, 0};
  const Discretization disc = cfg.grid();
  const CMatrix v = TestVectorSet(cfg.seed + 5, cfg.test_vectors).matrix(disc);
  const double nu1 = -2.0, nu2 = 1.0;
  const MatchingPair p = make_matching_pair(Symbol::exponential(nu1), Symbol::exponential(nu2));
  const InverseRecipe B = whh_right_inverse(p, disc);
  const DiscreteOperator simplified = add(compose(build_H(Symbol::exponential(-nu1), disc),
                                                  build_W(Symbol::exponential(-(nu1 + nu2)), disc)),
                                          build_W(Symbol::exponential(-nu1), disc));
  s.at_most("assembled right inverse vs closed-form simplification", residual(B.assembled, &simplified, v, disc), 1e-8,
            "the simplification is not a right inverse; see README");
  // Only H(e^{-i(nu1-nu2)t}) W(e^{-i(nu1-nu2)t}) W(e^{-i nu2 t}) vanishes; the
  // product W(e^{-i(nu1-nu2)t}) W(e^{-i nu2 t}) stays.
  const DiscreteOperator kept = add(compose(build_W(Symbol::exponential(-(nu1 - nu2)), disc),
                                            build_W(Symbol::exponential(-nu2), disc)),
                                    compose(build_H(Symbol::exponential(-nu1), disc),
                                            build_W(Symbol::exponential(-(nu1 + nu2)), disc)));
  s.at_most("assembled right inverse vs corrected simplification", residual(B.assembled, &kept, v, disc), 1e-8);
  s.at_most("(W + H) times corrected simplification = I", residual_to_identity(compose(B.target, kept), v, disc), 1e-6);
  s.at_most("(W + H) B = I", residual_to_identity(compose(B.target, B.assembled), v, disc), 1e-6);
  return s;
}

/// The closed-form two-sided inverses for a = b, b = a~ and a = 1.
inline SuiteResult closed_form_inverses(const SuiteConfig& cfg) {
  SuiteResult s{"closed-form-inverses", "closed-form inverses for a = b, b = a~, a = 1", {}, 0};
  const Discretization disc = cfg.grid();
  const CMatrix v = TestVectorSet(cfg.seed + 6, cfg.test_vectors).matrix(disc);
  const DiscreteOperator I = DiscreteOperator::identity(disc);
  auto W = [&](const Symbol& g) { return build_W(g, disc); };
  auto H = [&](const Symbol& g) { return build_H(g, disc); };
  auto Winv = [&](const Symbol& g) { return wh_one_sided_inverse(g, disc).assembled; };
  // n(a) = 0 so that d = a / a~ has winding 0.
  const Symbol a = zpk(2.0, {{0.5, 2.0}, {-1.0, -1.5}}, {{0.0, 1.0}, {1.0, -2.5}});
  {
    const MatchingPair p = make_matching_pair(a, a);
    const Symbol at_inv = inv(reflect(a));
    const DiscreteOperator X = compose(add(W(at_inv), H(inv(a))), Winv(a * at_inv));
    double r = 0, l = 0;
    two_sided_residual(whh_operator(p, disc), X, v, disc, &r, &l);
    s.at_most("a = b: (W + H) X = I", r, 1e-6);
    s.at_most("a = b: X (W + H) = I", l, 1e-6);
  }
  {
    const Symbol at = reflect(a);
    const MatchingPair p = make_matching_pair(a, at);
    const DiscreteOperator X =
        add(compose({subtract(I, H(at * inv(a))), Winv(a * inv(at)), W(inv(at))}), H(inv(a)));
    double r = 0, l = 0;
    two_sided_residual(whh_operator(p, disc), X, v, disc, &r, &l);
    s.at_most("b = a~: (W + H) X = I", r, 1e-6);
    s.at_most("b = a~: X (W + H) = I", l, 1e-6);
    const DiscreteOperator general = whh_two_sided_inverse(p, disc).assembled;
    s.at_most("b = a~: closed form vs general two-sided formula", residual(X, &general, v, disc), 1e-8);
  }
  {
    const Symbol b = zpk(1.0, {{0.0, 1.0}, {0.0, -2.0}}, {{0.0, -1.0}, {0.0, 2.0}});
    const MatchingPair p = make_matching_pair(Symbol::constant(1.0), b);
    const DiscreteOperator X = compose({subtract(I, H(b)), Winv(reflect(b)), Winv(b)});
    double r = 0, l = 0;
    two_sided_residual(whh_operator(p, disc), X, v, disc, &r, &l);
    s.at_most("a = 1: (I + H(b)) X = I", r, 1e-6);
    s.at_most("a = 1: X (I + H(b)) = I", l, 1e-6);
  }
  return s;
}

/// Kernel dimensions: nullity of W(a) + H(a) for a = zeta^-m, and the
/// P+/P- split for winding -1.
inline SuiteResult kernel_dimensions(const SuiteConfig& cfg) {
  SuiteResult s{"kernel-dimensions", "dim ker for a = b = zeta^-m and the P+/P- split for n = -1", {}, 0};
  const LaguerreBasis basis(cfg.modes);
  const Discretization disc = basis;
  for (int m = 1; m <= 3; ++m) {
    const MatchingPair p = make_matching_pair(Symbol::zeta(-m), Symbol::zeta(-m));
    const RankGap rg = whh_nullity(p, disc);
    s.exact("m = " + std::to_string(m) + ": nullity = m", rg.nullity == m, "nullity " + std::to_string(rg.nullity));
    s.at_least("m = " + std::to_string(m) + ": singular value gap", rg.gap_ratio, 1e4);
  }
  for (int sg : {1, -1}) {
    // sigma(s zeta^-1 h/h~) = s for h/h~ matching with value 1 at 0.
    const Symbol h = zpk(1.0, {{0.5, -2.0}}, {{-1.0, -1.5}});
    const Symbol g = scale(double(sg), Symbol::zeta(-1) * h * inv(reflect(h)));
    const KernelBasis kb = kernel_basis(g, disc);
    const std::string tag = "sigma = " + std::to_string(sg) + ": ";
    s.exact(tag + "dim P+ = (1 - sigma)/2", kb.plus_dim() == (1 - sg) / 2);
    s.exact(tag + "dim P- = (1 + sigma)/2", kb.minus_dim() == (1 + sg) / 2);
    const CMatrix vecs = kb.vectors();
    const DiscreteOperator Wg = build_W(g, disc), Hgt = build_H(reflect(g), disc);
    double annihilated = 0.0, eigen = 0.0;
    for (Index k = 0; k < vecs.cols(); ++k) {
      const CVector x = vecs.col(k);
      const double sign = k < kb.plus_dim() ? 1.0 : -1.0;
      annihilated = std::max(annihilated, Wg.apply(x).norm() / x.norm());
      eigen = std::max(eigen, (Hgt.apply(x) - sign * x).norm() / x.norm());
    }
    s.at_most(tag + "basis annihilated by W(g)", annihilated, 1e-6);
    s.at_most(tag + "H(g~) v = +-v on the P+- basis", eigen, 1e-8);
  }
  return s;
}

/// Generalized inverses for the mixed sides of W(c), W(d). With W(c) right
/// and W(d) left invertible A G A = A holds for every pair. With W(c) left
/// and W(d) right invertible it holds when W(a~^-1) maps ker W(d) into
/// im W(c) (and for some other pairs); the construction must refuse when it
/// fails.
inline SuiteResult generalized_inverse(const SuiteConfig& cfg) {
  SuiteResult s{"generalized-inverse", "A G A = A for the mixed operand cases", {}, 0};
  const Discretization grid = cfg.grid();
  const Discretization lag = LaguerreBasis(cfg.modes);
  const Symbol r0 = zpk(1.5, {{0.5, 2.0}}, {{-1.0, 1.5}});
  const Symbol h = zpk(1.0, {{0.5, -2.0}}, {{-1.0, -1.5}});
  const Symbol ratio = h * inv(reflect(h));
  auto check = [&](const std::string& tag, const MatchingPair& p, int operand_case, const Discretization& disc) {
    const CMatrix v = TestVectorSet(cfg.seed + 7, cfg.test_vectors).matrix(disc);
    const InverseRecipe G = whh_generalized_inverse(p, disc);
    const DiscreteOperator AGA = compose({G.target, G.assembled, G.target});
    const std::string where = tag + (std::holds_alternative<Grid>(disc) ? " [grid]" : " [laguerre]");
    s.exact(where + ": operand case " + std::to_string(operand_case), G.diagnostics.at("operand_case") == operand_case);
    s.at_most(where + ": A G A = A", residual(AGA, &G.target, v, disc), 1e-5);
  };
  // The short form -H(c~)(...) + H(a^-1) D (I - H(d)) + W(a^-1) on the same
  // operands, kept to show it does not satisfy the identity.
  {
    const MatchingPair p = pair_from(r0, Symbol::zeta(-2) * ratio);
    InverseRecipe scratch;
    const DiscreteOperator Rc = detail::side_inverse(p.c, lag, true, scratch, "c");
    const DiscreteOperator Ld = detail::side_inverse(p.d, lag, false, scratch, "d");
    const Symbol at = inv(reflect(p.a));
    const DiscreteOperator ImHd = subtract(DiscreteOperator::identity(lag), build_H(p.d, lag));
    const DiscreteOperator u = add(compose({Rc, build_W(at, lag), Ld, ImHd}), compose(Rc, build_H(at, lag)));
    const DiscreteOperator shortG =
        linear_combination({compose(build_H(reflect(p.c), lag), u), compose({build_H(inv(p.a), lag), Ld, ImHd}),
                            build_W(inv(p.a), lag)},
                           {-1.0, 1.0, 1.0});
    const DiscreteOperator A = whh_operator(p, lag);
    const CMatrix v = TestVectorSet(cfg.seed + 7, cfg.test_vectors).matrix(lag);
    s.at_least("short form without identity term and 1/2 misses A G A = A [laguerre]",
               residual(compose({A, shortG, A}), &A, v, lag), 1e-3, "documents the corrected closed form");
  }
  // W(c) right, W(d) left invertible.
  const std::vector<std::pair<std::string, MatchingPair>> right_left = {
      {"a = r0, c = zeta^-2 h/h~", pair_from(r0, Symbol::zeta(-2) * ratio)},
      {"a = r0, c = -zeta^-1 h/h~", pair_from(r0, scale(-1.0, Symbol::zeta(-1) * ratio))},
      {"a = zeta r0, c = zeta^-1 h/h~", pair_from(Symbol::zeta(1) * r0, Symbol::zeta(-1) * ratio)},
  };
  for (const auto& [tag, p] : right_left) {
    check(tag, p, 3, grid);
    check(tag, p, 3, lag);
  }
  check("a = 1, c = e^{-it} h/h~", pair_from(Symbol::constant(1.0), Symbol::exponential(-1.0) * ratio), 3, grid);
  // W(c) left, W(d) right invertible, identity satisfied.
  const std::vector<std::pair<std::string, MatchingPair>> left_right = {
      {"a = 1, b = zeta^-2", make_matching_pair(Symbol::constant(1.0), Symbol::zeta(-2))},
      {"a = r0, c = zeta^2", pair_from(r0, Symbol::zeta(2))},
      {"a = zeta r0, c = zeta^4", pair_from(Symbol::zeta(1) * r0, Symbol::zeta(4))},
  };
  for (const auto& [tag, p] : left_right) {
    check(tag, p, 4, grid);
    check(tag, p, 4, lag);
  }
  // W(c) left, W(d) right invertible, identity violated.
  const MatchingPair bad = pair_from(r0, Symbol::zeta(2) * ratio);
  for (const Discretization& disc : {grid, lag}) {
    const std::string where = std::string("a = r0, c = zeta^2 h/h~") +
                              (std::holds_alternative<Grid>(disc) ? " [grid]" : " [laguerre]");
    bool refused = false;
    std::string note;
    try {
      whh_generalized_inverse(bad, disc);
    } catch (const Error& e) {
      refused = e.code() == ErrorCode::precondition;
      note = e.what();
    }
    s.exact(where + ": construction refused, A G A = A fails", refused, note);
  }
  return s;
}

/// Classification of a 30-pair corpus against numerical nullities, adjoint
/// duality and the subordinated-pair identities.
struct CorpusEntry {
  Symbol a;
  Symbol c;
};

inline std::vector<CorpusEntry> classification_corpus(std::uint64_t seed) {
  SymbolGenerator gen(seed);
  auto ratio = [&]() { return gen.matching_ratio(1); };
  auto r0 = [&]() {
    // winding 0 rational factor
    return Symbol(Rational::from_zpk(gen.unit(), {gen.root(0.5, 3.0, 1)}, {gen.root(0.5, 3.0, 1)}));
  };
  std::vector<CorpusEntry> out;
  // (delta_a, n_a, s, nu1, n1): d then has nu2 = 2 delta_a - nu1, n2 = 2 n_a - n1.
  struct IndexCase {
    double delta_a;
    int n_a;
    int s;
    double nu1;
    int n1;
  };
  const std::vector<IndexCase> cases = {
      {0, 0, 1, 0, 0},     {0, 0, -1, 0, 0},    {0, -1, 1, 0, 0},    {0, -1, 1, 0, -1},   {0, -1, -1, 0, -1},
      {0, -2, 1, 0, -1},   {0, 1, 1, 0, 0},     {0, 1, 1, 0, 1},     {0, 1, -1, 0, 1},    {0, 0, 1, 0, 2},
      {0, 0, 1, 0, -2},    {0, 1, 1, 0, 3},     {0, -1, 1, 0, -3},   {0, 0, 1, 0, 1},     {0, 0, -1, 0, -1},
      {0, 2, 1, 0, 1},     {0, -2, -1, 0, -1},  {0.5, 0, 1, 0, -2},  {0.5, 0, 1, 0, 0},   {-0.5, 0, 1, 0, 2},
      {-0.5, 0, 1, 0, 0},  {0, 0, 1, -1, 0},    {0, 0, 1, 1, 0},     {0.5, 0, 1, 1, 0},   {-0.5, 0, 1, -1, 0},
      {0.5, 0, -1, 0, -1}, {-0.5, 0, -1, 0, 1}, {0, 1, 1, -1, 0},    {0, -1, 1, 1, 0},    {0.5, 1, 1, 0, -1},
  };
  for (const IndexCase& ic : cases) {
    const Symbol a = Symbol::exponential(ic.delta_a) * Symbol::zeta(ic.n_a) * r0();
    const Symbol c = scale(double(ic.s), Symbol::exponential(ic.nu1) * Symbol::zeta(ic.n1) * ratio());
    out.push_back({a, c});
  }
  return out;
}

inline SuiteResult classification(const SuiteConfig& cfg) {
  SuiteResult s{"classification", "verdicts against nullities, adjoint duality, subordinated-pair identities", {}, 0};
  const LaguerreBasis basis(cfg.modes);
  // Panels of width 0.5 hold every frequency of the corpus.
  const Grid small(cfg.T, 8 * int(std::lround(cfg.T / 0.5)));
  int compared = 0, matched = 0, duality = 0, bookkeeping = 0, coherent = 0;
  std::string mismatches;
  const std::vector<CorpusEntry> corpus = classification_corpus(cfg.seed + 8);
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const MatchingPair p = pair_from(corpus[k].a, corpus[k].c);
    const MatchingPair q = adjoint_pair(p);
    const ClassificationReport rp = classify(p), rq = classify(q);
    auto dual = [](Verdict v) {
      if (v == Verdict::left_only) return Verdict::right_only;
      if (v == Verdict::right_only) return Verdict::left_only;
      return v;
    };
    if (rq.verdict == dual(rp.verdict) && rq.ker == rp.coker && rq.coker == rp.ker) ++duality;
    if (p.sigma_c == p.sigma_d && (p.n1 + p.n2) % 2 == 0 && q.sigma_c == p.sigma_d && q.n1 == -p.n2 &&
        q.n2 == -p.n1 && q.nu1 == -p.nu2 && q.nu2 == -p.nu1)
      ++bookkeeping;
    const PairIndices x = PairIndices::of(p);
    const bool right_conflict = !rules::right_sufficient(x).empty() &&
                                (!rules::right_violations(x).empty() || !rules::one_sided_violations(x).empty());
    const bool left_conflict = !rules::left_sufficient(x).empty() &&
                               (!rules::left_violations(x).empty() || !rules::one_sided_violations(x).empty());
    if (!right_conflict && !left_conflict) ++coherent;
    const bool rational = p.a.is_rational() && p.b.is_rational();
    const Discretization disc = rational ? Discretization(basis) : Discretization(small);
    for (int side = 0; side < 2; ++side) {
      const Dim predicted = side == 0 ? rp.ker : rp.coker;
      if (!predicted.is_finite()) continue;
      const RankGap rg = whh_nullity(side == 0 ? p : q, disc);
      ++compared;
      if (rg.nullity == predicted.value)
        ++matched;
      else
        mismatches += " pair " + std::to_string(k) + (side ? " coker " : " ker ") + std::to_string(predicted.value) +
                      " vs " + std::to_string(rg.nullity) + ";";
    }
  }
  const int n = int(corpus.size());
  s.exact("finite predicted dims match SVD nullity (" + std::to_string(matched) + "/" + std::to_string(compared) + ")",
          matched == compared && compared > 0, mismatches);
  s.exact("adjoint duality of verdicts and dims (" + std::to_string(duality) + "/" + std::to_string(n) + ")",
          duality == n);
  s.exact("sigma(c) = sigma(d), parity, adjoint indices (" + std::to_string(bookkeeping) + "/" + std::to_string(n) + ")",
          bookkeeping == n);
  s.exact("no sufficient rule fires together with a violated necessary rule", coherent == n);
  return s;
}

/// Grid and Laguerre realizations of W(g) f and H(g) f.
inline SuiteResult backend_agreement(const SuiteConfig& cfg) {
  SuiteResult s{"backend-agreement", "grid vs Laguerre applications of W(g), H(g)", {}, 0};
  const Grid grid = cfg.grid();
  const LaguerreBasis basis(cfg.modes);
  SymbolGenerator gen(cfg.seed + 9);
  const TestVectorSet tv(cfg.seed + 10, 10);
  double worst_w = 0.0, worst_h = 0.0;
  for (int k = 0; k < 3; ++k) {
    const Symbol g(gen.rational(1 + k));
    for (const TestFunction& f : tv.functions) {
      const BackendDiscrepancy d = cross_backend(g, f, grid, basis);
      worst_w = std::max(worst_w, d.w);
      worst_h = std::max(worst_h, d.h);
    }
  }
  s.at_most("W(g) f grid vs Laguerre", worst_w, 1e-4);
  s.at_most("H(g) f grid vs Laguerre", worst_h, 1e-4);
  return s;
}

struct SuiteEntry {
  std::string id;
  std::function<SuiteResult(const SuiteConfig&)> run;
};

inline const std::vector<SuiteEntry>& acceptance_suites() {
  static const std::vector<SuiteEntry> all = {
      {"product-identities", product_identities},   {"factorization", factorizations},
      {"wh-one-sided", one_sided_inverses},         {"exponential-example", exponential_example},
      {"closed-form-inverses", closed_form_inverses}, {"kernel-dimensions", kernel_dimensions},
      {"generalized-inverse", generalized_inverse}, {"classification", classification},
      {"backend-agreement", backend_agreement},
  };
  return all;
}

/// Suites selected by a group name ("acceptance" or "all", "closed-form-examples")
/// or by a single suite id; empty when the name is unknown.
inline std::vector<SuiteEntry> suite_group(const std::string& name) {
  const std::vector<SuiteEntry>& all = acceptance_suites();
  if (name == "acceptance" || name == "all") return all;
  std::vector<std::string> ids;
  if (name == "closed-form-examples")
    ids = {"exponential-example", "closed-form-inverses", "kernel-dimensions"};
  else
    ids = {name};
  std::vector<SuiteEntry> out;
  for (const SuiteEntry& e : all)
    if (std::find(ids.begin(), ids.end(), e.id) != ids.end()) out.push_back(e);
  return out;
}

/// "PASS id (t s)" followed by one indented line per check.
inline void print_result(const SuiteResult& r, std::ostream& out) {
  out << (r.passed() ? "PASS " : "FAIL ") << r.id << ": " << r.title << " (" << r.seconds << " s)\n";
  for (const Check& c : r.checks) {
    out << "    " << (c.passed ? "ok   " : "FAIL ") << c.name << " = " << c.value << " (limit " << c.tolerance
        << ")";
    if (!c.note.empty()) out << "  [" << c.note << "]";
    out << '\n';
  }
}

inline SuiteResult run_timed(const SuiteEntry& e, const SuiteConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  SuiteResult r;
  try {
    r = e.run(cfg);
  } catch (const std::exception& ex) {
    r.id = e.id;
    r.title = "raised an error";
    r.exact("completed without error", false, ex.what());
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace suites
}  // namespace winhopf
