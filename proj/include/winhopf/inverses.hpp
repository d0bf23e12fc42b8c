#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "winhopf/factorization.hpp"
#include "winhopf/matching.hpp"
#include "winhopf/operators.hpp"
#include "winhopf/test_functions.hpp"

namespace winhopf {

enum class InverseKind { left, right, two_sided, generalized };

inline const char* kind_name(InverseKind k) {
  switch (k) {
    case InverseKind::left: return "left";
    case InverseKind::right: return "right";
    case InverseKind::two_sided: return "two_sided";
    case InverseKind::generalized: return "generalized";
  }
  return "?";
}

/// Formula identifiers. One-sided inverses of W(g) are named by the sign
/// pattern of (nu, n); operators W(a) + H(b) by the kind of inverse.
namespace formula {
inline constexpr const char* left_nu_pos_n_nonneg = "wh-left:nu>0,n>=0";
inline constexpr const char* left_nu_pos_n_neg = "wh-left:nu>0,n<0";
inline constexpr const char* right_nu_neg_n_nonpos = "wh-right:nu<0,n<=0";
inline constexpr const char* right_nu_neg_n_pos = "wh-right:nu<0,n>0";
inline constexpr const char* nu_zero = "wh:nu=0";
inline constexpr const char* whh_right = "whh-right";
inline constexpr const char* whh_left = "whh-left";
inline constexpr const char* whh_two_sided = "whh-two-sided";
inline constexpr const char* whh_generalized = "whh-generalized";
}  // namespace formula

/// An assembled inverse together with the data it was built from.
struct InverseRecipe {
  InverseKind kind = InverseKind::two_sided;
  std::string formula_id;
  /// Labelled factorizations ("g", "c", "d").
  std::vector<std::pair<std::string, Factorization>> factors;
  std::vector<std::pair<std::string, Symbol>> symbols;
  DiscreteOperator assembled;
  /// The operator being inverted.
  DiscreteOperator target;
  /// Numerical side results (Neumann cross-check, operand case, ...).
  std::map<std::string, double> diagnostics;
  std::vector<std::string> notes;
};

/// Side on which W(g) is invertible, from the indices of g.
struct Sides {
  bool left = false;
  bool right = false;
};

inline Sides wh_sides(double nu, int n) {
  Sides s;
  s.right = nu < 0 || (nu == 0 && n <= 0);
  s.left = nu > 0 || (nu == 0 && n >= 0);
  return s;
}

inline Sides wh_sides(const Symbol& g) { return wh_sides(ap_index(g), winding_index(g)); }

namespace detail {

/// Truncated Neumann series for (I - K)^-1 applied to `v`, stopped when the
/// geometric tail estimate drops below `tail_tol` relative to |v|.
struct NeumannResult {
  CMatrix value;
  int terms = 0;
  double tail_bound = 0.0;
};

inline NeumannResult neumann_apply(const DiscreteOperator& K, const CMatrix& v, const Discretization& disc,
                                   double tail_tol = 1e-10, int max_terms = 2000) {
  auto block_norm = [&](const CMatrix& x) {
    double m = 0.0;
    for (Index j = 0; j < x.cols(); ++j) m = std::max(m, backend_norm(disc, x.col(j)) / std::max(1e-300, backend_norm(disc, v.col(j))));
    return m;
  };
  NeumannResult r;
  r.value = v;
  CMatrix term = v;
  double prev = 1.0;
  for (r.terms = 1; r.terms < max_terms; ++r.terms) {
    term = K.apply(term);
    r.value += term;
    const double cur = block_norm(term);
    const double q = prev > 0 ? cur / prev : 0.0;
    r.tail_bound = q < 1 ? cur * q / (1 - q) : std::numeric_limits<double>::infinity();
    prev = cur;
    if (cur == 0.0 || r.tail_bound < tail_tol) break;
  }
  return r;
}

/// Dense inverse of I - K, cross-checked against the Neumann series on a few
/// probe functions.
inline DiscreteOperator middle_inverse(const DiscreteOperator& K, const Discretization& disc,
                                       std::map<std::string, double>& diagnostics) {
  const DiscreteOperator M = subtract(DiscreteOperator::identity(disc), K);
  const DiscreteOperator Minv = dense_inverse(M);
  const CMatrix probes = TestVectorSet(7, 6).matrix(disc);
  const CMatrix dense = Minv.apply(probes);
  const NeumannResult series = neumann_apply(K, probes, disc);
  double diff = 0.0;
  for (Index j = 0; j < probes.cols(); ++j)
    diff = std::max(diff, backend_norm(disc, dense.col(j) - series.value.col(j)) / backend_norm(disc, probes.col(j)));
  diagnostics["neumann_terms"] = series.terms;
  diagnostics["neumann_tail_bound"] = series.tail_bound;
  diagnostics["neumann_vs_dense"] = diff;
  return Minv.with_recipe("(I-" + K.recipe() + ")^-1");
}

}  // namespace detail

/// One-sided (or two-sided) inverse of W(g) from the factorization
/// g = g_- e^{i nu t} zeta^n g_+:
///   nu > 0, n >= 0: W(g+^-1) V^(-n) U_-nu W(g-^-1)                          (left)
///   nu > 0, n < 0:  W(g+^-1) (I - U_-nu P_m U_nu)^-1 U_-nu V^(m) W(g-^-1)   (left, m = -n)
///   nu < 0, n <= 0: W(g+^-1) V^(-n) U_-nu W(g-^-1)                          (right)
///   nu < 0, n > 0:  W(g+^-1) V^(-n) U_-nu (I - U_nu P_n U_-nu)^-1 W(g-^-1)  (right)
///   nu = 0:         W(g+^-1) V^(-n) W(g-^-1)      (left if n >= 0, right if n <= 0)
inline InverseRecipe wh_one_sided_inverse(const Symbol& g, const Discretization& disc) {
  const Factorization f = wiener_hopf_factor(g);
  const double nu = f.nu;
  const int n = f.n;
  const DiscreteOperator Wp = build_W(inv(f.g_plus), disc);
  const DiscreteOperator Wm = build_W(inv(f.g_minus), disc);
  InverseRecipe r;
  r.factors.push_back({"g", f});
  r.symbols.push_back({"g", g});
  r.target = build_W(g, disc);
  if (nu > 0 && n >= 0) {
    r.kind = InverseKind::left;
    r.formula_id = formula::left_nu_pos_n_nonneg;
    r.assembled = compose({Wp, op_V(-n, disc), op_U(-nu, disc), Wm});
  } else if (nu > 0) {
    const int m = -n;
    r.kind = InverseKind::left;
    r.formula_id = formula::left_nu_pos_n_neg;
    const DiscreteOperator K = compose({op_U(-nu, disc), op_P(m, disc), op_U(nu, disc)});
    const DiscreteOperator mid = detail::middle_inverse(K, disc, r.diagnostics);
    r.assembled = compose({Wp, mid, op_U(-nu, disc), op_V(m, disc), Wm});
  } else if (nu < 0 && n <= 0) {
    r.kind = InverseKind::right;
    r.formula_id = formula::right_nu_neg_n_nonpos;
    r.assembled = compose({Wp, op_V(-n, disc), op_U(-nu, disc), Wm});
  } else if (nu < 0) {
    r.kind = InverseKind::right;
    r.formula_id = formula::right_nu_neg_n_pos;
    const DiscreteOperator K = compose({op_U(nu, disc), op_P(n, disc), op_U(-nu, disc)});
    const DiscreteOperator mid = detail::middle_inverse(K, disc, r.diagnostics);
    r.assembled = compose({Wp, op_V(-n, disc), op_U(-nu, disc), mid, Wm});
  } else {
    r.kind = n == 0 ? InverseKind::two_sided : (n > 0 ? InverseKind::left : InverseKind::right);
    r.formula_id = formula::nu_zero;
    r.assembled = compose({Wp, op_V(-n, disc), Wm});
  }
  r.assembled = r.assembled.with_recipe(std::string(kind_name(r.kind)) + " inverse of W[" + describe(g) +
                                        "] via " + r.formula_id);
  return r;
}

inline DiscreteOperator whh_operator(const MatchingPair& p, const Discretization& disc) {
  return add(build_W(p.a, disc), build_H(p.b, disc)).with_recipe("W[a]+H[b]");
}

namespace detail {

inline DiscreteOperator side_inverse(const Symbol& g, const Discretization& disc, bool want_right,
                                     InverseRecipe& into, const std::string& label) {
  InverseRecipe r = wh_one_sided_inverse(g, disc);
  const bool ok = r.kind == InverseKind::two_sided ||
                  (want_right ? r.kind == InverseKind::right : r.kind == InverseKind::left);
  if (!ok)
    throw Error(ErrorCode::precondition, "W(" + label + ") is not " + (want_right ? "right" : "left") +
                                             " invertible (" + kind_name(r.kind) + " only)");
  into.factors.push_back({label, r.factors.front().second});
  for (const auto& [key, value] : r.diagnostics) into.diagnostics[label + "." + key] = value;
  return r.assembled;
}

inline InverseRecipe whh_base(const MatchingPair& p, const Discretization& disc) {
  InverseRecipe r;
  r.target = whh_operator(p, disc);
  r.symbols = {{"a", p.a}, {"b", p.b}, {"c", p.c}, {"d", p.d}};
  return r;
}

}  // namespace detail

/// Right inverse (I - H(c~)) A + H(a^-1) W_r^-1(d) with
/// A = W_r^-1(c) W(a~^-1) W_r^-1(d); needs W(c), W(d) right invertible.
inline InverseRecipe whh_right_inverse(const MatchingPair& p, const Discretization& disc) {
  InverseRecipe r = detail::whh_base(p, disc);
  const DiscreteOperator Rc = detail::side_inverse(p.c, disc, true, r, "c");
  const DiscreteOperator Rd = detail::side_inverse(p.d, disc, true, r, "d");
  const DiscreteOperator I = DiscreteOperator::identity(disc);
  const Symbol a_tilde_inv = inv(reflect(p.a));
  const DiscreteOperator A = compose({Rc, build_W(a_tilde_inv, disc), Rd});
  r.kind = InverseKind::right;
  r.formula_id = formula::whh_right;
  r.assembled = add(compose(subtract(I, build_H(reflect(p.c), disc)), A), compose(build_H(inv(p.a), disc), Rd))
                    .with_recipe("right inverse of W[a]+H[b] via " + r.formula_id);
  return r;
}

/// Left inverse C (I - H(d)) + W_l^-1(c) H(a~^-1) with
/// C = W_l^-1(c) W(a~^-1) W_l^-1(d); needs W(c), W(d) left invertible.
inline InverseRecipe whh_left_inverse(const MatchingPair& p, const Discretization& disc) {
  InverseRecipe r = detail::whh_base(p, disc);
  const DiscreteOperator Lc = detail::side_inverse(p.c, disc, false, r, "c");
  const DiscreteOperator Ld = detail::side_inverse(p.d, disc, false, r, "d");
  const DiscreteOperator I = DiscreteOperator::identity(disc);
  const Symbol a_tilde_inv = inv(reflect(p.a));
  const DiscreteOperator C = compose({Lc, build_W(a_tilde_inv, disc), Ld});
  r.kind = InverseKind::left;
  r.formula_id = formula::whh_left;
  r.assembled = add(compose(C, subtract(I, build_H(p.d, disc))), compose(Lc, build_H(a_tilde_inv, disc)))
                    .with_recipe("left inverse of W[a]+H[b] via " + r.formula_id);
  r.notes.push_back("the annihilating factor is I - H(d), as obtained from the adjoint of the right inverse");
  return r;
}

/// Inverse (I - H(c~)) W^-1(c) W(a~^-1) W^-1(d) + H(a^-1) W^-1(d) when W(c) and
/// W(d) are invertible.
inline InverseRecipe whh_two_sided_inverse(const MatchingPair& p, const Discretization& disc) {
  if (!(p.nu1 == 0 && p.nu2 == 0 && p.n1 == 0 && p.n2 == 0))
    throw Error(ErrorCode::precondition, "two-sided inverse needs W(c) and W(d) invertible (all indices zero)");
  InverseRecipe r = whh_right_inverse(p, disc);
  r.kind = InverseKind::two_sided;
  r.formula_id = formula::whh_two_sided;
  r.assembled = r.assembled.with_recipe("inverse of W[a]+H[b] via " + r.formula_id);
  return r;
}

/// Generalized inverse, the (1,1) block of the transported block inverse
///   G = (1/2)[(I - H(c~))(A(I - H(d)) - B H(a~^-1)) + H(a^-1) D (I - H(d)) + W(a^-1)]
/// where [[A, B], [D, 0]] is a generalized inverse of
/// [[0, W(d)], [-W(c), W(a~^-1)]]. The short form
/// -H(c~)(...) + H(a^-1) D (I - H(d)) + W(a^-1), without the identity term
/// and the factor 1/2, fails A G A = A.
/// Operands are chosen by the sides on which W(c), W(d) are invertible:
///   both right:          A = Rc W(a~^-1) Rd, B = -Rc, D = Rd
///   both left:           A = Lc W(a~^-1) Ld, B = -Lc, D = Ld
///   c right and d left:  A = Rc W(a~^-1) Ld, B = -Rc, D = Ld
///   c left and d right:  A = Lc W(a~^-1) Rd, B = -Lc, D = Rd, which fails
///                        for some pairs and is verified on probe vectors
inline InverseRecipe whh_generalized_inverse(const MatchingPair& p, const Discretization& disc) {
  const Sides sc = wh_sides(p.nu1, p.n1);
  const Sides sd = wh_sides(p.nu2, p.n2);
  InverseRecipe r = detail::whh_base(p, disc);
  bool c_right = false, d_right = false;
  if (sc.right && sd.right) {
    c_right = d_right = true;
    r.diagnostics["operand_case"] = 1;
  } else if (sc.left && sd.left) {
    r.diagnostics["operand_case"] = 2;
  } else if (sc.right && sd.left) {
    c_right = true;
    r.diagnostics["operand_case"] = 3;
  } else if (sc.left && sd.right) {
    d_right = true;
    r.diagnostics["operand_case"] = 4;
  } else {
    throw Error(ErrorCode::precondition, "generalized inverse needs W(c) and W(d) each one-sided invertible");
  }
  const DiscreteOperator Xc = detail::side_inverse(p.c, disc, c_right, r, "c");
  const DiscreteOperator Xd = detail::side_inverse(p.d, disc, d_right, r, "d");
  const DiscreteOperator I = DiscreteOperator::identity(disc);
  const Symbol a_tilde_inv = inv(reflect(p.a));
  const DiscreteOperator Wat = build_W(a_tilde_inv, disc);
  const DiscreteOperator A = compose({Xc, Wat, Xd});
  const DiscreteOperator B = scale(-1.0, Xc);
  const DiscreteOperator& D = Xd;
  const DiscreteOperator ImHd = subtract(I, build_H(p.d, disc));
  const DiscreteOperator inner = subtract(compose(A, ImHd), compose(B, build_H(a_tilde_inv, disc)));
  r.kind = InverseKind::generalized;
  r.formula_id = formula::whh_generalized;
  r.assembled = linear_combination({compose(subtract(I, build_H(reflect(p.c), disc)), inner),
                                    compose({build_H(inv(p.a), disc), D, ImHd}), build_W(inv(p.a), disc)},
                                   {0.5, 0.5, 0.5})
                    .with_recipe("generalized inverse of W[a]+H[b] via " + r.formula_id);
  if (r.diagnostics["operand_case"] == 4) {
    // Here the block operator [[0, W(d)], [-W(c), W(a~^-1)]] is reproduced
    // only up to (I - W(c) Lc) W(a~^-1) (I - Rd W(d)), which need not vanish,
    // so the identity A G A = A is checked before the result is returned.
    const CMatrix probes = TestVectorSet(11, 6).matrix(disc);
    const CMatrix Av = r.target.apply(probes);
    const CMatrix defect = r.target.apply(r.assembled.apply(Av)) - Av;
    double rel = 0.0;
    for (Index k = 0; k < Av.cols(); ++k)
      rel = std::max(rel, backend_norm(disc, defect.col(k)) / std::max(backend_norm(disc, Av.col(k)), 1e-300));
    r.diagnostics["aga_defect"] = rel;
    if (rel > 1e-4)
      throw Error(ErrorCode::precondition,
                  "operands with W(c) left and W(d) right invertible do not give a generalized inverse for this "
                  "pair (relative A G A - A defect " + std::to_string(rel) + ")");
  }
  return r;
}

}  // namespace winhopf
