#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "winhopf/kernels.hpp"

namespace winhopf {

enum class Verdict { two_sided, left_only, right_only, generalized, not_one_sided, undetermined };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::two_sided: return "two_sided";
    case Verdict::left_only: return "left_only";
    case Verdict::right_only: return "right_only";
    case Verdict::generalized: return "generalized";
    case Verdict::not_one_sided: return "not_one_sided";
    case Verdict::undetermined: return "undetermined";
  }
  return "?";
}

/// A rule that fired: identifier plus the condition it checks.
struct Rule {
  std::string id;
  std::string condition;
};

/// Dimension prediction: a finite count, infinite, or unknown.
struct Dim {
  enum class Kind { finite, infinite, unknown };
  Kind kind = Kind::unknown;
  int value = 0;

  static Dim finite(int v) { return {Kind::finite, v}; }
  static Dim infinite() { return {Kind::infinite, 0}; }
  static Dim unknown() { return {Kind::unknown, 0}; }
  bool is_finite() const { return kind == Kind::finite; }
  std::string str() const {
    if (kind == Kind::finite) return std::to_string(value);
    return kind == Kind::infinite ? "infinite" : "unknown";
  }
  friend bool operator==(const Dim& x, const Dim& y) { return x.kind == y.kind && x.value == y.value; }
};

struct ClassificationReport {
  Verdict verdict = Verdict::undetermined;
  std::vector<Rule> fired_rules;
  Dim ker, coker;
  double nu1 = 0, nu2 = 0;
  int n1 = 0, n2 = 0, sigma = 1;
  /// Set when nu1 > 0 and nu2 < 0: the only available test is the
  /// necessary shift-kernel condition, whose "plausible" outcome does not
  /// imply invertibility.
  std::optional<std::string> pointer;

  bool fired(const std::string& id) const {
    for (const Rule& r : fired_rules)
      if (r.id == id) return true;
    return false;
  }
};

/// Indices of a subordinated pair; enough for every rule.
struct PairIndices {
  double nu1 = 0, nu2 = 0;
  int n1 = 0, n2 = 0, sigma = 1;

  static PairIndices of(const MatchingPair& p) { return {p.nu1, p.nu2, p.n1, p.n2, p.sigma_c}; }
  /// Indices of the adjoint pair (conj(a), conj(b~)), whose subordinated
  /// pair is (conj(d), conj(c)).
  PairIndices adjoint() const { return {-nu2, -nu1, -n2, -n1, sigma}; }
};

namespace rules {

/// Sufficient conditions for right invertibility. Returns the rules that fired.
inline std::vector<Rule> right_sufficient(const PairIndices& x) {
  std::vector<Rule> out;
  if (x.nu1 < 0 && x.nu2 < 0) out.push_back({"right:nu1<0,nu2<0", "nu1 < 0 and nu2 < 0"});
  if (x.nu1 < 0 && x.nu2 == 0 && (x.n2 < 1 || (x.n2 == 1 && x.sigma == -1)))
    out.push_back({"right:nu1<0,nu2=0", "nu1 < 0, nu2 = 0 and n2 < 1 or n2 = 1 with sigma(d) = -1"});
  if (x.nu1 == 0 && x.n1 <= 0 && x.nu2 < 0) out.push_back({"right:nu1=0,nu2<0", "nu1 = 0, n1 <= 0 and nu2 < 0"});
  if (x.nu1 == 0 && x.nu2 == 0 && x.n1 <= 0 && x.n2 < 1)
    out.push_back({"right:nu=0,n1<=0,n2<1", "nu1 = nu2 = 0, n1 <= 0, n2 < 1"});
  if (x.nu1 == 0 && x.nu2 == 0 && x.n1 <= 0 && x.n2 == 1 && x.sigma == -1)
    out.push_back({"right:nu=0,n1<=0,n2=1", "nu1 = nu2 = 0, n1 <= 0, n2 = 1 and sigma(d) = -1"});
  return out;
}

/// Mirrors a rule list obtained on the adjoint indices.
inline std::vector<Rule> mirrored(std::vector<Rule> rs, const std::string& side) {
  for (Rule& r : rs) {
    r.id = side + " (adjoint of " + r.id + ")";
    r.condition = "on adjoint indices: " + r.condition;
  }
  return rs;
}

inline std::vector<Rule> left_sufficient(const PairIndices& x) {
  return mirrored(right_sufficient(x.adjoint()), "left");
}

/// Violations of necessary conditions for one-sided invertibility of either
/// side (the sign pattern of the mean motions).
inline std::vector<Rule> one_sided_violations(const PairIndices& x) {
  std::vector<Rule> out;
  if (x.nu1 < 0 && x.nu2 > 0)
    out.push_back({"necessary:mean-motion-signs", "violated: nu1 nu2 >= 0 or (nu1 > 0 and nu2 < 0)"});
  if (x.nu1 == 0 && x.nu2 > 0 && !(x.n1 > -1 || (x.n1 == -1 && x.sigma == -1)))
    out.push_back({"necessary:nu1=0,nu2>0", "violated: n1 > -1 or n1 = -1 with sigma(c) = -1"});
  if (x.nu1 < 0 && x.nu2 == 0 && !(x.n2 < 1 || (x.n2 == 1 && x.sigma == -1)))
    out.push_back({"necessary:nu1<0,nu2=0", "violated: n2 < 1 or n2 = 1 with sigma(d) = -1"});
  return out;
}

/// Violations of necessary conditions for left invertibility when
/// nu1 = nu2 = 0.
inline std::vector<Rule> left_violations(const PairIndices& x) {
  std::vector<Rule> out;
  if (x.nu1 != 0 || x.nu2 != 0) return out;
  if (x.n2 >= x.n1) {
    const bool ok = x.n1 > -1 || (x.n1 == -1 && x.sigma == -1 && x.n2 > x.n1);
    if (!ok) out.push_back({"left-necessary:n2>=n1", "violated: n1 >= -1, and n1 = -1 needs sigma(c) = -1, n2 > n1"});
  } else {
    const bool ok = x.n1 >= 1 && (x.n2 >= 0 || x.n1 >= -x.n2);
    if (!ok) out.push_back({"left-necessary:n1>n2", "violated: n1 >= 1 and (n2 >= 0 or n1 >= -n2)"});
  }
  return out;
}

inline std::vector<Rule> right_violations(const PairIndices& x) {
  std::vector<Rule> out;
  if (x.nu1 != 0 || x.nu2 != 0) return out;
  if (x.n1 <= x.n2) {
    const bool ok = x.n2 < 1 || (x.n2 == 1 && x.sigma == -1 && x.n1 < x.n2);
    if (!ok) out.push_back({"right-necessary:n1<=n2", "violated: n2 <= 1, and n2 = 1 needs sigma(d) = -1, n1 < n2"});
  } else {
    const bool ok = x.n2 <= -1 && (x.n1 <= 0 || x.n1 <= -x.n2);
    if (!ok) out.push_back({"right-necessary:n1>n2", "violated: n2 <= -1 and (n1 <= 0 or n1 <= -n2)"});
  }
  return out;
}

}  // namespace rules

/// dim ker(W(a) + H(b)) from the kernel description, when it applies.
inline Dim predicted_kernel_dim(const PairIndices& x) {
  if (!wh_sides(x.nu1, x.n1).right) return Dim::unknown();
  if (x.nu1 < 0 || x.nu2 < 0) return Dim::infinite();
  int dim = 0;
  if (x.nu1 == 0) dim += projection_dim(x.n1, x.sigma, false);
  if (x.nu2 == 0) dim += projection_dim(x.n2, x.sigma, true);
  return Dim::finite(dim);
}

/// Verdict in the order: invertible subordinated operators, sufficient
/// right conditions, sufficient left conditions (through the adjoint pair),
/// violated necessary conditions, generalized-inverse operand cases, and
/// finally the undecided sign pattern nu1 > 0 > nu2. When both one-sided
/// conditions hold the operator is invertible and reported as two_sided.
inline ClassificationReport classify(const PairIndices& x) {
  ClassificationReport rep;
  rep.nu1 = x.nu1;
  rep.nu2 = x.nu2;
  rep.n1 = x.n1;
  rep.n2 = x.n2;
  rep.sigma = x.sigma;
  const std::vector<Rule> right = rules::right_sufficient(x);
  const std::vector<Rule> left = rules::left_sufficient(x);
  std::vector<Rule> one_sided = rules::one_sided_violations(x);
  std::vector<Rule> lv = rules::left_violations(x);
  std::vector<Rule> rv = rules::right_violations(x);
  auto append = [&](const std::vector<Rule>& rs) { rep.fired_rules.insert(rep.fired_rules.end(), rs.begin(), rs.end()); };

  const bool all_zero = x.nu1 == 0 && x.nu2 == 0 && x.n1 == 0 && x.n2 == 0;
  if (all_zero) {
    rep.verdict = Verdict::two_sided;
    rep.fired_rules.push_back({"two-sided:W(c),W(d)-invertible", "nu1 = nu2 = 0 and n1 = n2 = 0"});
  } else if (!right.empty() && !left.empty()) {
    rep.verdict = Verdict::two_sided;
    append(right);
    append(left);
  } else if (!right.empty()) {
    rep.verdict = Verdict::right_only;
    append(right);
  } else if (!left.empty()) {
    rep.verdict = Verdict::left_only;
    append(left);
  } else {
    const bool both_impossible = !one_sided.empty() || (!lv.empty() && !rv.empty());
    const Sides sc = wh_sides(x.nu1, x.n1);
    const Sides sd = wh_sides(x.nu2, x.n2);
    if (both_impossible) {
      rep.verdict = Verdict::not_one_sided;
      append(one_sided);
      append(lv);
      append(rv);
      if (sc.right && sd.left)
        rep.pointer = "a generalized inverse exists with W(c) right and W(d) left inverse operands";
    }
    // Both-right and both-left operand cases are covered by the sufficient
    // conditions above, so only the mixed case (W(c) left, W(d) right) is left.
    const bool mixed = sc.left && sd.right;
    const bool open_signs = x.nu1 > 0 && x.nu2 < 0;
    if (!both_impossible && open_signs) {
      rep.verdict = Verdict::undetermined;
      rep.pointer = "nu1 > 0 > nu2: normal solvability is open; run the shift-kernel condition check "
                    "(a necessary condition only)";
    } else if (!both_impossible && mixed) {
      rep.verdict = Verdict::generalized;
      rep.fired_rules.push_back({"generalized:c-left,d-right", "W(c) left and W(d) right invertible"});
      rep.pointer = "the generalized inverse from W(c) left and W(d) right inverse operands can fail; "
                    "A G A = A is checked when it is constructed";
    }
  }

  rep.ker = predicted_kernel_dim(x);
  rep.coker = predicted_kernel_dim(x.adjoint());
  if (rep.verdict == Verdict::two_sided || rep.verdict == Verdict::left_only) rep.ker = Dim::finite(0);
  if (rep.verdict == Verdict::two_sided || rep.verdict == Verdict::right_only) rep.coker = Dim::finite(0);
  return rep;
}

inline ClassificationReport classify(const MatchingPair& p) { return classify(PairIndices::of(p)); }

enum class ShiftKernelVerdict { plausible, violated, inconclusive };

inline const char* shift_kernel_verdict_name(ShiftKernelVerdict v) {
  switch (v) {
    case ShiftKernelVerdict::plausible: return "plausible";
    case ShiftKernelVerdict::violated: return "violated";
    case ShiftKernelVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

struct ShiftKernelReport {
  ShiftKernelVerdict verdict = ShiftKernelVerdict::inconclusive;
  /// Smallest principal angle between phi+(im P+_d) and the functions
  /// vanishing on (0, nu1/2); pi/2 when the first space is trivial.
  double smallest_angle = pi / 2;
  int subspace_dim = 0;
};

inline ShiftKernelVerdict shift_kernel_verdict(double angle) {
  if (angle <= 1e-6) return ShiftKernelVerdict::violated;
  if (angle >= 1e-2) return ShiftKernelVerdict::plausible;
  return ShiftKernelVerdict::inconclusive;
}

/// Necessary condition for left invertibility when nu1 > 0 and n1 = n2 = 0:
/// phi+(im P+_d), with phi+ built from the shifted pair
/// (a e^{-i nu1 t/2}, b e^{i nu1 t/2}), meets the functions vanishing on
/// (0, nu1/2) only in zero. Grid backend only; nu1/2 must be on the grid.
/// For nu2 < 0 the kernel of W(d) is W(d+^-1) applied to functions supported
/// on [0, |nu2|], represented by the grid's node functions there.
inline ShiftKernelReport check_shift_kernel_condition(const MatchingPair& p, const Grid& grid) {
  if (!(p.nu1 > 0 && p.nu2 <= 0 && p.n1 == 0 && p.n2 == 0))
    throw Error(ErrorCode::precondition, "shift-kernel condition needs nu1 > 0, nu2 <= 0 and n1 = n2 = 0");
  const Discretization disc = grid;
  ShiftKernelReport rep;
  if (p.nu2 == 0) {
    rep.verdict = ShiftKernelVerdict::plausible;
    return rep;
  }
  const double half = 0.5 * p.nu1;
  grid.shift_steps(half);
  const MatchingPair shifted = make_matching_pair(p.a * Symbol::exponential(-half), p.b * Symbol::exponential(half));

  const Factorization fd = matching_factor(p.d);
  const RVector& t = grid.nodes();
  std::vector<Index> support;
  for (Index i = 0; i < t.size(); ++i)
    if (t[i] < -p.nu2) support.push_back(i);
  CMatrix seeds = CMatrix::Zero(grid.size(), Index(support.size()));
  for (std::size_t k = 0; k < support.size(); ++k) seeds(support[k], Index(k)) = 1.0;
  const CMatrix ker_d = build_W(inv(fd.g_plus), disc).apply(seeds);
  const DiscreteOperator proj = scale(0.5, add(DiscreteOperator::identity(disc), op_flipped_hankel(p.d, disc)));
  const CMatrix image = phi_plus(shifted, disc).apply(proj.apply(ker_d));

  // Orthonormal basis in the weighted inner product, keeping numerically
  // independent directions only.
  const RVector sw = grid.weights().cwiseSqrt();
  const CMatrix weighted = sw.asDiagonal() * image;
  Eigen::BDCSVD<CMatrix> svd(weighted, Eigen::ComputeThinU);
  const RVector s = svd.singularValues();
  Index rank = 0;
  while (rank < s.size() && s[rank] > 1e-10 * s[0]) ++rank;
  rep.subspace_dim = int(rank);
  if (rank == 0) {
    rep.verdict = ShiftKernelVerdict::plausible;
    return rep;
  }
  const CMatrix Q = svd.matrixU().leftCols(rank);
  Index head = 0;
  while (head < t.size() && t[head] < half) ++head;
  // sin of the smallest angle to the functions vanishing on (0, nu1/2) is the
  // smallest norm of a unit vector of span(Q) restricted to that interval.
  const RVector restricted = Q.topRows(head).bdcSvd().singularValues();
  const double smin = rank > head ? 0.0 : restricted[rank - 1];
  rep.smallest_angle = std::asin(std::min(1.0, smin));
  rep.verdict = shift_kernel_verdict(rep.smallest_angle);
  return rep;
}

}  // namespace winhopf
