#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "winhopf/symbol.hpp"

namespace winhopf {

/// A validated pair (a, b) with a(t)a(-t) = b(t)b(-t), its subordinated pair
/// c = a/b, d = a/b~, and their indices and signatures.
struct MatchingPair {
  Symbol a, b, c, d;
  double nu1 = 0.0, nu2 = 0.0;
  int n1 = 0, n2 = 0;
  int sigma_c = 1, sigma_d = 1;
};

inline MatchingPair make_matching_pair(const Symbol& a, const Symbol& b) {
  require_invertible(a);
  require_invertible(b);
  for (double t : real_sample_points(200)) {
    const Complex lhs = a(t) * a(-t);
    const Complex rhs = b(t) * b(-t);
    if (std::abs(lhs - rhs) > 1e-10 * std::abs(lhs))
      throw Error(ErrorCode::not_matching, "a(t)a(-t) != b(t)b(-t)");
  }
  MatchingPair p;
  p.a = a;
  p.b = b;
  p.c = a * inv(b);
  p.d = a * inv(reflect(b));
  p.nu1 = ap_index(p.c);
  p.nu2 = ap_index(p.d);
  p.n1 = winding_index(p.c);
  p.n2 = winding_index(p.d);
  p.sigma_c = sigma(p.c);
  p.sigma_d = sigma(p.d);
  // Both identities follow from c = d * (b~/b) with b~/b matching of signature 1.
  if (p.sigma_c != p.sigma_d || (p.n1 + p.n2) % 2 != 0)
    throw std::logic_error("subordinated pair violates sigma(c) = sigma(d) or index parity");
  return p;
}

/// The pair (conj(a), conj(b~)) whose operator is the adjoint of W(a) + H(b).
inline MatchingPair adjoint_pair(const MatchingPair& p) {
  return make_matching_pair(conj(p.a), conj(reflect(p.b)));
}

/// Sum of two symbols sharing the same exponential frequency. A numerator that
/// cancels to rounding level is replaced by an exact zero.
inline Symbol add_same_frequency(const Symbol& f, const Symbol& g) {
  if (f.delta() != g.delta())
    throw Error(ErrorCode::precondition, "symbols with different frequencies cannot be added");
  const Rational& r = f.rat();
  const Rational& s = g.rat();
  const ComplexPoly pr = r.numerator() * s.denominator();
  const ComplexPoly ps = s.numerator() * r.denominator();
  std::vector<Complex> sum(std::max(pr.coeffs().size(), ps.coeffs().size()), Complex(0.0));
  double scale = 0.0;
  for (std::size_t k = 0; k < pr.coeffs().size(); ++k) {
    sum[k] += pr.coeffs()[k];
    scale = std::max(scale, std::abs(pr.coeffs()[k]));
  }
  for (std::size_t k = 0; k < ps.coeffs().size(); ++k) {
    sum[k] += ps.coeffs()[k];
    scale = std::max(scale, std::abs(ps.coeffs()[k]));
  }
  double size = 0.0;
  for (const Complex& c : sum) size = std::max(size, std::abs(c));
  if (size <= 1e-12 * scale) return Symbol(Rational::constant(0.0), f.delta());
  return Symbol(Rational::from_polys(ComplexPoly(sum), r.denominator() * s.denominator()), f.delta());
}

/// Block symbol [[a - b b~ a~^-1, b a~^-1], [-b~ a~^-1, a~^-1]] attached to the
/// pair. For matching pairs the upper-left entry vanishes, the upper-right is d
/// and the lower-left is -c.
inline std::array<std::array<Symbol, 2>, 2> build_block_symbol(const MatchingPair& p) {
  const Symbol a_tilde_inv = inv(reflect(p.a));
  const Symbol b_tilde = reflect(p.b);
  return {{{add_same_frequency(p.a, scale(-1.0, p.b * b_tilde * a_tilde_inv)), p.b * a_tilde_inv},
           {scale(-1.0, b_tilde * a_tilde_inv), a_tilde_inv}}};
}

}  // namespace winhopf
