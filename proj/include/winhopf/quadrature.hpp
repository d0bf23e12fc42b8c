#pragma once

#include <cmath>
#include <vector>

#include "winhopf/types.hpp"

namespace winhopf {

/// Gauss-Legendre rule on [-1, 1] with nodes in ascending order.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline GaussRule gauss_legendre(int n) {
  GaussRule rule{std::vector<double>(std::size_t(n)), std::vector<double>(std::size_t(n))};
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[std::size_t(i)] = -x;
    rule.nodes[std::size_t(n - 1 - i)] = x;
    rule.weights[std::size_t(i)] = w;
    rule.weights[std::size_t(n - 1 - i)] = w;
  }
  return rule;
}

/// Values of the Lagrange basis polynomials over `nodes` at the point x.
inline std::vector<double> lagrange_basis(const std::vector<double>& nodes, double x) {
  std::vector<double> out(nodes.size(), 1.0);
  for (std::size_t b = 0; b < nodes.size(); ++b)
    for (std::size_t c = 0; c < nodes.size(); ++c)
      if (c != b) out[b] *= (x - nodes[c]) / (nodes[b] - nodes[c]);
  return out;
}

/// Composite Gauss-Legendre nodes and weights for consecutive panels of given
/// widths starting at `start`.
inline void append_composite_rule(double start, double end, double panel, const GaussRule& rule,
                                  std::vector<double>& nodes, std::vector<double>& weights) {
  const int panels = std::max(1, int(std::ceil((end - start) / panel - 1e-12)));
  const double h = (end - start) / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = start + p * h;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      nodes.push_back(a + 0.5 * h * (1.0 + rule.nodes[q]));
      weights.push_back(0.5 * h * rule.weights[q]);
    }
  }
}

}  // namespace winhopf
