#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/LU>

#include "winhopf/discretization.hpp"
#include "winhopf/error.hpp"
#include "winhopf/kernel.hpp"
#include "winhopf/types.hpp"

namespace winhopf {

namespace detail {

/// Square linear map acting on blocks of column vectors.
class LinearMap {
 public:
  virtual ~LinearMap() = default;
  virtual Index size() const = 0;
  /// y = A x; y is resized by the callee.
  virtual void apply(const CMatrix& x, CMatrix& y) const = 0;
};

using MapPtr = std::shared_ptr<const LinearMap>;

class DenseMap final : public LinearMap {
 public:
  explicit DenseMap(CMatrix m) : m_(std::move(m)) {}
  Index size() const override { return m_.rows(); }
  void apply(const CMatrix& x, CMatrix& y) const override { y.noalias() = m_ * x; }
  const CMatrix& matrix() const { return m_; }

 private:
  CMatrix m_;
};

class IdentityMap final : public LinearMap {
 public:
  explicit IdentityMap(Index n) : n_(n) {}
  Index size() const override { return n_; }
  void apply(const CMatrix& x, CMatrix& y) const override { y = x; }

 private:
  Index n_;
};

class ZeroMap final : public LinearMap {
 public:
  explicit ZeroMap(Index n) : n_(n) {}
  Index size() const override { return n_; }
  void apply(const CMatrix& x, CMatrix& y) const override { y = CMatrix::Zero(n_, x.cols()); }

 private:
  Index n_;
};

class SumMap final : public LinearMap {
 public:
  SumMap(std::vector<MapPtr> terms, std::vector<Complex> coeffs)
      : terms_(std::move(terms)), coeffs_(std::move(coeffs)) {}
  Index size() const override { return terms_.front()->size(); }
  void apply(const CMatrix& x, CMatrix& y) const override {
    y = CMatrix::Zero(size(), x.cols());
    CMatrix tmp;
    for (std::size_t k = 0; k < terms_.size(); ++k) {
      terms_[k]->apply(x, tmp);
      y += coeffs_[k] * tmp;
    }
  }

 private:
  std::vector<MapPtr> terms_;
  std::vector<Complex> coeffs_;
};

/// factors[0] * factors[1] * ... applied right to left.
class ProductMap final : public LinearMap {
 public:
  explicit ProductMap(std::vector<MapPtr> factors) : factors_(std::move(factors)) {}
  Index size() const override { return factors_.front()->size(); }
  void apply(const CMatrix& x, CMatrix& y) const override {
    CMatrix cur = x;
    for (auto it = factors_.rbegin(); it != factors_.rend(); ++it) {
      (*it)->apply(cur, y);
      cur.swap(y);
    }
    y.swap(cur);
  }
  const std::vector<MapPtr>& factors() const { return factors_; }

 private:
  std::vector<MapPtr> factors_;
};

/// Solves with the LU factorization of a materialized matrix.
class LuSolveMap final : public LinearMap {
 public:
  explicit LuSolveMap(const CMatrix& m) : lu_(m) {}
  Index size() const override { return lu_.rows(); }
  void apply(const CMatrix& x, CMatrix& y) const override { y = lu_.solve(x); }

 private:
  Eigen::PartialPivLU<CMatrix> lu_;
};

/// Shift by a whole number of panels: (U x)(t) = x(t - steps*h), zero fill.
class PanelShiftMap final : public LinearMap {
 public:
  PanelShiftMap(int panels, int steps) : panels_(panels), steps_(steps) {}
  Index size() const override { return Index(panels_) * Grid::order; }
  void apply(const CMatrix& x, CMatrix& y) const override {
    y = CMatrix::Zero(size(), x.cols());
    for (int p = 0; p < panels_; ++p) {
      const int src = p - steps_;
      if (src >= 0 && src < panels_)
        y.middleRows(Index(p) * Grid::order, Grid::order) = x.middleRows(Index(src) * Grid::order, Grid::order);
    }
  }

 private:
  int panels_;
  int steps_;
};

/// (F x)(t) = x(delta - t) on [0, delta], zero beyond; delta = steps*h. The
/// Gauss nodes are symmetric within a panel, so the flip permutes nodes.
class PanelFlipMap final : public LinearMap {
 public:
  PanelFlipMap(int panels, int steps) : panels_(panels), steps_(steps) {}
  Index size() const override { return Index(panels_) * Grid::order; }
  void apply(const CMatrix& x, CMatrix& y) const override {
    y = CMatrix::Zero(size(), x.cols());
    for (int p = 0; p < std::min(steps_, panels_); ++p) {
      const int src = steps_ - 1 - p;
      if (src < 0 || src >= panels_) continue;
      for (int q = 0; q < Grid::order; ++q)
        y.row(Index(p) * Grid::order + q) = x.row(Index(src) * Grid::order + (Grid::order - 1 - q));
    }
  }

 private:
  int panels_;
  int steps_;
};

inline double binomial(int n, int k) {
  double b = 1.0;
  for (int j = 1; j <= k; ++j) b = b * (n - k + j) / j;
  return b;
}

/// Nystrom discretization of x -> r_inf x + int_0^T k(t - s) x(s) ds for an
/// exponential-polynomial kernel, applied in O(N) per column.
///
/// Far panels are summed through running moments of the exponential terms,
/// which are propagated panel to panel; the panel holding the target node uses
/// product integration against the Lagrange interpolant of the panel values,
/// because the kernel has a kink at t = s.
class GridConvolutionMap final : public LinearMap {
 public:
  GridConvolutionMap(const Grid& grid, const ExpPolyKernel& kernel, Complex r_inf)
      : panels_(grid.panels()), r_inf_(r_inf) {
    const double h = grid.panel_width();
    std::vector<double> u(Grid::order), w(Grid::order);
    for (int q = 0; q < Grid::order; ++q) {
      u[std::size_t(q)] = 0.5 * h * (1.0 + grid.rule().nodes[std::size_t(q)]);
      w[std::size_t(q)] = 0.5 * h * grid.rule().weights[std::size_t(q)];
    }
    causal_ = build_sweep(kernel.causal, h, u, w, false);
    anticausal_ = build_sweep(kernel.anticausal, h, u, w, true);
  }

  Index size() const override { return Index(panels_) * Grid::order; }

  void apply(const CMatrix& x, CMatrix& y) const override {
    y = r_inf_ * x;
    const Index m = x.cols();
    constexpr int P = Grid::order;
    if (causal_.states > 0) {
      CMatrix s = CMatrix::Zero(causal_.states, m);
      for (int p = 0; p < panels_; ++p) {
        const auto xp = x.middleRows(Index(p) * P, P);
        y.middleRows(Index(p) * P, P) += causal_.target * s + causal_.local * xp;
        s = causal_.propagate * s + causal_.source * xp;
      }
    }
    if (anticausal_.states > 0) {
      CMatrix s = CMatrix::Zero(anticausal_.states, m);
      for (int p = panels_ - 1; p >= 0; --p) {
        const auto xp = x.middleRows(Index(p) * P, P);
        y.middleRows(Index(p) * P, P) += anticausal_.target * s + anticausal_.local * xp;
        s = anticausal_.propagate * s + anticausal_.source * xp;
      }
    }
  }

 private:
  struct Sweep {
    Index states = 0;
    CMatrix target;     // P x states
    CMatrix source;     // states x P
    CMatrix propagate;  // states x states
    CMatrix local;      // P x P
  };

  /// For the causal sweep a node at offset u from its panel start sees a far
  /// source at distance u + v, v measured back from the panel start. The
  /// anticausal sweep mirrors this with offsets measured from the panel end.
  static Sweep build_sweep(const std::vector<KernelTerm>& terms, double h, const std::vector<double>& u,
                           const std::vector<double>& w, bool mirrored) {
    constexpr int P = Grid::order;
    Sweep sw;
    for (const KernelTerm& k : terms) sw.states += k.power + 1;
    sw.local = CMatrix::Zero(P, P);
    if (sw.states == 0) return sw;
    sw.target = CMatrix::Zero(P, sw.states);
    sw.source = CMatrix::Zero(sw.states, P);
    sw.propagate = CMatrix::Zero(sw.states, sw.states);
    Index base = 0;
    for (const KernelTerm& k : terms) {
      const Complex decay = std::exp(-k.rate * h);
      for (int q = 0; q <= k.power; ++q) {
        for (int r = 0; r <= q; ++r)
          sw.propagate(base + q, base + r) = decay * binomial(q, r) * std::pow(h, q - r);
        for (int a = 0; a < P; ++a) {
          // distance from target node to the reference end of its panel
          const double gap = mirrored ? h - u[std::size_t(a)] : u[std::size_t(a)];
          sw.target(a, base + q) =
              k.coeff * binomial(k.power, q) * std::pow(gap, k.power - q) * std::exp(-k.rate * gap);
          // distance from source node to the reference end of the next panel
          const double reach = mirrored ? u[std::size_t(a)] : h - u[std::size_t(a)];
          sw.source(base + q, a) = w[std::size_t(a)] * std::pow(reach, q) * std::exp(-k.rate * reach);
        }
      }
      base += k.power + 1;
    }
    // Product integration inside the target panel.
    const GaussRule fine = gauss_legendre(24);
    for (int a = 0; a < P; ++a) {
      const double lo = mirrored ? u[std::size_t(a)] : 0.0;
      const double hi = mirrored ? h : u[std::size_t(a)];
      for (std::size_t f = 0; f < fine.nodes.size(); ++f) {
        const double s = lo + 0.5 * (hi - lo) * (1.0 + fine.nodes[f]);
        const double ws = 0.5 * (hi - lo) * fine.weights[f];
        const double dist = mirrored ? s - u[std::size_t(a)] : u[std::size_t(a)] - s;
        Complex kv(0.0);
        for (const KernelTerm& k : terms) kv += k(dist);
        const std::vector<double> ell = lagrange_basis(u, s);
        for (int b = 0; b < P; ++b) sw.local(a, b) += ws * kv * ell[std::size_t(b)];
      }
    }
    return sw;
  }

  int panels_;
  Complex r_inf_;
  Sweep causal_;
  Sweep anticausal_;
};

/// Nystrom discretization of x -> int_0^T k(t + s) x(s) ds for the causal part
/// of an exponential-polynomial kernel; the kernel separates as a short sum of
/// products f(t) g(s).
class GridHankelMap final : public LinearMap {
 public:
  GridHankelMap(const Grid& grid, const ExpPolyKernel& kernel) {
    Index states = 0;
    for (const KernelTerm& k : kernel.causal) states += k.power + 1;
    const Index n = grid.size();
    left_ = CMatrix::Zero(n, states);
    right_ = CMatrix::Zero(states, n);
    Index base = 0;
    for (const KernelTerm& k : kernel.causal) {
      for (int q = 0; q <= k.power; ++q)
        for (Index i = 0; i < n; ++i) {
          const double t = grid.nodes()[i];
          const Complex e = std::exp(-k.rate * t);
          left_(i, base + q) = k.coeff * binomial(k.power, q) * std::pow(t, k.power - q) * e;
          right_(base + q, i) = grid.weights()[i] * std::pow(t, q) * e;
        }
      base += k.power + 1;
    }
    n_ = n;
  }

  Index size() const override { return n_; }
  void apply(const CMatrix& x, CMatrix& y) const override {
    if (left_.cols() == 0) {
      y = CMatrix::Zero(n_, x.cols());
      return;
    }
    y.noalias() = left_ * (right_ * x);
  }

 private:
  Index n_ = 0;
  CMatrix left_;
  CMatrix right_;
};

}  // namespace detail

/// Immutable finite realization of an operator on one discretization. Built
/// operators are composed lazily; `matrix()` materializes the full matrix.
class DiscreteOperator {
 public:
  DiscreteOperator()
      : backend_(Backend::grid), map_(std::make_shared<detail::IdentityMap>(0)), recipe_("empty") {}
  DiscreteOperator(Backend backend, detail::MapPtr map, std::string recipe)
      : backend_(backend), map_(std::move(map)), recipe_(std::move(recipe)) {}

  static DiscreteOperator identity(Backend backend, Index n) {
    return {backend, std::make_shared<detail::IdentityMap>(n), "I"};
  }
  static DiscreteOperator identity(const Discretization& d) { return identity(backend_of(d), size_of(d)); }
  static DiscreteOperator zero(Backend backend, Index n) {
    return {backend, std::make_shared<detail::ZeroMap>(n), "0"};
  }
  static DiscreteOperator zero(const Discretization& d) { return zero(backend_of(d), size_of(d)); }
  static DiscreteOperator dense(Backend backend, CMatrix m, std::string recipe) {
    if (m.rows() != m.cols()) throw Error(ErrorCode::precondition, "operator matrix must be square");
    return {backend, std::make_shared<detail::DenseMap>(std::move(m)), std::move(recipe)};
  }

  Backend backend() const { return backend_; }
  Index size() const { return map_->size(); }
  const std::string& recipe() const { return recipe_; }

  CMatrix apply(const CMatrix& x) const {
    if (x.rows() != size()) throw Error(ErrorCode::backend_mismatch, "vector length does not match operator");
    CMatrix y;
    map_->apply(x, y);
    return y;
  }
  CVector apply(const CVector& x) const { return apply(CMatrix(x)).col(0); }

  CMatrix matrix() const { return apply(CMatrix(CMatrix::Identity(size(), size()))); }

  DiscreteOperator with_recipe(std::string recipe) const { return {backend_, map_, std::move(recipe)}; }

  const detail::MapPtr& map() const { return map_; }

 private:
  Backend backend_;
  detail::MapPtr map_;
  std::string recipe_;
};

namespace detail {

inline void check_compatible(const DiscreteOperator& a, const DiscreteOperator& b) {
  if (a.backend() != b.backend() || a.size() != b.size())
    throw Error(ErrorCode::backend_mismatch,
                std::string("cannot combine ") + backend_name(a.backend()) + "[" + std::to_string(a.size()) +
                    "] with " + backend_name(b.backend()) + "[" + std::to_string(b.size()) + "]");
}

inline bool is_identity(const DiscreteOperator& a) {
  return dynamic_cast<const IdentityMap*>(a.map().get()) != nullptr;
}
inline bool is_zero(const DiscreteOperator& a) {
  return dynamic_cast<const ZeroMap*>(a.map().get()) != nullptr;
}

}  // namespace detail

/// a * b (apply b first).
inline DiscreteOperator compose(const DiscreteOperator& a, const DiscreteOperator& b) {
  detail::check_compatible(a, b);
  if (detail::is_identity(a)) return b;
  if (detail::is_identity(b)) return a;
  if (detail::is_zero(a) || detail::is_zero(b)) return DiscreteOperator::zero(a.backend(), a.size());
  std::vector<detail::MapPtr> factors;
  for (const DiscreteOperator* op : {&a, &b}) {
    if (auto prod = std::dynamic_pointer_cast<const detail::ProductMap>(op->map()))
      factors.insert(factors.end(), prod->factors().begin(), prod->factors().end());
    else
      factors.push_back(op->map());
  }
  return {a.backend(), std::make_shared<detail::ProductMap>(std::move(factors)),
          "(" + a.recipe() + ")(" + b.recipe() + ")"};
}

inline DiscreteOperator compose(std::initializer_list<DiscreteOperator> ops) {
  auto it = ops.begin();
  DiscreteOperator acc = *it;
  for (++it; it != ops.end(); ++it) acc = compose(acc, *it);
  return acc;
}

inline DiscreteOperator linear_combination(const std::vector<DiscreteOperator>& ops,
                                           const std::vector<Complex>& coeffs) {
  std::vector<detail::MapPtr> maps;
  std::vector<Complex> kept;
  std::string recipe;
  for (std::size_t k = 0; k < ops.size(); ++k) {
    detail::check_compatible(ops.front(), ops[k]);
    if (detail::is_zero(ops[k]) || coeffs[k] == Complex(0.0)) continue;
    maps.push_back(ops[k].map());
    kept.push_back(coeffs[k]);
    if (!recipe.empty()) recipe += " + ";
    if (coeffs[k] != Complex(1.0)) recipe += "(" + std::to_string(coeffs[k].real()) + (coeffs[k].imag() != 0 ? "+" + std::to_string(coeffs[k].imag()) + "i" : "") + ")*";
    recipe += ops[k].recipe();
  }
  if (maps.empty()) return DiscreteOperator::zero(ops.front().backend(), ops.front().size());
  return {ops.front().backend(), std::make_shared<detail::SumMap>(std::move(maps), std::move(kept)), recipe};
}

inline DiscreteOperator add(const DiscreteOperator& a, const DiscreteOperator& b) {
  return linear_combination({a, b}, {1.0, 1.0});
}
inline DiscreteOperator subtract(const DiscreteOperator& a, const DiscreteOperator& b) {
  return linear_combination({a, b}, {1.0, -1.0});
}
inline DiscreteOperator scale(Complex s, const DiscreteOperator& a) { return linear_combination({a}, {s}); }

inline DiscreteOperator operator*(const DiscreteOperator& a, const DiscreteOperator& b) { return compose(a, b); }
inline DiscreteOperator operator+(const DiscreteOperator& a, const DiscreteOperator& b) { return add(a, b); }
inline DiscreteOperator operator-(const DiscreteOperator& a, const DiscreteOperator& b) { return subtract(a, b); }
inline DiscreteOperator operator*(Complex s, const DiscreteOperator& a) { return scale(s, a); }

inline CVector apply(const DiscreteOperator& a, const CVector& v) { return a.apply(v); }

/// Inverse through an LU factorization of the materialized matrix.
inline DiscreteOperator dense_inverse(const DiscreteOperator& a) {
  return {a.backend(), std::make_shared<detail::LuSolveMap>(a.matrix()), "inv[" + a.recipe() + "]"};
}

/// Materializes the operator as a dense matrix operator (same action).
inline DiscreteOperator materialize(const DiscreteOperator& a) {
  return DiscreteOperator::dense(a.backend(), a.matrix(), a.recipe());
}

/// Adjoint with respect to the backend inner product: weighted on the grid,
/// Euclidean on Laguerre coefficients. Materializes the matrix.
inline DiscreteOperator adjoint(const DiscreteOperator& a, const Discretization& d) {
  if (a.backend() != backend_of(d) || a.size() != size_of(d))
    throw Error(ErrorCode::backend_mismatch, "adjoint needs the operator's own discretization");
  CMatrix m = a.matrix().adjoint();
  if (const Grid* g = std::get_if<Grid>(&d)) {
    const RVector& w = g->weights();
    m = w.cwiseInverse().asDiagonal() * m * w.asDiagonal();
  }
  return DiscreteOperator::dense(a.backend(), std::move(m), "adj[" + a.recipe() + "]");
}

}  // namespace winhopf
