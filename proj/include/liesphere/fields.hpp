#pragma once
// Scalar functions of one and two variables with derivative access, plus
// uniform grids with 4th-order central finite differences. A Field2 answers
// any mixed partial with dx+dy <= 3; analytic fields do so exactly through
// jets, sampled fields through FD stencils (and local Lagrange interpolation
// off the nodes).

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "liesphere/core.hpp"
#include "liesphere/errors.hpp"
#include "liesphere/jet.hpp"

namespace liesphere {

inline constexpr int kFieldOrder = 3;
using FieldJet = Jet2<kFieldOrder>;

// One-variable smooth function. d(k, t) returns the k-th derivative; the
// supported order depends on the constructor (>=4 for all built-ins).
class Fn1 {
 public:
  Fn1() = default;
  Fn1(std::function<double(int, double)> f, int max_order)
      : f_(std::move(f)), max_order_(max_order) {}

  bool valid() const { return static_cast<bool>(f_); }
  int max_order() const { return max_order_; }
  double operator()(double t) const { return d(0, t); }
  double d(int order, double t) const {
    if (!f_) throw Error("Fn1: empty function");
    if (order > max_order_) throw Error("Fn1: derivative order not supported");
    return f_(order, t);
  }

  // jet of the shift-th derivative of the function
  template <int N>
  Jet1<N> jet(double t, int shift = 0) const {
    static_assert(N >= 1);
    Jet1<N> j;
    double fact = 1;
    for (int k = 0; k <= N; ++k) {
      if (k > 1) fact *= k;
      j.c[k] = d(k + shift, t) / fact;
    }
    return j;
  }

  static Fn1 constant(double v) {
    return Fn1([v](int k, double) { return k == 0 ? v : 0.0; }, 64);
  }
  static Fn1 identity() { return affine(1, 0); }
  // a*t + b
  static Fn1 affine(double a, double b) {
    return Fn1(
        [a, b](int k, double t) {
          if (k == 0) return a * t + b;
          if (k == 1) return a;
          return 0.0;
        },
        64);
  }
  // coefficients in increasing degree: c[0] + c[1] t + ...
  static Fn1 polynomial(std::vector<double> c) {
    return Fn1(
        [c = std::move(c)](int k, double t) {
          double v = 0;
          for (int i = static_cast<int>(c.size()) - 1; i >= k; --i) {
            double f = 1;
            for (int m = 0; m < k; ++m) f *= (i - m);
            v = v * t + c[i] * f;
          }
          return v;
        },
        64);
  }
  // 4 t^3 + a t^2 + b t + c
  static Fn1 cubic(double a, double b, double c) { return polynomial({c, b, a, 4.0}); }
  // (a t + b) / (c t + d)
  static Fn1 moebius(double a, double b, double c, double d) {
    const double det = a * d - b * c;
    if (det == 0) throw ValidationError("moebius: degenerate coefficients");
    return Fn1(
        [=](int k, double t) {
          const double den = c * t + d;
          if (den == 0) throw DomainViolation("moebius: pole");
          if (k == 0) return (a * t + b) / den;
          double fact = 1;
          for (int m = 2; m <= k; ++m) fact *= m;
          const double sign = (k % 2) ? 1.0 : -1.0;
          return sign * fact * std::pow(c, k - 1) * det / std::pow(den, k + 1);
        },
        16);
  }

 private:
  std::function<double(int, double)> f_;
  int max_order_ = 0;
};

// outer(inner(t)) with derivatives to order 6 (jet composition)
inline Fn1 compose(const Fn1& outer, const Fn1& inner) {
  const int order = std::min({6, outer.max_order(), inner.max_order()});
  return Fn1(
      [outer, inner](int k, double t) {
        auto e = inner.jet<6>(t);
        const double u = e.value();
        e.c[0] = 0;
        std::array<double, 7> d{};
        double fact = 1;
        for (int m = 0; m <= 6; ++m) {
          if (m > 1) fact *= m;
          d[static_cast<size_t>(m)] = outer.d(m, u) / fact;
        }
        return compose1<6>(e, d).deriv(k);
      },
      order);
}

// Two-variable field backed by a jet evaluator.
class Field2 {
 public:
  Field2() = default;
  explicit Field2(std::function<FieldJet(double, double)> jet) : jet_(std::move(jet)) {}

  bool valid() const { return static_cast<bool>(jet_); }
  FieldJet jet(double r1, double r2) const {
    if (!jet_) throw Error("Field2: empty field");
    return jet_(r1, r2);
  }
  double operator()(double r1, double r2) const { return jet(r1, r2).value(); }
  double d(int d1, int d2, double r1, double r2) const {
    if (d1 + d2 > kFieldOrder) throw Error("Field2: derivative order not supported");
    return jet(r1, r2).partial(d1, d2);
  }

  static Field2 constant(double v) {
    return Field2([v](double, double) { return FieldJet::constant(v); });
  }
  // f(r1) * g(r2); pass Fn1::constant(1) for an absent factor
  static Field2 separable(const Fn1& f, const Fn1& g) {
    return Field2([f, g](double r1, double r2) {
      return embed1(f.jet<kFieldOrder>(r1)) * embed2(g.jet<kFieldOrder>(r2));
    });
  }

 private:
  std::function<FieldJet(double, double)> jet_;
};

// ---------------------------------------------------------------------------
// Uniform grids and 4th-order stencils

struct GridSpec {
  int n1 = 0, n2 = 0;
  double r1min = 0, r2min = 0;
  double h1 = 0, h2 = 0;

  double r1(int i) const { return r1min + i * h1; }
  double r2(int j) const { return r2min + j * h2; }
  Rect rect() const { return {r1min, r1(n1 - 1), r2min, r2(n2 - 1)}; }
  int count() const { return n1 * n2; }

  static GridSpec over(const Rect& r, int n1, int n2) {
    if (n1 < 2 || n2 < 2) throw ValidationError("grid needs at least 2 nodes per axis");
    return {n1, n2, r.r1min, r.r2min, r.span1() / (n1 - 1), r.span2() / (n2 - 1)};
  }
};

template <class T>
struct Grid {
  GridSpec g;
  std::vector<T> v;

  Grid() = default;
  explicit Grid(const GridSpec& spec) : g(spec), v(spec.count()) {}
  T& at(int i, int j) { return v[static_cast<size_t>(j) * g.n1 + i]; }
  const T& at(int i, int j) const { return v[static_cast<size_t>(j) * g.n1 + i]; }
};

using RGrid = Grid<double>;
using CGrid = Grid<cd>;

namespace fd {

// margin (nodes on each side) required by the order-k 4th-accurate stencil
inline int margin(int order) { return order <= 0 ? 0 : (order <= 2 ? 2 : 3); }

template <class T>
T axis1(const Grid<T>& u, int order, int i, int j) {
  auto f = [&](int o) { return u.at(i + o, j); };
  const double h = u.g.h1;
  switch (order) {
    case 0: return f(0);
    case 1: return (-f(2) + 8.0 * f(1) - 8.0 * f(-1) + f(-2)) * (1.0 / (12 * h));
    case 2:
      return (-f(2) + 16.0 * f(1) - 30.0 * f(0) + 16.0 * f(-1) - f(-2)) * (1.0 / (12 * h * h));
    case 3:
      return (-f(3) + 8.0 * f(2) - 13.0 * f(1) + 13.0 * f(-1) - 8.0 * f(-2) + f(-3)) *
             (1.0 / (8 * h * h * h));
    default: throw Error("fd: unsupported order");
  }
}

template <class T>
T axis2(const Grid<T>& u, int order, int i, int j) {
  auto f = [&](int o) { return u.at(i, j + o); };
  const double h = u.g.h2;
  switch (order) {
    case 0: return f(0);
    case 1: return (-f(2) + 8.0 * f(1) - 8.0 * f(-1) + f(-2)) * (1.0 / (12 * h));
    case 2:
      return (-f(2) + 16.0 * f(1) - 30.0 * f(0) + 16.0 * f(-1) - f(-2)) * (1.0 / (12 * h * h));
    case 3:
      return (-f(3) + 8.0 * f(2) - 13.0 * f(1) + 13.0 * f(-1) - 8.0 * f(-2) + f(-3)) *
             (1.0 / (8 * h * h * h));
    default: throw Error("fd: unsupported order");
  }
}

// mixed partial d^(d1+d2) u at node (i,j); throws if the stencil leaves the grid
template <class T>
T partial(const Grid<T>& u, int d1, int d2, int i, int j) {
  const int m1 = margin(d1), m2 = margin(d2);
  if (i - m1 < 0 || i + m1 >= u.g.n1 || j - m2 < 0 || j + m2 >= u.g.n2)
    throw StencilOutOfDomain("fd stencil leaves the grid");
  if (d2 == 0) return axis1(u, d1, i, j);
  if (d1 == 0) return axis2(u, d2, i, j);
  // apply the axis-2 stencil to axis-1 derivatives
  auto f = [&](int o) { return axis1(u, d1, i, j + o); };
  const double h = u.g.h2;
  switch (d2) {
    case 1: return (-f(2) + 8.0 * f(1) - 8.0 * f(-1) + f(-2)) * (1.0 / (12 * h));
    case 2:
      return (-f(2) + 16.0 * f(1) - 30.0 * f(0) + 16.0 * f(-1) - f(-2)) * (1.0 / (12 * h * h));
    case 3:
      return (-f(3) + 8.0 * f(2) - 13.0 * f(1) + 13.0 * f(-1) - 8.0 * f(-2) + f(-3)) *
             (1.0 / (8 * h * h * h));
    default: throw Error("fd: unsupported order");
  }
}

}  // namespace fd

namespace detail {

// Derivative-of-Lagrange-basis weights: w[m] such that
// f^(order)(xi) ~= sum_m w[m] f(xs[m]) for the degree n-1 interpolant.
// The basis polynomials are expanded about xi, so the derivative at xi is a
// single coefficient (no cancellation-prone Horner evaluation).
inline void lagrange_weights(const double* xs, int n, double xi, int order, double* w) {
  for (int m = 0; m < n; ++m) {
    std::vector<double> poly(static_cast<size_t>(n), 0.0);
    poly[0] = 1.0;
    int deg = 0;
    double denom = 1.0;
    for (int l = 0; l < n; ++l) {
      if (l == m) continue;
      denom *= xs[m] - xs[l];
      const double u = xs[l] - xi;
      for (int k = deg; k >= 0; --k) {
        poly[static_cast<size_t>(k) + 1] += poly[k];
        poly[k] *= -u;
      }
      ++deg;
    }
    double fact = 1;
    for (int k = 2; k <= order; ++k) fact *= k;
    w[m] = (order <= deg ? poly[order] * fact : 0.0) / denom;
  }
}

}  // namespace detail

// Field backed by samples on a uniform grid. Derivatives at nodes use the
// 4th-order stencils; evaluation elsewhere differentiates a local 6x6
// tensor-product Lagrange interpolant.
inline Field2 sampled_field(std::shared_ptr<const RGrid> grid) {
  return Field2([grid](double r1, double r2) -> FieldJet {
    const GridSpec& g = grid->g;
    const double fi = (r1 - g.r1min) / g.h1;
    const double fj = (r2 - g.r2min) / g.h2;
    const int i = static_cast<int>(std::lround(fi));
    const int j = static_cast<int>(std::lround(fj));
    const bool on_node = std::abs(fi - i) < 1e-9 && std::abs(fj - j) < 1e-9 && i >= 0 &&
                         i < g.n1 && j >= 0 && j < g.n2;
    FieldJet out;
    if (on_node) {
      for (int d1 = 0; d1 <= kFieldOrder; ++d1)
        for (int d2 = 0; d1 + d2 <= kFieldOrder; ++d2) {
          double f1 = 1, f2 = 1;
          for (int k = 2; k <= d1; ++k) f1 *= k;
          for (int k = 2; k <= d2; ++k) f2 *= k;
          out.at(d1, d2) = fd::partial(*grid, d1, d2, i, j) / (f1 * f2);
        }
      return out;
    }
    // off-node: 6-point Lagrange per axis
    constexpr int kPts = 6;
    int i0 = static_cast<int>(std::floor(fi)) - kPts / 2 + 1;
    int j0 = static_cast<int>(std::floor(fj)) - kPts / 2 + 1;
    i0 = std::max(0, std::min(i0, g.n1 - kPts));
    j0 = std::max(0, std::min(j0, g.n2 - kPts));
    if (g.n1 < kPts || g.n2 < kPts || r1 < g.r1min - 1e-12 || r2 < g.r2min - 1e-12 ||
        r1 > g.r1(g.n1 - 1) + 1e-12 || r2 > g.r2(g.n2 - 1) + 1e-12)
      throw StencilOutOfDomain("sampled field: evaluation outside the grid");
    double xs[kPts], ys[kPts];
    for (int m = 0; m < kPts; ++m) xs[m] = g.r1(i0 + m);
    for (int m = 0; m < kPts; ++m) ys[m] = g.r2(j0 + m);
    double wx[kFieldOrder + 1][kPts], wy[kFieldOrder + 1][kPts];
    for (int o = 0; o <= kFieldOrder; ++o) {
      detail::lagrange_weights(xs, kPts, r1, o, wx[o]);
      detail::lagrange_weights(ys, kPts, r2, o, wy[o]);
    }
    for (int d1 = 0; d1 <= kFieldOrder; ++d1)
      for (int d2 = 0; d1 + d2 <= kFieldOrder; ++d2) {
        double acc = 0;
        for (int a = 0; a < kPts; ++a)
          for (int b = 0; b < kPts; ++b)
            acc += wx[d1][a] * wy[d2][b] * grid->at(i0 + a, j0 + b);
        double f1 = 1, f2 = 1;
        for (int k = 2; k <= d1; ++k) f1 *= k;
        for (int k = 2; k <= d2; ++k) f2 *= k;
        out.at(d1, d2) = acc / (f1 * f2);
      }
    return out;
  });
}

// Sample an analytic field on a grid (used to build sampled-mode fixtures).
inline std::shared_ptr<RGrid> sample(const Field2& f, const GridSpec& g) {
  auto out = std::make_shared<RGrid>(g);
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) out->at(i, j) = f(g.r1(i), g.r2(j));
  return out;
}

}  // namespace liesphere
