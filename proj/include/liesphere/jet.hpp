#pragma once
// Truncated Taylor arithmetic (forward-mode jets) in one and two variables.
// A Jet stores scaled coefficients c[k] = f^(k)/k!, so multiplication is a
// plain Cauchy product and composition is Horner evaluation. Everything the
// library differentiates analytically (families, gauges, catalog surfaces)
// goes through these.

#include <array>
#include <cmath>
#include <cstddef>

#include "liesphere/errors.hpp"

namespace liesphere {

template <int N>
struct Jet1 {
  static_assert(N >= 1);
  std::array<double, N + 1> c{};

  static Jet1 constant(double v) {
    Jet1 j;
    j.c[0] = v;
    return j;
  }
  static Jet1 variable(double v) {
    Jet1 j;
    j.c[0] = v;
    j.c[1] = 1;
    return j;
  }

  double value() const { return c[0]; }
  double deriv(int k) const {
    double f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    return c[k] * f;
  }

  Jet1 operator+(const Jet1& o) const {
    Jet1 r;
    for (int i = 0; i <= N; ++i) r.c[i] = c[i] + o.c[i];
    return r;
  }
  Jet1 operator-(const Jet1& o) const {
    Jet1 r;
    for (int i = 0; i <= N; ++i) r.c[i] = c[i] - o.c[i];
    return r;
  }
  Jet1 operator-() const {
    Jet1 r;
    for (int i = 0; i <= N; ++i) r.c[i] = -c[i];
    return r;
  }
  Jet1 operator*(const Jet1& o) const {
    Jet1 r;
    for (int i = 0; i <= N; ++i)
      for (int j = 0; i + j <= N; ++j) r.c[i + j] += c[i] * o.c[j];
    return r;
  }
  Jet1 operator*(double s) const {
    Jet1 r;
    for (int i = 0; i <= N; ++i) r.c[i] = c[i] * s;
    return r;
  }
  Jet1 operator+(double s) const {
    Jet1 r = *this;
    r.c[0] += s;
    return r;
  }
  Jet1 operator-(double s) const {
    Jet1 r = *this;
    r.c[0] -= s;
    return r;
  }
};

template <int N>
Jet1<N> operator*(double s, const Jet1<N>& j) { return j * s; }
template <int N>
Jet1<N> operator+(double s, const Jet1<N>& j) { return j + s; }
template <int N>
Jet1<N> operator-(double s, const Jet1<N>& j) { return (-j) + s; }

// Horner evaluation of sum_k d[k] * e^k where e has zero constant term.
template <int N>
Jet1<N> compose1(const Jet1<N>& e, const std::array<double, N + 1>& d) {
  Jet1<N> r = Jet1<N>::constant(d[N]);
  for (int k = N - 1; k >= 0; --k) r = r * e + d[k];
  return r;
}

namespace detail {

// Scaled Taylor coefficients of t^alpha about a0 (binomial series).
template <int N>
std::array<double, N + 1> pow_series(double a0, double alpha) {
  if (a0 <= 0) throw DegenerateJet("jet pow: non-positive base");
  std::array<double, N + 1> d{};
  d[0] = std::pow(a0, alpha);
  double binom = 1;
  for (int k = 1; k <= N; ++k) {
    binom *= (alpha - (k - 1)) / k;
    d[k] = binom * std::pow(a0, alpha - k);
  }
  return d;
}

// d[k] = (-1)^k / a0^{k+1}
template <int N>
std::array<double, N + 1> recip_series(double a0) {
  if (a0 == 0) throw DegenerateJet("jet reciprocal of zero");
  std::array<double, N + 1> d{};
  double p = 1.0 / a0;
  for (int k = 0; k <= N; ++k) {
    d[k] = (k % 2) ? -p : p;
    p /= a0;
  }
  return d;
}

template <int N>
std::array<double, N + 1> sin_series(double a0) {
  std::array<double, N + 1> d{};
  double s = std::sin(a0), c = std::cos(a0), fact = 1;
  const double cyc[4] = {s, c, -s, -c};
  for (int k = 0; k <= N; ++k) {
    if (k > 0) fact *= k;
    d[k] = cyc[k % 4] / fact;
  }
  return d;
}

template <int N>
std::array<double, N + 1> cos_series(double a0) {
  std::array<double, N + 1> d{};
  double s = std::sin(a0), c = std::cos(a0), fact = 1;
  const double cyc[4] = {c, -s, -c, s};
  for (int k = 0; k <= N; ++k) {
    if (k > 0) fact *= k;
    d[k] = cyc[k % 4] / fact;
  }
  return d;
}

template <int N>
std::array<double, N + 1> exp_series(double a0) {
  std::array<double, N + 1> d{};
  double e = std::exp(a0), fact = 1;
  for (int k = 0; k <= N; ++k) {
    if (k > 0) fact *= k;
    d[k] = e / fact;
  }
  return d;
}

template <int N>
std::array<double, N + 1> log_series(double a0) {
  if (a0 <= 0) throw DegenerateJet("jet log: non-positive argument");
  std::array<double, N + 1> d{};
  d[0] = std::log(a0);
  double p = 1.0 / a0;
  for (int k = 1; k <= N; ++k) {
    d[k] = (((k + 1) % 2) ? -1.0 : 1.0) * p / k;
    p /= a0;
  }
  return d;
}

}  // namespace detail

template <int N>
Jet1<N> recip(const Jet1<N>& u) {
  Jet1<N> e = u;
  e.c[0] = 0;
  return compose1<N>(e, detail::recip_series<N>(u.c[0]));
}
template <int N>
Jet1<N> operator/(const Jet1<N>& a, const Jet1<N>& b) { return a * recip(b); }
template <int N>
Jet1<N> sqrt(const Jet1<N>& u) {
  Jet1<N> e = u;
  e.c[0] = 0;
  return compose1<N>(e, detail::pow_series<N>(u.c[0], 0.5));
}
template <int N>
Jet1<N> sin(const Jet1<N>& u) {
  Jet1<N> e = u;
  e.c[0] = 0;
  return compose1<N>(e, detail::sin_series<N>(u.c[0]));
}
template <int N>
Jet1<N> cos(const Jet1<N>& u) {
  Jet1<N> e = u;
  e.c[0] = 0;
  return compose1<N>(e, detail::cos_series<N>(u.c[0]));
}
template <int N>
Jet1<N> exp(const Jet1<N>& u) {
  Jet1<N> e = u;
  e.c[0] = 0;
  return compose1<N>(e, detail::exp_series<N>(u.c[0]));
}
template <int N>
Jet1<N> log(const Jet1<N>& u) {
  Jet1<N> e = u;
  e.c[0] = 0;
  return compose1<N>(e, detail::log_series<N>(u.c[0]));
}

// ---------------------------------------------------------------------------

template <int N>
struct Jet2 {
  static_assert(N >= 1);
  static constexpr int kSize = (N + 1) * (N + 2) / 2;
  // graded order: degree d block starts at d(d+1)/2, entry (i,j) at offset j
  std::array<double, kSize> c{};

  static constexpr int idx(int i, int j) {
    const int d = i + j;
    return d * (d + 1) / 2 + j;
  }

  double& at(int i, int j) { return c[idx(i, j)]; }
  double at(int i, int j) const { return c[idx(i, j)]; }

  static Jet2 constant(double v) {
    Jet2 r;
    r.c[0] = v;
    return r;
  }
  static Jet2 var1(double v) {
    Jet2 r;
    r.c[0] = v;
    r.at(1, 0) = 1;
    return r;
  }
  static Jet2 var2(double v) {
    Jet2 r;
    r.c[0] = v;
    r.at(0, 1) = 1;
    return r;
  }

  double value() const { return c[0]; }
  // raw partial d^(i+j) f / dx^i dy^j
  double partial(int i, int j) const {
    double f = 1;
    for (int k = 2; k <= i; ++k) f *= k;
    for (int k = 2; k <= j; ++k) f *= k;
    return at(i, j) * f;
  }

  Jet2 operator+(const Jet2& o) const {
    Jet2 r;
    for (int i = 0; i < kSize; ++i) r.c[i] = c[i] + o.c[i];
    return r;
  }
  Jet2 operator-(const Jet2& o) const {
    Jet2 r;
    for (int i = 0; i < kSize; ++i) r.c[i] = c[i] - o.c[i];
    return r;
  }
  Jet2 operator-() const {
    Jet2 r;
    for (int i = 0; i < kSize; ++i) r.c[i] = -c[i];
    return r;
  }
  Jet2 operator*(double s) const {
    Jet2 r;
    for (int i = 0; i < kSize; ++i) r.c[i] = c[i] * s;
    return r;
  }
  Jet2 operator+(double s) const {
    Jet2 r = *this;
    r.c[0] += s;
    return r;
  }
  Jet2 operator-(double s) const {
    Jet2 r = *this;
    r.c[0] -= s;
    return r;
  }

  Jet2 operator*(const Jet2& o) const {
    Jet2 r;
    for (int d1 = 0; d1 <= N; ++d1)
      for (int i1 = d1; i1 >= 0; --i1) {
        const int j1 = d1 - i1;
        const double a = at(i1, j1);
        if (a == 0) continue;
        for (int d2 = 0; d2 + d1 <= N; ++d2)
          for (int i2 = d2; i2 >= 0; --i2) {
            const int j2 = d2 - i2;
            r.at(i1 + i2, j1 + j2) += a * o.at(i2, j2);
          }
      }
    return r;
  }
};

template <int N>
Jet2<N> operator*(double s, const Jet2<N>& j) { return j * s; }
template <int N>
Jet2<N> operator+(double s, const Jet2<N>& j) { return j + s; }
template <int N>
Jet2<N> operator-(double s, const Jet2<N>& j) { return (-j) + s; }

template <int N>
Jet2<N> compose1(const Jet2<N>& e, const std::array<double, N + 1>& d) {
  Jet2<N> r = Jet2<N>::constant(d[N]);
  for (int k = N - 1; k >= 0; --k) r = r * e + d[k];
  return r;
}

template <int N>
Jet2<N> recip(const Jet2<N>& u) {
  Jet2<N> e = u;
  e.c[0] = 0;
  return compose1<N>(e, detail::recip_series<N>(u.value()));
}
template <int N>
Jet2<N> operator/(const Jet2<N>& a, const Jet2<N>& b) { return a * recip(b); }
template <int N>
Jet2<N> operator/(double a, const Jet2<N>& b) { return recip(b) * a; }
template <int N>
Jet2<N> operator/(const Jet2<N>& a, double b) { return a * (1.0 / b); }
template <int N>
Jet2<N> sqrt(const Jet2<N>& u) {
  Jet2<N> e = u;
  e.c[0] = 0;
  return compose1<N>(e, detail::pow_series<N>(u.value(), 0.5));
}
template <int N>
Jet2<N> sin(const Jet2<N>& u) {
  Jet2<N> e = u;
  e.c[0] = 0;
  return compose1<N>(e, detail::sin_series<N>(u.value()));
}
template <int N>
Jet2<N> cos(const Jet2<N>& u) {
  Jet2<N> e = u;
  e.c[0] = 0;
  return compose1<N>(e, detail::cos_series<N>(u.value()));
}
template <int N>
Jet2<N> exp(const Jet2<N>& u) {
  Jet2<N> e = u;
  e.c[0] = 0;
  return compose1<N>(e, detail::exp_series<N>(u.value()));
}
template <int N>
Jet2<N> log(const Jet2<N>& u) {
  Jet2<N> e = u;
  e.c[0] = 0;
  return compose1<N>(e, detail::log_series<N>(u.value()));
}

// Partial derivative as a jet. The top-degree band of the result is unknown
// (truncated) and set to zero; callers budget one order per derivative taken.
template <int N>
Jet2<N> dx(const Jet2<N>& u) {
  Jet2<N> r;
  for (int d = 1; d <= N; ++d)
    for (int i = d; i >= 1; --i) r.at(i - 1, d - i) = i * u.at(i, d - i);
  return r;
}
template <int N>
Jet2<N> dy(const Jet2<N>& u) {
  Jet2<N> r;
  for (int d = 1; d <= N; ++d)
    for (int j = d; j >= 1; --j) r.at(d - j, j - 1) = j * u.at(d - j, j);
  return r;
}

// Keep only the coefficients up to total order M.
template <int M, int N>
Jet2<M> truncate(const Jet2<N>& u) {
  static_assert(M <= N, "truncate cannot raise the order");
  Jet2<M> r;
  for (int i = 0; i <= M; ++i)
    for (int j = 0; i + j <= M; ++j) r.at(i, j) = u.at(i, j);
  return r;
}

// Embed a univariate jet as a bivariate jet in the first / second variable.
template <int N>
Jet2<N> embed1(const Jet1<N>& u) {
  Jet2<N> r;
  for (int k = 0; k <= N; ++k) r.at(k, 0) = u.c[k];
  return r;
}
template <int N>
Jet2<N> embed2(const Jet1<N>& u) {
  Jet2<N> r;
  for (int k = 0; k <= N; ++k) r.at(0, k) = u.c[k];
  return r;
}

}  // namespace liesphere
