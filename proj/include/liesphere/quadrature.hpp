#pragma once
// Adaptive Gauss-Legendre quadrature: 15-point rule with interval bisection,
// error estimated against the embedded 7-point rule.

#include <algorithm>
#include <cmath>
#include <functional>

#include "liesphere/errors.hpp"

namespace liesphere {

namespace detail {

// abscissae/weights for n=15 and n=7 Gauss-Legendre on [-1,1]
inline constexpr double kX15[8] = {0.0,
                                   0.2011940939974345,
                                   0.3941513470775634,
                                   0.5709721726085388,
                                   0.7244177313601701,
                                   0.8482065834104272,
                                   0.9372733924007060,
                                   0.9879925180204854};
inline constexpr double kW15[8] = {0.2025782419255613,
                                   0.1984314853271116,
                                   0.1861610000155622,
                                   0.1662692058169939,
                                   0.1395706779261543,
                                   0.1071592204671719,
                                   0.0703660474881081,
                                   0.0307532419961173};
inline constexpr double kX7[4] = {0.0, 0.4058451513773972, 0.7415311855993945,
                                  0.9491079123427585};
inline constexpr double kW7[4] = {0.4179591836734694, 0.3818300505051189, 0.2797053914892767,
                                  0.1294849661688697};

template <class F>
double gauss(const F& f, double a, double b, const double* xs, const double* ws, int half) {
  const double c = 0.5 * (a + b), r = 0.5 * (b - a);
  double s = ws[0] * f(c);
  for (int i = 1; i < half; ++i) s += ws[i] * (f(c + r * xs[i]) + f(c - r * xs[i]));
  return s * r;
}

template <class F>
double adapt(const F& f, double a, double b, double tol, int depth) {
  const double g15 = gauss(f, a, b, kX15, kW15, 8);
  const double g7 = gauss(f, a, b, kX7, kW7, 4);
  if (std::abs(g15 - g7) <= tol * std::max(1.0, std::abs(g15))) return g15;
  if (depth > 48) throw StepFailure("quadrature: no convergence");
  const double m = 0.5 * (a + b);
  return adapt(f, a, m, tol, depth + 1) + adapt(f, m, b, tol, depth + 1);
}

}  // namespace detail

// integral of f over [a,b] to relative tolerance tol (default 1e-12)
template <class F>
double integrate(const F& f, double a, double b, double tol = 1e-12) {
  if (a == b) return 0.0;
  const double sign = (b >= a) ? 1.0 : -1.0;
  const double lo = std::min(a, b), hi = std::max(a, b);
  return sign * detail::adapt(f, lo, hi, tol, 0);
}

}  // namespace liesphere
