#pragma once
// Classical fixed-step RK4 over any state type with + and scalar *.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>

#include "liesphere/errors.hpp"

namespace liesphere {

template <class State, class F>
State rk4_step(const F& f, double t, const State& y, double h) {
  const State k1 = f(t, y);
  const State k2 = f(t + 0.5 * h, y + (0.5 * h) * k1);
  const State k3 = f(t + 0.5 * h, y + (0.5 * h) * k2);
  const State k4 = f(t + h, y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Integrate y' = f(t,y) from t0 to t1 with steps of size <= h (the last step
// lands exactly on t1). Calls visit(t, y) after every step when provided.
template <class State, class F, class Visit>
State rk4_integrate(const F& f, double t0, double t1, State y, double h, Visit&& visit) {
  if (h <= 0) throw StepFailure("rk4: step must be positive");
  const double len = t1 - t0;
  if (len == 0) return y;
  const std::int64_t n = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(std::abs(len) / h)));
  const double dt = len / static_cast<double>(n);
  double t = t0;
  for (std::int64_t i = 0; i < n; ++i) {
    y = rk4_step(f, t, y, dt);
    t = (i + 1 == n) ? t1 : t0 + dt * static_cast<double>(i + 1);
    visit(t, y);
  }
  return y;
}

template <class State, class F>
State rk4_integrate(const F& f, double t0, double t1, State y, double h) {
  return rk4_integrate(f, t0, t1, std::move(y), h, [](double, const State&) {});
}

}  // namespace liesphere
