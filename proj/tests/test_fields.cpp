#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <memory>
#include <numbers>

#include "liesphere/fields.hpp"
#include "liesphere/ode.hpp"
#include "liesphere/quadrature.hpp"

using liesphere::Field2;
using liesphere::Fn1;
using liesphere::GridSpec;
using liesphere::RGrid;

TEST_CASE("polynomial function derivatives") {
  auto f = Fn1::polynomial({-7, 5, -2, 0, 3});  // 3t^4 - 2t^2 + 5t - 7
  const double t = 1.3;
  CHECK(f(t) == Catch::Approx(3 * std::pow(t, 4) - 2 * t * t + 5 * t - 7).epsilon(1e-14));
  CHECK(f.d(1, t) == Catch::Approx(12 * std::pow(t, 3) - 4 * t + 5).epsilon(1e-14));
  CHECK(f.d(3, t) == Catch::Approx(72 * t).epsilon(1e-14));
  CHECK(f.d(5, t) == Catch::Approx(0.0).margin(1e-15));

  auto g = Fn1::cubic(0.5, -1.0, 2.0);  // 4t^3 + 0.5t^2 - t + 2
  CHECK(g(t) == Catch::Approx(4 * std::pow(t, 3) + 0.5 * t * t - t + 2).epsilon(1e-14));
  CHECK(g.d(2, t) == Catch::Approx(24 * t + 1).epsilon(1e-14));
  CHECK(g.d(3, t) == Catch::Approx(24.0).epsilon(1e-14));
}

TEST_CASE("moebius derivatives agree with jet division") {
  const double a = 2, b = -1, c = 0.5, d = 3;
  auto f = Fn1::moebius(a, b, c, d);
  const double t = 0.8;
  auto x = liesphere::Jet1<4>::variable(t);
  auto jet = (a * x + b) / (c * x + d);
  for (int k = 0; k <= 4; ++k)
    CHECK(f.d(k, t) == Catch::Approx(jet.deriv(k)).epsilon(1e-12).margin(1e-14));
  CHECK_THROWS_AS(Fn1::moebius(1, 2, 2, 4), liesphere::ValidationError);
  CHECK_THROWS_AS(f(-d / c), liesphere::DomainViolation);
}

TEST_CASE("separable field partials are analytic") {
  auto f = Field2::separable(Fn1::polynomial({0, 0, 1}), Fn1::polynomial({1, 1}));
  // f = r1^2 (1 + r2)
  CHECK(f(2.0, 3.0) == Catch::Approx(16.0).epsilon(1e-14));
  CHECK(f.d(1, 0, 2.0, 3.0) == Catch::Approx(16.0).epsilon(1e-14));
  CHECK(f.d(1, 1, 2.0, 3.0) == Catch::Approx(4.0).epsilon(1e-14));
  CHECK(f.d(2, 1, 2.0, 3.0) == Catch::Approx(2.0).epsilon(1e-14));
  CHECK(f.d(0, 2, 2.0, 3.0) == Catch::Approx(0.0).margin(1e-14));
  CHECK_THROWS(f.d(2, 2, 2.0, 3.0));
}

namespace {

liesphere::Field2 analytic_test_field() {
  return Field2([](double x, double y) {
    using J = liesphere::FieldJet;
    return sin(J::var1(x)) * exp(0.5 * J::var2(y));
  });
}

double exact_partial(int d1, int d2, double x, double y) {
  const double cyc[4] = {std::sin(x), std::cos(x), -std::sin(x), -std::cos(x)};
  return cyc[d1 % 4] * std::pow(0.5, d2) * std::exp(0.5 * y);
}

}  // namespace

TEST_CASE("grid stencils reach 4th-order accuracy") {
  auto f = analytic_test_field();
  auto g = GridSpec::over({0.0, 1.0, 0.0, 1.0}, 101, 101);
  auto grid = liesphere::sample(f, g);
  const int i = 50, j = 40;
  const double x = g.r1(i), y = g.r2(j);
  CHECK(liesphere::fd::partial(*grid, 1, 0, i, j) ==
        Catch::Approx(exact_partial(1, 0, x, y)).margin(1e-9));
  CHECK(liesphere::fd::partial(*grid, 0, 2, i, j) ==
        Catch::Approx(exact_partial(0, 2, x, y)).margin(1e-8));
  CHECK(liesphere::fd::partial(*grid, 1, 1, i, j) ==
        Catch::Approx(exact_partial(1, 1, x, y)).margin(1e-8));
  CHECK(liesphere::fd::partial(*grid, 3, 0, i, j) ==
        Catch::Approx(exact_partial(3, 0, x, y)).margin(1e-6));
  CHECK(liesphere::fd::partial(*grid, 2, 1, i, j) ==
        Catch::Approx(exact_partial(2, 1, x, y)).margin(1e-7));
  CHECK_THROWS_AS(liesphere::fd::partial(*grid, 1, 0, 1, j), liesphere::StencilOutOfDomain);
  CHECK_THROWS_AS(liesphere::fd::partial(*grid, 0, 3, i, 99), liesphere::StencilOutOfDomain);
}

TEST_CASE("sampled field interpolates off the nodes") {
  auto f = analytic_test_field();
  auto g = GridSpec::over({0.0, 1.0, 0.0, 1.0}, 101, 101);
  auto s = liesphere::sampled_field(liesphere::sample(f, g));

  // on a node the stencil path is used
  CHECK(s(g.r1(50), g.r2(40)) == Catch::Approx(exact_partial(0, 0, 0.5, 0.4)).margin(1e-14));

  const double x = 0.5037, y = 0.4021;
  CHECK(s(x, y) == Catch::Approx(exact_partial(0, 0, x, y)).margin(1e-11));
  CHECK(s.d(1, 0, x, y) == Catch::Approx(exact_partial(1, 0, x, y)).margin(1e-8));
  CHECK(s.d(0, 1, x, y) == Catch::Approx(exact_partial(0, 1, x, y)).margin(1e-8));
  CHECK(s.d(1, 1, x, y) == Catch::Approx(exact_partial(1, 1, x, y)).margin(1e-6));
  CHECK(s.d(2, 0, x, y) == Catch::Approx(exact_partial(2, 0, x, y)).margin(1e-6));
  CHECK(s.d(3, 0, x, y) == Catch::Approx(exact_partial(3, 0, x, y)).margin(1e-3));
  CHECK_THROWS_AS(s(1.5, 0.5), liesphere::StencilOutOfDomain);
}

TEST_CASE("rk4 integrates the exponential and the circle") {
  auto one = liesphere::rk4_integrate([](double, double y) { return y; }, 0.0, 1.0, 1.0, 1e-3);
  CHECK(one == Catch::Approx(std::exp(1.0)).epsilon(1e-12));

  using liesphere::cd;
  auto z = liesphere::rk4_integrate([](double, cd y) { return cd(0, 1) * y; }, 0.0,
                                    2 * std::numbers::pi, cd(1, 0), 1e-3);
  CHECK(std::abs(z - cd(1, 0)) < 1e-10);

  // backwards integration undoes forwards
  auto back = liesphere::rk4_integrate([](double, double y) { return y; }, 1.0, 0.0, one, 1e-3);
  CHECK(back == Catch::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(liesphere::rk4_integrate([](double, double y) { return y; }, 0.0, 1.0, 1.0, 0.0),
                  liesphere::StepFailure);
}

TEST_CASE("rk4 visitor lands exactly on the endpoint") {
  int visits = 0;
  double last_t = -1;
  liesphere::rk4_integrate([](double, double y) { return y; }, 0.0, 1.0, 1.0, 0.3,
                           [&](double t, double) {
                             ++visits;
                             last_t = t;
                           });
  CHECK(visits == 4);
  CHECK(last_t == 1.0);
}

TEST_CASE("adaptive quadrature hits tight tolerances") {
  auto s = liesphere::integrate([](double t) { return std::sin(t); }, 0.0, std::numbers::pi);
  CHECK(s == Catch::Approx(2.0).epsilon(1e-13));

  auto p = liesphere::integrate([](double t) { return 4.0 / (1 + t * t); }, 0.0, 1.0);
  CHECK(p == Catch::Approx(std::numbers::pi).epsilon(1e-13));

  // sharply peaked integrand forces subdivision
  auto gpeak = liesphere::integrate([](double t) { return std::exp(-100 * t * t); }, -1.0, 1.0);
  CHECK(gpeak == Catch::Approx(std::sqrt(std::numbers::pi) / 10 * std::erf(10.0)).epsilon(1e-12));

  auto rev = liesphere::integrate([](double t) { return std::sin(t); }, std::numbers::pi, 0.0);
  CHECK(rev == Catch::Approx(-2.0).epsilon(1e-13));
}
