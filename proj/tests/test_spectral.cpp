#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <functional>
#include <vector>
#include <random>

#include "liesphere/frame.hpp"
#include "liesphere/spectral.hpp"
#include "liesphere/surface.hpp"

using namespace liesphere;
using namespace liesphere::spectral;

namespace {

std::mt19937 rng(52711);

double rand_in(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

potentials::C0Params default_c0() {
  potentials::C0Params prm;
  prm.eps0 = 0.3;
  prm.eps1 = 0.7;
  prm.eps2 = -0.4;
  prm.rho1 = 1;
  prm.rho2 = 1;
  prm.domain = {0.25, 1.25, 0.25, 1.25};
  return prm;
}

// f1 = 4t^3 - 4t on R1 < 0, f2 = -(4t^3 - 4t) on 0 < R2 < 1
potentials::C1Params monopole_c1() {
  potentials::C1Params prm;
  prm.f1 = Fn1::cubic(0, -4, 0);
  prm.f2 = Fn1::polynomial({0, 4, 0, -4});
  prm.eps0 = 0.2;
  prm.eps1 = -0.1;
  prm.eps2 = 0.4;
  prm.domain = {-0.8, -0.2, 0.2, 0.8};
  return prm;
}

CGrid bump_grid(const GridSpec& g, double c1, double c2, double sigma, double amp) {
  CGrid u(g);
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) {
      const double d1 = g.r1(i) - c1, d2 = g.r2(j) - c2;
      u.at(i, j) = amp * std::exp(-(d1 * d1 + d2 * d2) / (2 * sigma * sigma));
    }
  return u;
}

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * ((i % 2) ? 4.0 : 2.0);
  return acc * h / 3.0;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] = a + (b - a) * i / (n - 1);
  return v;
}

// int_0^1 exp(x^2) dx and the resulting center / radius at y = 0, k = 1
constexpr double kIntExpSq = 1.4626517459071816088;
constexpr double kProfileZ0 = -1.0493526820353112721;
constexpr double kProfileR0 = -0.3180268090817204677;

}  // namespace

TEST_CASE("frame solutions of the quadratic-curve family solve the magnetic pair") {
  const auto prm = default_c0();
  const auto fam = potentials::make_c0_family(prm);
  const auto ops = c0_operators(fam);
  CHECK(ops.lambda == Catch::Approx(0.15).margin(1e-15));
  CHECK(ops.mu == Catch::Approx(0.55).margin(1e-15));
  CHECK(ops.H.eigen == ops.lambda);
  CHECK(ops.F.eigen == ops.mu);

  const auto g = GridSpec::over(prm.domain, 61, 61);
  const auto frames = frame::integrate_grid(fam.field, g);
  for (int col = 0; col < 4; ++col) {
    const CGrid u = frame_component(frames, 0, col);
    CHECK(eigen_residual(ops.H, u, ops.lambda) < 1e-4);
    CHECK(eigen_residual(ops.F, u, ops.mu) < 1e-4);
  }
}

TEST_CASE("the quadratic-curve pair commutes on random bumps") {
  const auto prm = default_c0();
  const auto ops = c0_operators(potentials::make_c0_family(prm));
  const auto g = GridSpec::over(prm.domain, 61, 61);
  for (int t = 0; t < 10; ++t) {
    const CGrid u = bump_grid(g, rand_in(0.55, 0.95), rand_in(0.55, 0.95),
                              rand_in(0.5, 0.8), rand_in(0.5, 1.5));
    CHECK(commutator_residual(ops.H, ops.F, u) < 1e-4);
  }
}

TEST_CASE("equal spectral weights collapse the second eigenvalue") {
  auto prm = default_c0();
  prm.eps1 = prm.eps2 = 0.42;
  const auto ops = c0_operators(potentials::make_c0_family(prm));
  CHECK(ops.mu == 0.0);
  CHECK(ops.lambda == Catch::Approx(0.42).margin(1e-15));
}

TEST_CASE("rescaled frame solutions of the cubic family solve the Laplace pair") {
  const auto prm = monopole_c1();
  const auto P = potentials::make_c1_family(prm);
  const auto ops = c1_operator(prm);
  CHECK(ops.H.eigen == Catch::Approx(0.05).margin(1e-15));
  CHECK(ops.Hx.eigen == ops.H.eigen);
  CHECK(ops.F.eigen == Catch::Approx(-0.1).margin(1e-15));

  const auto g = GridSpec::over(prm.domain, 41, 41);
  const auto frames = frame::integrate_grid(P, g);
  const auto rescale = c1_rescale(prm);
  for (int col = 0; col < 4; ++col) {
    const CGrid u = scaled_grid(frame_component(frames, 0, col), rescale);
    CHECK(eigen_residual(ops.H, u, ops.H.eigen) < 1e-3);
    CHECK(eigen_residual(ops.Hx, u, ops.Hx.eigen) < 1e-3);
    CHECK(eigen_residual(ops.F, u, ops.F.eigen) < 1e-3);
  }
}

TEST_CASE("covariant and eliminated forms of the cubic-family operator agree") {
  const auto prm = monopole_c1();
  const auto ops = c1_operator(prm);
  for (int t = 0; t < 20; ++t) {
    const double r1 = rand_in(-0.75, -0.25), r2 = rand_in(0.25, 0.75);
    const OpCoeffs a = ops.H.coeffs(r1, r2);
    const OpCoeffs b = ops.Hx.coeffs(r1, r2);
    CHECK(std::abs(a.d11 - b.d11) < 1e-11);
    CHECK(std::abs(a.d22 - b.d22) < 1e-11);
    CHECK(std::abs(a.d1 - b.d1) < 1e-11);
    CHECK(std::abs(a.d2 - b.d2) < 1e-11);
    CHECK(std::abs(a.c - b.c) < 1e-11);
  }
}

TEST_CASE("the cubic pair commutes on random bumps") {
  const auto prm = monopole_c1();
  const auto ops = c1_operator(prm);
  const auto g = GridSpec::over(prm.domain, 121, 121);
  for (int t = 0; t < 10; ++t) {
    const CGrid u = bump_grid(g, rand_in(-0.65, -0.35), rand_in(0.35, 0.65),
                              rand_in(0.65, 0.85), rand_in(0.5, 1.5));
    CHECK(commutator_residual(ops.Hx, ops.F, u) < 1e-4);
  }
}

TEST_CASE("the scalar potential is the curvature plus the spectral ramp") {
  const auto prm = monopole_c1();
  const auto ops = c1_operator(prm);
  for (int t = 0; t < 20; ++t) {
    const double r1 = rand_in(-0.75, -0.25), r2 = rand_in(0.25, 0.75);
    const double K = gaussian_curvature(ops.H.g11, ops.H.g22, r1, r2);
    const double h = ops.H.scalar(r1, r2);
    CHECK(std::abs(h - K - 0.5 * prm.eps2 * (r1 + r2)) < 1e-8);
  }

  auto flat = prm;
  flat.eps2 = 0;
  const auto ops0 = c1_operator(flat);
  const double K = gaussian_curvature(ops0.H.g11, ops0.H.g22, -0.5, 0.5);
  CHECK(ops0.H.scalar(-0.5, 0.5) == Catch::Approx(K).margin(1e-10));

  potentials::C1Params unit;
  unit.f1 = Fn1::constant(1);
  unit.f2 = Fn1::constant(1);
  unit.eps2 = 0.3;
  unit.domain = {0.0, 0.4, 1.0, 1.6};
  const auto opsu = c1_operator(unit);
  for (int t = 0; t < 10; ++t) {
    const double r1 = rand_in(0.0, 0.4), r2 = rand_in(1.0, 1.6);
    const double Ku = gaussian_curvature(opsu.H.g11, opsu.H.g22, r1, r2);
    CHECK(std::abs(opsu.H.scalar(r1, r2) - Ku - 0.15 * (r1 + r2)) < 1e-10);
  }
}

TEST_CASE("gaussian curvature of the separable metrics") {
  // both cubic families flatten the rotation metric to constant curvature 1
  const auto ops = c1_operator(monopole_c1());
  for (int t = 0; t < 20; ++t) {
    const double r1 = rand_in(-0.75, -0.25), r2 = rand_in(0.25, 0.75);
    CHECK(gaussian_curvature(ops.H.g11, ops.H.g22, r1, r2) == Catch::Approx(1.0).margin(1e-6));
  }
  potentials::C1Params generic;
  generic.f1 = Fn1::polynomial({0.5, -3, 1, 4});
  generic.f2 = Fn1::polynomial({-0.5, 3, -1, -4});
  generic.domain = {-0.1, 0.1, 0.45, 0.6};
  const auto opsg = c1_operator(generic);
  for (int t = 0; t < 10; ++t) {
    const double r1 = rand_in(-0.09, 0.09), r2 = rand_in(0.46, 0.59);
    CHECK(gaussian_curvature(opsg.H.g11, opsg.H.g22, r1, r2) ==
          Catch::Approx(1.0).margin(1e-6));
  }

  // f1 = f2 = 1 has the closed form K = 1/(R2-R1)^3
  potentials::C1Params unit;
  unit.f1 = Fn1::constant(1);
  unit.f2 = Fn1::constant(1);
  unit.domain = {0.0, 0.4, 1.0, 1.6};
  const auto opsu = c1_operator(unit);
  for (int t = 0; t < 10; ++t) {
    const double r1 = rand_in(0.0, 0.4), r2 = rand_in(1.0, 1.6);
    const double dl = r2 - r1;
    CHECK(gaussian_curvature(opsu.H.g11, opsu.H.g22, r1, r2) ==
          Catch::Approx(1.0 / (dl * dl * dl)).epsilon(1e-9));
  }

  // the curvature is linear in (f1, f2): scaling both by 4 scales K by 4
  auto scaled = monopole_c1();
  const Fn1 f1 = scaled.f1, f2 = scaled.f2;
  scaled.f1 = Fn1([f1](int k, double t) { return 4 * f1.d(k, t); }, f1.max_order());
  scaled.f2 = Fn1([f2](int k, double t) { return 4 * f2.d(k, t); }, f2.max_order());
  const auto ops4 = c1_operator(scaled);
  for (int t = 0; t < 10; ++t) {
    const double r1 = rand_in(-0.75, -0.25), r2 = rand_in(0.25, 0.75);
    const double K = gaussian_curvature(ops.H.g11, ops.H.g22, r1, r2);
    CHECK(gaussian_curvature(ops4.H.g11, ops4.H.g22, r1, r2) ==
          Catch::Approx(4 * K).margin(1e-8));
  }

  CHECK_THROWS_AS(gaussian_curvature(Field2::constant(-1), Field2::constant(1), 0, 0),
                  MetricDegenerate);
  CHECK_THROWS_AS(gaussian_curvature(Field2::constant(1), Field2::constant(0), 0, 0),
                  MetricDegenerate);
}

TEST_CASE("the magnetic field balances the curvature form") {
  const auto prm = monopole_c1();
  CHECK(magnetic_identity_check(prm, GridSpec::over(prm.domain, 21, 21)) < 1e-6);

  potentials::C1Params unit;
  unit.f1 = Fn1::constant(1);
  unit.f2 = Fn1::constant(1);
  unit.domain = {0.0, 0.4, 1.0, 1.6};
  CHECK(magnetic_identity_check(unit, GridSpec::over(unit.domain, 21, 21)) < 1e-8);

  // flipping the potentials' orientation breaks the balance
  auto ops = c1_operator(prm);
  const Field2 A = ops.H.A, B = ops.H.B;
  ops.H.A = Field2([A](double r1, double r2) { return A.jet(r1, r2) * -1.0; });
  ops.H.B = Field2([B](double r1, double r2) { return B.jet(r1, r2) * -1.0; });
  const auto m = magnetic_identity_at(ops, -0.5, 0.5);
  CHECK(std::abs(m.field - m.curvature) > 1e-2);

  GridSpec outside = GridSpec::over({-0.9, -0.2, 0.2, 0.8}, 5, 5);
  CHECK_THROWS_AS(magnetic_identity_check(prm, outside), DomainViolation);
}

TEST_CASE("the lowest-level basis pair is exact") {
  const auto b = landau_basis(0.5);
  CHECK(b.wronskian(0) == 1.0);
  CHECK(b.psi2(0.0) == 0.0);
  for (double y : linspace(-3, 3, 25)) {
    CHECK(std::abs(b.wronskian(y) - 1.0) < 1e-9);
    CHECK(std::abs(b.psi2(-y) + b.psi2(y)) < 1e-11);
    CHECK(b.psi1(y) == Catch::Approx(std::exp(-0.5 * y * y)).epsilon(1e-12));
  }

  const auto num = landau_basis(0.5, false, 3.5);
  for (double y : linspace(-3, 3, 31)) {
    CHECK(std::abs(b.psi1(y) - num.psi1(y)) < 1e-8);
    CHECK(std::abs(b.psi2(y) - num.psi2(y)) < 1e-8);
    CHECK(std::abs(b.psi1.d(1, y) - num.psi1.d(1, y)) < 1e-8);
    CHECK(std::abs(b.psi2.d(1, y) - num.psi2.d(1, y)) < 1e-8);
  }
  CHECK(std::abs(b.psi2(1.0) - num.psi2(1.0)) < 1e-8);

  const auto excited = landau_basis(1.5, false, 3.0);
  for (double y : linspace(-2.9, 2.9, 15))
    CHECK(std::abs(excited.wronskian(y) - 1.0) < 1e-9);

  CHECK_THROWS_AS(landau_basis(1.0), ValidationError);
  CHECK_THROWS_AS(landau_basis(0.5, false, 7.0), OdeBlowUp);
}

TEST_CASE("the canal profile matches the quadrature closed form") {
  const auto b = landau_basis(0.5);
  const auto pt0 = landau_profile_point(b, 1, 0);
  CHECK(std::abs(pt0.z - kProfileZ0) < 1e-10);
  CHECK(std::abs(pt0.radius - kProfileR0) < 1e-10);

  const double I = simpson([](double x) { return std::exp(x * x); }, 0, 1, 1000);
  CHECK(std::abs(I - kIntExpSq) < 1e-10);
  CHECK(pt0.z == Catch::Approx(-1 / I - I / 4).margin(1e-10));
  CHECK(pt0.radius == Catch::Approx(-1 / I + I / 4).margin(1e-10));

  // exactly one pole on [-2,2]: the center-curve denominator vanishes at y = 1
  const auto prof = landau_surface(b, 1, linspace(-2, 2, 161));
  CHECK(prof.pole_count == 1);
  int poles = 0;
  for (const auto& pt : prof.points) {
    if (pt.pole) {
      ++poles;
      CHECK(std::abs(pt.y - 1.0) < 0.026);
    } else {
      CHECK(std::isfinite(pt.z));
      CHECK(std::isfinite(pt.radius));
    }
  }
  CHECK(poles == 1);

  // profile values agree with the ratios of the hexaspherical components
  for (int t = 0; t < 50; ++t) {
    double y = rand_in(-1.9, 1.9);
    if (std::abs(y - 1.0) < 0.1) y -= 0.3;
    const auto pt = landau_profile_point(b, 1, y);
    const auto h = landau_hex(b, 1, y);
    CHECK(h[2] == 0.0);
    CHECK(h[3] == 0.0);
    CHECK(std::abs(pt.z - h[4] / (h[0] + h[1])) < 1e-10);
    CHECK(std::abs(pt.radius - h[5] / (h[0] + h[1])) < 1e-10);
  }

  CHECK_THROWS_AS(landau_profile_point(b, 0, 0.3), ValidationError);
  CHECK_THROWS_AS(landau_profile_point(b, 1, 1.0), PoleOnGrid);
}

TEST_CASE("canal spheres lie on the quadric") {
  const auto b = landau_basis(0.5);
  for (int t = 0; t < 100; ++t) {
    const auto h = landau_hex(b, 1, rand_in(-1.8, 1.8));
    CHECK(std::abs(surface::quadric_residual(h)) < 1e-10);
  }
  for (int t = 0; t < 20; ++t) {
    const auto h = landau_hex(b, 0.7, rand_in(-1.5, 1.5));
    CHECK(std::abs(surface::quadric_residual(h)) < 1e-10);
  }
}

TEST_CASE("the twistor line carries the normalized frame") {
  const auto b = landau_basis(0.5);
  for (int t = 0; t < 10; ++t) {
    const double x = rand_in(0, 2), y = rand_in(-1.5, 1.5);
    const auto tw = landau_twistor(b, 1, x, y);

    const algebra::TwistorVector* v[4] = {&tw.v, &tw.vx, &tw.vy, &tw.vxy};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        const cd g = algebra::herm_product4(*v[i], *v[j]);
        cd want = 0;
        if ((i == 1 && j == 2) || (i == 2 && j == 1)) want = 1;
        if ((i == 0 && j == 3) || (i == 3 && j == 0)) want = -1;
        CHECK(std::abs(g - want) < 1e-8);
      }
    CHECK(std::abs(algebra::det4(tw.v, tw.vx, tw.vy, tw.vxy) - cd(-1, 0)) < 1e-8);

    const auto sphere = landau_twistor_sphere(tw);
    CHECK(sphere.max_imag() < 1e-12);
    const auto h = landau_hex(b, 1, y);
    for (int i = 0; i < 6; ++i) CHECK(std::abs(sphere[i].real() - h[i]) < 1e-10);

    frame::FrameState F;
    F.at = {y, x};
    F.psi = tw.v;
    F.psi1 = tw.vy;
    F.psi2 = tw.vx;
    F.eta = tw.vxy;
    CHECK_NOTHROW(frame::check_frame(F));

    // the enveloped curvature sphere reproduces the revolution profile
    const auto V = surface::curvature_spheres(F).second;
    const auto cr = surface::hex_normalize(V);
    const auto pt = landau_profile_point(b, 1, y);
    CHECK(std::abs(cr.center.x) < 1e-9);
    CHECK(std::abs(cr.center.y) < 1e-9);
    CHECK(cr.center.z == Catch::Approx(pt.z).margin(1e-9));
    CHECK(cr.radius == Catch::Approx(pt.radius).margin(1e-9));
  }

  CHECK_THROWS_AS(landau_twistor(b, 0, 0, 0), ValidationError);
}

TEST_CASE("the twistor components solve the magnetic pair on the plane") {
  const auto g = GridSpec::over({-1, 1, 0, 1}, 61, 61);
  const auto chk = landau_operator_check(1, 1, 0.5, g);
  CHECK(chk.lambda == 0.5);
  CHECK(chk.ksq == 1.0);
  CHECK(chk.res_h < 1e-5);
  CHECK(chk.res_f < 1e-6);

  // normalizing away the field strength: same basis after rescaling
  const auto g2 = GridSpec::over({-0.5, 0.5, 0, 0.5}, 61, 61);
  const auto chk4 = landau_operator_check(4, 1.2, 2.0, g2);
  CHECK(chk4.lambda == 2.0);
  CHECK(chk4.ksq == Catch::Approx(1.44).margin(1e-15));
  CHECK(chk4.res_h < 1e-4);
  CHECK(chk4.res_f < 1e-5);

  const auto [h, f] = landau_operators(1, 0.5);
  for (int t = 0; t < 10; ++t) {
    const CGrid u = bump_grid(g, rand_in(-0.6, 0.6), rand_in(0.3, 0.7),
                              rand_in(0.25, 0.45), rand_in(0.5, 1.5));
    CHECK(commutator_residual(h, f, u) < 1e-6);
  }

  CHECK_THROWS_AS(landau_operator_check(1, 1, 0.5, GridSpec::over({0, 1, 0, 1}, 4, 4)),
                  StencilOutOfDomain);
  CHECK_THROWS_AS(landau_operator_check(-1, 1, 0.5, g), ValidationError);
}

TEST_CASE("canal frame solutions solve the magnetic pair") {
  potentials::CanalParams prm;
  prm.domain = {0.25, 0.85, 0.0, 0.6};
  const auto P = potentials::make_canal_landau(prm);
  const auto g = GridSpec::over(prm.domain, 61, 61);
  const auto frames = frame::integrate_grid(P, g);
  const auto [h, f] = landau_operators(prm.k, prm.lambda);
  for (int col = 0; col < 4; ++col) {
    const CGrid u = frame_component(frames, 0, col);
    CHECK(eigen_residual(h, u, prm.lambda) < 1e-5);
    CHECK(eigen_residual(f, u, prm.k * prm.k) < 1e-5);
  }
}
