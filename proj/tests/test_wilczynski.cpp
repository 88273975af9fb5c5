#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "liesphere/wilczynski.hpp"

using namespace liesphere;
using namespace liesphere::wilczynski;

namespace {

std::mt19937& rng() {
  static std::mt19937 gen(90517);
  return gen;
}

double rand_in(double a, double b) {
  return std::uniform_real_distribution<double>(a, b)(rng());
}

// beta = x, gamma = y, V = W = (x^2 + y^2)/2: compatible, both potentials
// positive on the square
ProjectivePotentials test_field() {
  ProjectivePotentials P;
  P.beta = Field2::separable(Fn1::identity(), Fn1::constant(1));
  P.gamma = Field2::separable(Fn1::constant(1), Fn1::identity());
  auto half_sq = Field2([](double x, double y) {
    const auto X = FieldJet::var1(x);
    const auto Y = FieldJet::var2(y);
    return 0.5 * (X * X + Y * Y);
  });
  P.V = half_sq;
  P.W = half_sq;
  P.domain = {0.5, 1.5, 0.5, 1.5};
  return P;
}

ProjectivePotentials unit_field() {
  ProjectivePotentials P;
  P.beta = Field2::constant(1);
  P.gamma = Field2::constant(1);
  P.V = Field2::constant(0);
  P.W = Field2::constant(0);
  P.domain = {0, 1, 0, 1};
  return P;
}

Fn1 exp_fn() {
  return Fn1([](int, double t) { return std::exp(t); }, 64);
}

// inverse of t -> t + eps (t - x0)^2 on the branch through x0
Fn1 sqrt_inverse(double eps, double x0) {
  return Fn1(
      [eps, x0](int k, double u) {
        const double A = 1 + 4 * eps * (u - x0);
        if (k == 0) return x0 + (std::sqrt(A) - 1) / (2 * eps);
        double c = 1;
        for (int m = 2; m <= k; ++m) c *= -2.0 * (2 * m - 3);
        return c * std::pow(eps, k - 1) * std::pow(A, 0.5 - k);
      },
      8);
}

double det4_cofactor(const RMat4& m) {
  double det = 0;
  for (int c = 0; c < 4; ++c) {
    double minor[3][3];
    for (int i = 0; i < 3; ++i) {
      int cc = 0;
      for (int j = 0; j < 4; ++j) {
        if (j == c) continue;
        minor[i][cc++] = m[i + 1][j];
      }
    }
    const double d3 = minor[0][0] * (minor[1][1] * minor[2][2] - minor[1][2] * minor[2][1]) -
                      minor[0][1] * (minor[1][0] * minor[2][2] - minor[1][2] * minor[2][0]) +
                      minor[0][2] * (minor[1][0] * minor[2][1] - minor[1][1] * minor[2][0]);
    det += (c % 2 ? -1.0 : 1.0) * m[0][c] * d3;
  }
  return det;
}

RVec4 rand_vec4(double lo, double hi) {
  RVec4 v;
  for (double& x : v) x = rand_in(lo, hi);
  return v;
}

}  // namespace

TEST_CASE("compatibility residuals of the projective linear system") {
  const auto U = unit_field();
  for (int t = 0; t < 5; ++t) {
    const auto r = proj_gc_residual(U, rand_in(0, 1), rand_in(0, 1));
    CHECK(r[0] == 0.0);
    CHECK(r[1] == 0.0);
    CHECK(r[2] == 0.0);
  }

  const auto P = test_field();
  for (int t = 0; t < 20; ++t) {
    const auto r = proj_gc_residual(P, rand_in(0.5, 1.5), rand_in(0.5, 1.5));
    for (double v : r) CHECK(std::abs(v) < 1e-12);
  }

  // beta = e^x, gamma = e^y with V = W = e^(x+y) solving the last two
  // conditions; the first residual has the closed form e^(x+y) (e^y - e^x)
  ProjectivePotentials E;
  E.beta = Field2::separable(exp_fn(), Fn1::constant(1));
  E.gamma = Field2::separable(Fn1::constant(1), exp_fn());
  E.V = Field2::separable(exp_fn(), exp_fn());
  E.W = E.V;
  E.domain = {0, 1, 0, 1};
  for (int t = 0; t < 10; ++t) {
    const double x = rand_in(0, 1), y = rand_in(0, 1);
    const auto r = proj_gc_residual(E, x, y);
    CHECK(std::abs(r[0] - std::exp(x + y) * (std::exp(y) - std::exp(x))) < 1e-9);
    CHECK(std::abs(r[1]) < 1e-12);
    CHECK(std::abs(r[2]) < 1e-12);
  }

  // an x-dependent perturbation of W shows up in the second residual
  ProjectivePotentials Q = E;
  Q.W = Field2([base = E.W](double x, double y) {
    return base.jet(x, y) + 0.1 * FieldJet::var1(x) * FieldJet::var2(y);
  });
  for (int t = 0; t < 5; ++t) {
    const double x = rand_in(0, 1), y = rand_in(0.2, 1);
    const auto r = proj_gc_residual(Q, x, y);
    CHECK(r[1] == Catch::Approx(0.1 * y).margin(1e-12));
  }

  // sampled backing propagates its stencil guard
  ProjectivePotentials S = test_field();
  S.beta = sampled_field(sample(S.beta, GridSpec::over(S.domain, 21, 21)));
  CHECK_THROWS_AS(proj_gc_residual(S, 0.5, 1.0), StencilOutOfDomain);
}

TEST_CASE("frame coefficients and connection matrices") {
  const auto U = unit_field();
  const auto fc = frame_coeffs(U, 0.3, 0.7);
  CHECK(fc.k == 1.0);
  CHECK(fc.l == 1.0);
  CHECK(fc.a == 0.0);
  CHECK(fc.b == 0.0);

  const auto [m1, m2] = proj_frame_connection(U, 0.3, 0.7);
  const double want1[4][4] = {{0, 1, 0, 0}, {0, 0, 1, 0}, {0.5, 0, 0, 1}, {0, 0.5, 0, 0}};
  const double want2[4][4] = {{0, 0, 1, 0}, {0.5, 0, 0, 1}, {0, 1, 0, 0}, {0, 0, 0.5, 0}};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      CHECK(m1[i][j] == want1[i][j]);
      CHECK(m2[i][j] == want2[i][j]);
    }

  const auto P = test_field();
  for (int t = 0; t < 10; ++t) {
    const auto [a, b] = proj_frame_connection(P, rand_in(0.5, 1.5), rand_in(0.5, 1.5));
    CHECK(a.trace() == 0.0);
    CHECK(b.trace() == 0.0);
  }

  CHECK_THROWS_AS(frame_coeffs(P, 0.0, 1.0), ZeroPotential);
  CHECK_THROWS_AS(frame_coeffs(P, 1.0, 0.0), ZeroPotential);
}

TEST_CASE("projective transport is path independent") {
  const auto P = test_field();
  CHECK_NOTHROW(validate_projective(P));

  ProjectivePotentials bad = P;
  bad.W = Field2([base = P.W](double x, double y) {
    return base.jet(x, y) + 0.05 * FieldJet::var1(x) * FieldJet::var2(y);
  });
  CHECK_THROWS_AS(validate_projective(bad), ValidationError);

  ProjectivePotentials crossing = P;
  crossing.domain = {-0.5, 0.5, 0.5, 1.5};
  CHECK_THROWS_AS(validate_projective(crossing), ZeroPotential);

  CHECK(projective_holonomy_defect(P, {0.6, 1.3, 0.55, 1.35}) < 1e-9);

  const Point2 base{0.5, 0.5}, tgt{1.3, 1.2};
  const auto via_x = integrate_projective(P, base, {base, {tgt.r1, base.r2}, tgt});
  const auto via_y = integrate_projective(P, base, {base, {base.r1, tgt.r2}, tgt});
  CHECK(max_abs(via_x.rows() - via_y.rows()) < 1e-9);
  CHECK(frame_det(via_x) == Catch::Approx(1.0).margin(1e-10));
  CHECK_NOTHROW(check_projective_frame(via_x));

  CHECK_THROWS_AS(integrate_projective(P, base, {base, {2.0, 0.5}}), DomainViolation);
  CHECK_THROWS_AS(integrate_projective(P, base, {{0.7, 0.5}, tgt}), ValidationError);
}

TEST_CASE("the integrated tetrad solves the linear system") {
  const auto P = test_field();
  const auto g = GridSpec::over({0.5, 1.0, 0.5, 1.0}, 101, 101);
  const auto F = integrate_projective_grid(P, g);

  std::array<std::array<RGrid, 4>, 4> comp;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) comp[r][c] = component_grid(F, r, c);

  const int picks[] = {5, 25, 50, 75, 95};
  double worst_conn = 0, worst_sys = 0;
  for (int i : picks)
    for (int j : picks) {
      const double x = g.r1(i), y = g.r2(j);
      const auto [m1, m2] = proj_frame_connection(P, x, y);
      const RMat4& at = F.at(i, j);
      const RMat4 p1 = m1 * at, p2 = m2 * at;
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
          worst_conn = std::max(
              worst_conn, std::abs(fd::partial(comp[r][c], 1, 0, i, j) - p1[r][c]));
          worst_conn = std::max(
              worst_conn, std::abs(fd::partial(comp[r][c], 0, 1, i, j) - p2[r][c]));
        }
      // scalar system on the surface row:
      //   r_xx = beta r_y + (1/2)(V - beta_y) r
      //   r_yy = gamma r_x + (1/2)(W - gamma_x) r
      const double be = P.beta(x, y), ga = P.gamma(x, y);
      const double b2 = P.beta.d(0, 1, x, y), g1 = P.gamma.d(1, 0, x, y);
      const double V = P.V(x, y), W = P.W(x, y);
      for (int c = 0; c < 4; ++c) {
        const RGrid& u = comp[0][c];
        const double rv = u.at(i, j);
        worst_sys = std::max(worst_sys, std::abs(fd::partial(u, 2, 0, i, j) -
                                                 be * fd::partial(u, 0, 1, i, j) -
                                                 0.5 * (V - b2) * rv));
        worst_sys = std::max(worst_sys, std::abs(fd::partial(u, 0, 2, i, j) -
                                                 ga * fd::partial(u, 1, 0, i, j) -
                                                 0.5 * (W - g1) * rv));
      }
    }
  CHECK(worst_conn < 1e-7);
  CHECK(worst_sys < 1e-7);

  CHECK(projective_det(F.at(g.n1 - 1, g.n2 - 1)) == Catch::Approx(1.0).margin(1e-10));
}

TEST_CASE("wedge coordinates satisfy the quadric and determinant pairings") {
  const Plucker6 e01 = plucker_embed({1, 0, 0, 0}, {0, 1, 0, 0});
  CHECK(e01[0] == 1.0);
  for (int c = 1; c < 6; ++c) CHECK(e01[c] == 0.0);

  for (int t = 0; t < 20; ++t) {
    const RVec4 a = rand_vec4(-2, 2), b = rand_vec4(-2, 2);
    const Plucker6 p = plucker_embed(a, b);
    CHECK(std::abs(plucker_quadric_residual(p)) < 1e-12);
    CHECK(plucker_product(p, p) == Catch::Approx(-plucker_quadric_residual(p)).margin(1e-13));

    const Plucker6 q = plucker_embed(b, a);
    RVec4 a2, b3;
    for (int c = 0; c < 4; ++c) {
      a2[c] = 2 * a[c];
      b3[c] = 3 * b[c];
    }
    const Plucker6 s = plucker_embed(a2, b3);
    for (int c = 0; c < 6; ++c) {
      CHECK(q[c] == Catch::Approx(-p[c]).margin(1e-13));
      CHECK(s[c] == Catch::Approx(6 * p[c]).margin(1e-12));
    }
  }

  for (int t = 0; t < 10; ++t) {
    RMat4 m;
    for (int i = 0; i < 4; ++i) m.m[static_cast<size_t>(i)] = rand_vec4(-2, 2);
    CHECK(projective_det(m) == Catch::Approx(det4_cofactor(m)).margin(1e-11));
  }

  RVec4 a = rand_vec4(-1, 1), ascaled;
  for (int c = 0; c < 4; ++c) ascaled[c] = -1.7 * a[c];
  CHECK_THROWS_AS(plucker_embed(a, ascaled), DependentVectors);
  CHECK_THROWS_AS(plucker_embed({0, 0, 0, 0}, a), DependentVectors);

  RMat4 stretched = RMat4::identity();
  stretched[0][0] = 2;
  CHECK_THROWS_AS(check_projective_frame(ProjectiveFrame::from_rows({}, stretched)),
                  InvalidFrame);
}

TEST_CASE("tetrad bivectors reproduce the constant scalar-product table") {
  const auto target = plucker_gram_target();

  const auto id = plucker_gram(plucker_frame(standard_projective_tetrad()));
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) CHECK(id[i][j] == target[i][j]);

  const auto P = test_field();
  const Point2 base{0.5, 0.5}, tgt{1.2, 1.1};
  const auto F = integrate_projective(P, base, {base, {tgt.r1, base.r2}, tgt});
  const auto gram = plucker_gram(plucker_frame(F));
  CHECK(gram[kA][kA] == Catch::Approx(1.0).margin(1e-9));
  CHECK(gram[kB][kB] == Catch::Approx(-1.0).margin(1e-9));
  CHECK(gram[kU][kP] == Catch::Approx(-1.0).margin(1e-9));
  CHECK(gram[kV][kQ] == Catch::Approx(1.0).margin(1e-9));
  double worst = 0;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) worst = std::max(worst, std::abs(gram[i][j] - target[i][j]));
  CHECK(worst < 1e-9);
}

TEST_CASE("the six bivectors satisfy the first-order system") {
  const auto U = unit_field();
  const auto gu = GridSpec::over({0, 0.5, 0, 0.5}, 81, 81);
  const auto cu = plucker_system_check(U, integrate_projective_grid(U, gu));
  CHECK(cu.residual < 1e-9);
  CHECK(cu.table < 1e-10);

  const auto P = test_field();
  const auto g = GridSpec::over({0.5, 1.0, 0.5, 1.0}, 101, 101);
  const auto F = integrate_projective_grid(P, g);
  const auto cp = plucker_system_check(P, F);
  CHECK(cp.residual < 1e-6);
  CHECK(cp.table < 1e-9);

  // Laplace pair linking the two focal surfaces: U_x = beta V, V_y = gamma U
  Grid<PluckerFrame> L(g);
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i)
      L.at(i, j) = plucker_frame(ProjectiveFrame::from_rows({g.r1(i), g.r2(j)}, F.at(i, j)));
  const int picks[] = {10, 50, 90};
  double worst = 0;
  for (int i : picks)
    for (int j : picks) {
      const double be = P.beta(g.r1(i), g.r2(j)), ga = P.gamma(g.r1(i), g.r2(j));
      for (int c = 0; c < 6; ++c) {
        const double ux = (-L.at(i + 2, j)[kU][c] + 8 * L.at(i + 1, j)[kU][c] -
                           8 * L.at(i - 1, j)[kU][c] + L.at(i - 2, j)[kU][c]) /
                          (12 * g.h1);
        const double vy = (-L.at(i, j + 2)[kV][c] + 8 * L.at(i, j + 1)[kV][c] -
                           8 * L.at(i, j - 1)[kV][c] + L.at(i, j - 2)[kV][c]) /
                          (12 * g.h2);
        worst = std::max(worst, std::abs(ux - be * L.at(i, j)[kV][c]));
        worst = std::max(worst, std::abs(vy - ga * L.at(i, j)[kU][c]));
      }
    }
  CHECK(worst < 1e-6);

  CHECK_THROWS_AS(
      plucker_system_check(U, integrate_projective_grid(U, GridSpec::over({0, 0.5, 0, 0.5}, 4, 4))),
      StencilOutOfDomain);
}

TEST_CASE("reparametrization covariance of potentials, forms, and tetrad") {
  const auto P = test_field();
  const auto f = Fn1::polynomial({0.0375, 0.85, 0.15});  // x + 0.15 (x - 0.5)^2
  const auto g = Fn1::polynomial({0.025, 0.9, 0.1});     // y + 0.10 (y - 0.5)^2
  const potentials::GaugeMap G{f, g, sqrt_inverse(0.15, 0.5), sqrt_inverse(0.1, 0.5)};

  for (int t = 0; t < 5; ++t) {
    const double x = rand_in(0.5, 1.5), y = rand_in(0.5, 1.5);
    CHECK(G.finv(f(x)) == Catch::Approx(x).margin(1e-12));
    CHECK(G.finv.d(1, f(x)) * f.d(1, x) == Catch::Approx(1.0).margin(1e-12));
    CHECK(G.ginv(g(y)) == Catch::Approx(y).margin(1e-12));
    CHECK(G.ginv.d(2, g(y)) * g.d(1, y) * g.d(1, y) +
              G.ginv.d(1, g(y)) * g.d(2, y) ==
          Catch::Approx(0.0).margin(1e-12));
  }

  const auto Pg = apply_gauge(P, G);
  CHECK(Pg.domain.r1min == Catch::Approx(f(0.5)).margin(1e-15));
  CHECK(Pg.domain.r1max == Catch::Approx(f(1.5)).margin(1e-15));
  CHECK_NOTHROW(validate_projective(Pg));
  for (int t = 0; t < 10; ++t) {
    const auto r = proj_gc_residual(Pg, rand_in(Pg.domain.r1min, Pg.domain.r1max),
                                    rand_in(Pg.domain.r2min, Pg.domain.r2max));
    for (double v : r) CHECK(std::abs(v) < 1e-8);
  }

  // the metric is invariant, the cubic form picks up the factor f' g'
  for (int t = 0; t < 10; ++t) {
    const double x = rand_in(0.5, 1.5), y = rand_in(0.5, 1.5);
    const double d1 = rand_in(-1, 1), d2 = rand_in(-1, 1);
    const double fp = f.d(1, x), gp = g.d(1, y);
    const auto base = proj_forms(P, x, y, d1, d2);
    const auto mapped = proj_forms(Pg, f(x), g(y), fp * d1, gp * d2);
    CHECK(mapped.metric == Catch::Approx(base.metric).margin(1e-10));
    CHECK(mapped.cubic == Catch::Approx(fp * gp * base.cubic).margin(1e-10));
  }

  // with unit gauge jets at the base corner, the pulled-back tetrad rows are
  // plain rescalings: r by s, r1 by s/f', r2 by s/g', eta by s/(f' g'),
  // s = sqrt(f' g')
  const Point2 base{0.5, 0.5};
  for (int t = 0; t < 5; ++t) {
    const double x = rand_in(0.6, 1.5), y = rand_in(0.6, 1.5);
    const auto F = integrate_projective(P, base, {base, {x, base.r2}, {x, y}});
    const Point2 tg{f(x), g(y)};
    const auto Fg = integrate_projective(Pg, base, {base, {tg.r1, base.r2}, tg});
    const double fp = f.d(1, x), gp = g.d(1, y);
    const double s = std::sqrt(fp * gp);
    for (int c = 0; c < 4; ++c) {
      CHECK(Fg.r[c] == Catch::Approx(s * F.r[c]).margin(1e-8));
      CHECK(Fg.r1[c] == Catch::Approx(s / fp * F.r1[c]).margin(1e-8));
      CHECK(Fg.r2[c] == Catch::Approx(s / gp * F.r2[c]).margin(1e-8));
      CHECK(Fg.eta[c] == Catch::Approx(s / (fp * gp) * F.eta[c]).margin(1e-8));
    }
  }
}
