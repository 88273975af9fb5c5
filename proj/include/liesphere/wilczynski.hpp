#pragma once
// Real projective companion of the conformal construction: the linear system
//   r_xx = beta r_y + (1/2)(V - beta_y) r
//   r_yy = gamma r_x + (1/2)(W - gamma_x) r
// with real potentials on asymptotic coordinates (x, y) = (axis 1, axis 2),
// its compatibility residuals, the moving tetrad (r, r1, r2, eta) with the
// 4x4 connection pair, and the wedge picture: tangent lines of the tetrad
// land on the quadric p01 p23 + p02 p31 + p03 p12 = 0 in P^5, where the six
// bivectors (U, A, P, V, B, Q) obey a first-order 6x6 system whose constant
// Gram table (U,P) = -1, (A,A) = 1, (V,Q) = 1, (B,B) = -1 has signature
// (3,3). The scalar product is frozen as minus one half of the polarized
// quadric form; with that normalization every determinant-one tetrad
// reproduces the table identically.

#include <array>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "liesphere/core.hpp"
#include "liesphere/errors.hpp"
#include "liesphere/fields.hpp"
#include "liesphere/ode.hpp"
#include "liesphere/potentials.hpp"

namespace liesphere::wilczynski {

using RVec4 = std::array<double, 4>;

struct RMat4 {
  std::array<RVec4, 4> m{};

  RVec4& operator[](int i) { return m[static_cast<size_t>(i)]; }
  const RVec4& operator[](int i) const { return m[static_cast<size_t>(i)]; }

  static RMat4 identity() {
    RMat4 r;
    for (int i = 0; i < 4; ++i) r[i][i] = 1;
    return r;
  }

  RMat4 operator+(const RMat4& o) const {
    RMat4 r;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) r[i][j] = m[i][j] + o[i][j];
    return r;
  }
  RMat4 operator-(const RMat4& o) const {
    RMat4 r;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) r[i][j] = m[i][j] - o[i][j];
    return r;
  }
  RMat4 operator*(const RMat4& o) const {
    RMat4 r;
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < 4; ++k) {
        const double a = m[i][k];
        if (a == 0) continue;
        for (int j = 0; j < 4; ++j) r[i][j] += a * o[k][j];
      }
    return r;
  }
  RMat4 operator*(double s) const {
    RMat4 r;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) r[i][j] = m[i][j] * s;
    return r;
  }
  double trace() const { return m[0][0] + m[1][1] + m[2][2] + m[3][3]; }
};

inline RMat4 operator*(double s, const RMat4& a) { return a * s; }

inline double max_abs(const RMat4& a) {
  double m = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m = std::max(m, std::abs(a[i][j]));
  return m;
}

struct ProjectivePotentials {
  Field2 beta, gamma, V, W;
  Rect domain{};
};

// Residuals of the three compatibility conditions (left minus right):
//   beta_yyy - 2 beta_y W - beta W_y = gamma_xxx - 2 gamma_x V - gamma V_x
//   W_x = 2 gamma beta_y + beta gamma_y
//   V_y = 2 beta gamma_x + gamma beta_x
inline std::array<double, 3> proj_gc_residual(const ProjectivePotentials& P, double x, double y) {
  auto bj = P.beta.jet(x, y);
  auto gj = P.gamma.jet(x, y);
  auto Vj = P.V.jet(x, y);
  auto Wj = P.W.jet(x, y);
  const double be = bj.value(), b1 = bj.partial(1, 0), b2 = bj.partial(0, 1),
               b222 = bj.partial(0, 3);
  const double ga = gj.value(), g1 = gj.partial(1, 0), g2 = gj.partial(0, 1),
               g111 = gj.partial(3, 0);
  const double V = Vj.value(), V1 = Vj.partial(1, 0), V2 = Vj.partial(0, 1);
  const double W = Wj.value(), W1 = Wj.partial(1, 0), W2 = Wj.partial(0, 1);
  return {(b222 - 2 * b2 * W - be * W2) - (g111 - 2 * g1 * V - ga * V1),
          W1 - 2 * ga * b2 - be * g2, V2 - 2 * be * g1 - ga * b1};
}

// k = beta gamma - (ln beta)_xy,  l = beta gamma - (ln gamma)_xy,
// a = W - (ln beta)_yy - (1/2)(ln beta)_y^2,
// b = V - (ln gamma)_xx - (1/2)(ln gamma)_x^2
struct FrameCoeffs {
  double k = 0, l = 0, a = 0, b = 0;
};

inline FrameCoeffs frame_coeffs(const ProjectivePotentials& P, double x, double y) {
  auto bj = P.beta.jet(x, y);
  auto gj = P.gamma.jet(x, y);
  const double be = bj.value(), ga = gj.value();
  if (std::abs(be) < 1e-14) throw ZeroPotential("frame coeffs: beta vanishes");
  if (std::abs(ga) < 1e-14) throw ZeroPotential("frame coeffs: gamma vanishes");
  const double lb2 = bj.partial(0, 1) / be;
  const double lb22 = (be * bj.partial(0, 2) - bj.partial(0, 1) * bj.partial(0, 1)) / (be * be);
  const double lb12 = (be * bj.partial(1, 1) - bj.partial(1, 0) * bj.partial(0, 1)) / (be * be);
  const double lg1 = gj.partial(1, 0) / ga;
  const double lg11 = (ga * gj.partial(2, 0) - gj.partial(1, 0) * gj.partial(1, 0)) / (ga * ga);
  const double lg12 = (ga * gj.partial(1, 1) - gj.partial(1, 0) * gj.partial(0, 1)) / (ga * ga);
  FrameCoeffs out;
  out.k = be * ga - lb12;
  out.l = be * ga - lg12;
  out.a = P.W(x, y) - lb22 - 0.5 * lb2 * lb2;
  out.b = P.V(x, y) - lg11 - 0.5 * lg1 * lg1;
  return out;
}

// Coefficient matrices of d_x F = M1 F, d_y F = M2 F on the stacked tetrad
// (r, r1, r2, eta):
//   M1 = [[k1, 1, 0, 0], [b/2, -k1, beta, 0], [k/2, 0, k1, 1],
//         [beta a / 2, k/2, b/2, -k1]],    k1 = (1/2) gamma_x / gamma
//   M2 = [[k2, 0, 1, 0], [l/2, k2, 0, 1], [a/2, gamma, -k2, 0],
//         [gamma b / 2, a/2, l/2, -k2]],   k2 = (1/2) beta_y / beta
// Both are traceless, so transport preserves the tetrad determinant.
inline std::pair<RMat4, RMat4> proj_frame_connection(const ProjectivePotentials& P, double x,
                                                     double y) {
  const auto fc = frame_coeffs(P, x, y);
  const double be = P.beta(x, y), ga = P.gamma(x, y);
  const double k1 = 0.5 * P.gamma.d(1, 0, x, y) / ga;
  const double k2 = 0.5 * P.beta.d(0, 1, x, y) / be;
  RMat4 m1;
  m1[0][0] = k1;
  m1[0][1] = 1;
  m1[1][0] = fc.b / 2;
  m1[1][1] = -k1;
  m1[1][2] = be;
  m1[2][0] = fc.k / 2;
  m1[2][2] = k1;
  m1[2][3] = 1;
  m1[3][0] = be * fc.a / 2;
  m1[3][1] = fc.k / 2;
  m1[3][2] = fc.b / 2;
  m1[3][3] = -k1;
  RMat4 m2;
  m2[0][0] = k2;
  m2[0][2] = 1;
  m2[1][0] = fc.l / 2;
  m2[1][1] = k2;
  m2[1][3] = 1;
  m2[2][0] = fc.a / 2;
  m2[2][1] = ga;
  m2[2][2] = -k2;
  m2[3][0] = ga * fc.b / 2;
  m2[3][1] = fc.a / 2;
  m2[3][2] = fc.l / 2;
  m2[3][3] = -k2;
  return {m1, m2};
}

// Throws unless beta and gamma stay away from zero on the domain and the
// compatibility residuals are below tol on a validation grid.
inline void validate_projective(const ProjectivePotentials& P, int n = 21,
                                double tol = kTolGcAnalytic) {
  const Rect box = P.domain.inset(0.05 * std::min(P.domain.span1(), P.domain.span2()));
  auto g = GridSpec::over(box, n, n);
  double bmin = std::numeric_limits<double>::max(), bmax = -bmin;
  double gmin = bmin, gmax = -bmin;
  double worst = 0;
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) {
      const double x = g.r1(i), y = g.r2(j);
      const double be = P.beta(x, y), ga = P.gamma(x, y);
      bmin = std::min(bmin, be);
      bmax = std::max(bmax, be);
      gmin = std::min(gmin, ga);
      gmax = std::max(gmax, ga);
      auto r = proj_gc_residual(P, x, y);
      for (double v : r) worst = std::max(worst, std::abs(v));
    }
  if (bmin <= 0 && bmax >= 0) throw ZeroPotential("validate: beta crosses zero on the domain");
  if (gmin <= 0 && gmax >= 0) throw ZeroPotential("validate: gamma crosses zero on the domain");
  if (worst > tol) throw ValidationError("validate: compatibility residual too large");
}

// The reparametrization x -> f(x), y -> g(y) rescales the tetrad by
// sqrt(f' g') and acts on the potentials by the same law as on the conformal
// ones, so the pull-back is delegated:
//   beta* = beta g'/(f')^2,  gamma* = gamma f'/(g')^2,
//   V* = (V + S(f))/(f')^2,  W* = (W + S(g))/(g')^2.
inline ProjectivePotentials apply_gauge(const ProjectivePotentials& P,
                                        const potentials::GaugeMap& G) {
  potentials::PotentialField t;
  t.p = P.beta;
  t.q = P.gamma;
  t.V = P.V;
  t.W = P.W;
  t.domain = P.domain;
  t = potentials::apply_gauge(t, G);
  return {t.p, t.q, t.V, t.W, t.domain};
}

// Values of the projective metric 2 beta gamma dx dy (invariant) and of the
// cubic form beta dx^3 + gamma dy^3 (covariant with conformal factor f' g')
// on a tangent displacement (d1, d2).
struct ProjForms {
  double metric;
  double cubic;
};

inline ProjForms proj_forms(const ProjectivePotentials& P, double x, double y, double d1,
                            double d2) {
  const double be = P.beta(x, y), ga = P.gamma(x, y);
  return {2 * be * ga * d1 * d2, be * d1 * d1 * d1 + ga * d2 * d2 * d2};
}

// ---------------------------------------------------------------------------
// Wedge coordinates. Component order: (p01, p02, p03, p23, p31, p12).

using Plucker6 = std::array<double, 6>;

namespace detail {

inline Plucker6 wedge(const RVec4& a, const RVec4& b) {
  return {a[0] * b[1] - a[1] * b[0], a[0] * b[2] - a[2] * b[0], a[0] * b[3] - a[3] * b[0],
          a[2] * b[3] - a[3] * b[2], a[3] * b[1] - a[1] * b[3], a[1] * b[2] - a[2] * b[1]};
}

}  // namespace detail

// Line through a and b as a point on the quadric; scale-equivariant in both
// arguments.
inline Plucker6 plucker_embed(const RVec4& a, const RVec4& b) {
  const Plucker6 p = detail::wedge(a, b);
  double na = 0, nb = 0, np = 0;
  for (double v : a) na = std::max(na, std::abs(v));
  for (double v : b) nb = std::max(nb, std::abs(v));
  for (double v : p) np = std::max(np, std::abs(v));
  if (np <= 1e-12 * na * nb) throw DependentVectors("plucker embed: vectors are dependent");
  return p;
}

inline double plucker_quadric_residual(const Plucker6& p) {
  return p[0] * p[3] + p[1] * p[4] + p[2] * p[5];
}

// Frozen normalization: minus one half of the polarized quadric form, so that
// (xi, xi) = -quadric(xi) and (a^b, c^d) = -(1/2) det(a, b, c, d).
inline double plucker_product(const Plucker6& a, const Plucker6& b) {
  return -0.5 * (a[0] * b[3] + b[0] * a[3] + a[1] * b[4] + b[1] * a[4] + a[2] * b[5] +
                 b[2] * a[5]);
}

// ---------------------------------------------------------------------------
// Tetrad transport

struct ProjectiveFrame {
  Point2 at{};
  RVec4 r{}, r1{}, r2{}, eta{};

  // tetrad stacked as matrix rows, in the order r, r1, r2, eta
  RMat4 rows() const {
    RMat4 m;
    const RVec4* v[4] = {&r, &r1, &r2, &eta};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) m[i][j] = (*v[i])[j];
    return m;
  }
  static ProjectiveFrame from_rows(Point2 at, const RMat4& m) {
    ProjectiveFrame f;
    f.at = at;
    RVec4* v[4] = {&f.r, &f.r1, &f.r2, &f.eta};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) (*v[i])[j] = m[i][j];
    return f;
  }
};

inline double projective_det(const RMat4& m) {
  return -2.0 * plucker_product(detail::wedge(m[0], m[1]), detail::wedge(m[2], m[3]));
}

inline double frame_det(const ProjectiveFrame& F) { return projective_det(F.rows()); }

inline ProjectiveFrame standard_projective_tetrad(Point2 at = {}) {
  return ProjectiveFrame::from_rows(at, RMat4::identity());
}

inline void check_projective_frame(const ProjectiveFrame& F, double tol = 1e-8) {
  if (std::abs(frame_det(F) - 1.0) > tol)
    throw InvalidFrame("projective frame: determinant is not 1");
}

namespace detail {

inline RMat4 transport_segment(const ProjectivePotentials& P, RMat4 G, Point2 a, Point2 b,
                               double h) {
  const double d1 = b.r1 - a.r1, d2 = b.r2 - a.r2;
  const double len = std::hypot(d1, d2);
  if (len == 0) return G;
  auto rhs = [&](double t, const RMat4& g) {
    const auto c = proj_frame_connection(P, a.r1 + t * d1, a.r2 + t * d2);
    return (d1 * c.first + d2 * c.second) * g;
  };
  return rk4_integrate(rhs, 0.0, 1.0, std::move(G), h / len);
}

inline void check_path(const ProjectivePotentials& P, Point2 base, const ProjectiveFrame& init,
                       const std::vector<Point2>& path) {
  if (path.empty()) throw ValidationError("projective transport: empty path");
  if (std::abs(path.front().r1 - base.r1) > 1e-12 || std::abs(path.front().r2 - base.r2) > 1e-12)
    throw ValidationError("projective transport: path must start at the base point");
  if (std::abs(init.at.r1 - base.r1) > 1e-12 || std::abs(init.at.r2 - base.r2) > 1e-12)
    throw ValidationError("projective transport: initial frame not anchored at the base point");
  for (const auto& pt : path)
    if (!P.domain.contains(pt.r1, pt.r2, 1e-12))
      throw DomainViolation("projective transport: path leaves the domain");
  check_projective_frame(init);
}

}  // namespace detail

inline ProjectiveFrame integrate_projective(const ProjectivePotentials& P, Point2 base,
                                            const ProjectiveFrame& init,
                                            const std::vector<Point2>& path,
                                            double h = kDefaultOdeStep) {
  detail::check_path(P, base, init, path);
  RMat4 g = init.rows();
  for (size_t s = 0; s + 1 < path.size(); ++s)
    g = detail::transport_segment(P, g, path[s], path[s + 1], h);
  return ProjectiveFrame::from_rows(path.back(), g);
}

inline ProjectiveFrame integrate_projective(const ProjectivePotentials& P, Point2 base,
                                            const std::vector<Point2>& path,
                                            double h = kDefaultOdeStep) {
  return integrate_projective(P, base, standard_projective_tetrad(base), path, h);
}

// Max-norm defect of transporting around the rectangle boundary
// (counterclockwise from the lower-left corner).
inline double projective_holonomy_defect(const ProjectivePotentials& P, const Rect& rect,
                                         double h = kDefaultOdeStep) {
  const Point2 c00{rect.r1min, rect.r2min}, c10{rect.r1max, rect.r2min};
  const Point2 c11{rect.r1max, rect.r2max}, c01{rect.r1min, rect.r2max};
  const auto init = standard_projective_tetrad(c00);
  auto loop = integrate_projective(P, c00, init, {c00, c10, c11, c01, c00}, h);
  return max_abs(loop.rows() - init.rows());
}

// Tetrads at every node of a grid: transport along the bottom edge, then up
// each column.
inline Grid<RMat4> integrate_projective_grid(const ProjectivePotentials& P, const GridSpec& g,
                                             double h = kDefaultOdeStep) {
  if (!P.domain.contains(g.rect(), 1e-12))
    throw DomainViolation("projective grid: grid leaves the domain");
  Grid<RMat4> out(g);
  RMat4 row = RMat4::identity();
  out.at(0, 0) = row;
  for (int i = 1; i < g.n1; ++i) {
    row = detail::transport_segment(P, row, {g.r1(i - 1), g.r2(0)}, {g.r1(i), g.r2(0)}, h);
    out.at(i, 0) = row;
  }
  for (int i = 0; i < g.n1; ++i) {
    RMat4 col = out.at(i, 0);
    for (int j = 1; j < g.n2; ++j) {
      col = detail::transport_segment(P, col, {g.r1(i), g.r2(j - 1)}, {g.r1(i), g.r2(j)}, h);
      out.at(i, j) = col;
    }
  }
  return out;
}

inline RGrid component_grid(const Grid<RMat4>& frames, int row, int col) {
  RGrid out(frames.g);
  for (int j = 0; j < frames.g.n2; ++j)
    for (int i = 0; i < frames.g.n1; ++i) out.at(i, j) = frames.at(i, j)[row][col];
  return out;
}

// ---------------------------------------------------------------------------
// The six bivectors U = r^r1, V = r^r2, A = r2^r1 + r^eta, B = r1^r2 + r^eta,
// P = 2 r2^eta, Q = 2 r1^eta and their first-order system.

// component order used throughout: U, A, P, V, B, Q
enum PluckerIndex { kU = 0, kA = 1, kP = 2, kV = 3, kB = 4, kQ = 5 };

struct PluckerFrame {
  Point2 at{};
  std::array<Plucker6, 6> vec{};

  Plucker6& operator[](int i) { return vec[static_cast<size_t>(i)]; }
  const Plucker6& operator[](int i) const { return vec[static_cast<size_t>(i)]; }
};

inline PluckerFrame plucker_frame(const ProjectiveFrame& F) {
  PluckerFrame out;
  out.at = F.at;
  out[kU] = detail::wedge(F.r, F.r1);
  out[kV] = detail::wedge(F.r, F.r2);
  const Plucker6 re = detail::wedge(F.r, F.eta);
  const Plucker6 w21 = detail::wedge(F.r2, F.r1);
  const Plucker6 w2e = detail::wedge(F.r2, F.eta);
  const Plucker6 w1e = detail::wedge(F.r1, F.eta);
  for (int c = 0; c < 6; ++c) {
    out[kA][c] = w21[c] + re[c];
    out[kB][c] = -w21[c] + re[c];
    out[kP][c] = 2 * w2e[c];
    out[kQ][c] = 2 * w1e[c];
  }
  return out;
}

using RMat6 = std::array<std::array<double, 6>, 6>;

inline RMat6 plucker_gram(const PluckerFrame& L) {
  RMat6 g{};
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) g[i][j] = plucker_product(L[i], L[j]);
  return g;
}

// (U,P) = -1, (A,A) = 1, (V,Q) = 1, (B,B) = -1, all other pairs 0
inline RMat6 plucker_gram_target() {
  RMat6 g{};
  g[kU][kP] = g[kP][kU] = -1;
  g[kA][kA] = 1;
  g[kV][kQ] = g[kQ][kV] = 1;
  g[kB][kB] = -1;
  return g;
}

// Coefficient matrices of d_x L = L1 L, d_y L = L2 L on (U, A, P, V, B, Q).
inline std::pair<RMat6, RMat6> plucker_connection(const ProjectivePotentials& P, double x,
                                                  double y) {
  const auto fc = frame_coeffs(P, x, y);
  const double be = P.beta(x, y), ga = P.gamma(x, y);
  const double dlg1 = P.gamma.d(1, 0, x, y) / ga;
  const double dlb2 = P.beta.d(0, 1, x, y) / be;
  RMat6 L1{}, L2{};
  L1[kU][kV] = be;
  L1[kA][kU] = fc.k;
  L1[kP][kA] = fc.k;
  L1[kP][kV] = -be * fc.a;
  L1[kV][kV] = dlg1;
  L1[kV][kB] = 1;
  L1[kB][kV] = fc.b;
  L1[kB][kQ] = 1;
  L1[kQ][kU] = -be * fc.a;
  L1[kQ][kP] = be;
  L1[kQ][kB] = fc.b;
  L1[kQ][kQ] = -dlg1;

  L2[kU][kU] = dlb2;
  L2[kU][kA] = 1;
  L2[kA][kU] = fc.a;
  L2[kA][kP] = 1;
  L2[kP][kA] = fc.a;
  L2[kP][kP] = -dlb2;
  L2[kP][kV] = -ga * fc.b;
  L2[kP][kQ] = ga;
  L2[kV][kU] = ga;
  L2[kB][kV] = fc.l;
  L2[kQ][kU] = -ga * fc.b;
  L2[kQ][kB] = fc.l;
  return {L1, L2};
}

// Max-norm residual of the 6x6 system over the grid interior (4th-order
// stencils) together with the worst deviation of the Gram matrix from the
// constant table, checked at every node. laplace restricts the residual to
// the two Laplace relations U_x = beta V and V_y = gamma U.
struct PluckerSystemCheck {
  double residual = 0;
  double table = 0;
  double laplace = 0;
};

inline PluckerSystemCheck plucker_system_check(const ProjectivePotentials& P,
                                               const Grid<RMat4>& frames) {
  const GridSpec& g = frames.g;
  if (g.n1 < 5 || g.n2 < 5) throw StencilOutOfDomain("plucker system: grid too small");
  Grid<PluckerFrame> L(g);
  PluckerSystemCheck out;
  const RMat6 target = plucker_gram_target();
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) {
      L.at(i, j) =
          plucker_frame(ProjectiveFrame::from_rows({g.r1(i), g.r2(j)}, frames.at(i, j)));
      const RMat6 gram = plucker_gram(L.at(i, j));
      for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c)
          out.table = std::max(out.table, std::abs(gram[r][c] - target[r][c]));
    }
  for (int j = 2; j < g.n2 - 2; ++j)
    for (int i = 2; i < g.n1 - 2; ++i) {
      const auto conn = plucker_connection(P, g.r1(i), g.r2(j));
      for (int dir = 0; dir < 2; ++dir) {
        const RMat6& M = dir == 0 ? conn.first : conn.second;
        const double h = dir == 0 ? g.h1 : g.h2;
        auto nb = [&](int o) -> const PluckerFrame& {
          return dir == 0 ? L.at(i + o, j) : L.at(i, j + o);
        };
        for (int r = 0; r < 6; ++r)
          for (int c = 0; c < 6; ++c) {
            const double fdv =
                (-nb(2)[r][c] + 8 * nb(1)[r][c] - 8 * nb(-1)[r][c] + nb(-2)[r][c]) / (12 * h);
            double pred = 0;
            for (int s = 0; s < 6; ++s)
              if (M[r][s] != 0) pred += M[r][s] * L.at(i, j)[s][c];
            out.residual = std::max(out.residual, std::abs(fdv - pred));
            if ((dir == 0 && r == kU) || (dir == 1 && r == kV))
              out.laplace = std::max(out.laplace, std::abs(fdv - pred));
          }
      }
    }
  return out;
}

}  // namespace liesphere::wilczynski
