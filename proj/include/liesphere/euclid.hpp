#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <utility>

#include "core.hpp"
#include "errors.hpp"
#include "fields.hpp"
#include "frame.hpp"
#include "jet.hpp"
#include "potentials.hpp"
#include "surface.hpp"

// From a surface patch in curvature-line coordinates back to the conformal
// data: Weingarten radii, hexaspherical lifts of the two curvature-sphere
// families, the normalized sphere vectors solving the Dirac pair, frame
// completion by differentiation, and extraction of the potentials p, q, V, W.
//
// All pointwise quantities are carried as bivariate jets so that the chain
// closes analytically.  Order bookkeeping along the chain, starting from a
// surface jet of order 8:
//
//   r: 8 -> ru, rv, n: 7 -> nu, nv, G, w: 6 -> U, V, scaled U, V: 6
//   p, q: 5 -> dy(p)/p, dx(q)/q: 4 -> A, B: 4 -> a, b: 3 -> V, W: 3
//
// which is exactly the order the Field2 machinery needs downstream.

namespace liesphere::euclid {

inline constexpr int kSurfOrder = 8;
using SurfJet = Jet2<kSurfOrder>;
using Hex6 = std::array<SurfJet, 6>;

// ---------------------------------------------------------------------------
// jet-valued space vectors

struct JetVec {
  SurfJet x, y, z;
};

inline JetVec operator+(const JetVec& a, const JetVec& b) {
  return {a.x + b.x, a.y + b.y, a.z + b.z};
}
inline JetVec operator-(const JetVec& a, const JetVec& b) {
  return {a.x - b.x, a.y - b.y, a.z - b.z};
}
inline JetVec operator*(const SurfJet& s, const JetVec& v) {
  return {s * v.x, s * v.y, s * v.z};
}
inline JetVec operator*(double s, const JetVec& v) { return {s * v.x, s * v.y, s * v.z}; }
inline JetVec operator/(const JetVec& v, const SurfJet& s) {
  const SurfJet r = recip(s);
  return {v.x * r, v.y * r, v.z * r};
}

inline SurfJet dot(const JetVec& a, const JetVec& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}
inline JetVec cross(const JetVec& a, const JetVec& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline JetVec dx(const JetVec& v) { return {dx(v.x), dx(v.y), dx(v.z)}; }
inline JetVec dy(const JetVec& v) { return {dy(v.x), dy(v.y), dy(v.z)}; }
inline Vec3 value3(const JetVec& v) { return {v.x.value(), v.y.value(), v.z.value()}; }

// ---------------------------------------------------------------------------
// surface catalog
//
// A surface is a jet-valued parametrization over a rectangle.  The
// coordinates must be curvature-line coordinates: everything downstream
// (sphere lifts, Dirac pair, potentials) assumes the two families of
// coordinate curves are the lines of curvature.  `canal` marks surfaces
// whose second curvature-sphere family is constant along the R2 curves
// (surfaces of revolution with R2 the angle around the axis); the frame
// completion then drops the dx(q)/q gauge term.

struct EuclidSurface {
  std::function<JetVec(double, double)> jet;
  Rect domain{};
  bool canal = false;
};

inline EuclidSurface torus(double major, double minor,
                           Rect domain = {0.2, 1.2, 0.1, 1.3}) {
  if (!(minor > 0) || !(major > minor))
    throw ValidationError("torus: need major > minor > 0");
  EuclidSurface s;
  s.domain = domain;
  s.canal = true;
  s.jet = [major, minor](double u, double v) {
    const SurfJet ju = SurfJet::var1(u), jv = SurfJet::var2(v);
    const SurfJet f = major + minor * cos(ju);
    return JetVec{f * sin(jv), f * cos(jv), minor * sin(ju)};
  };
  return s;
}

// Spheroid a = equatorial, c = polar semiaxis, parametrized by polar angle u
// and azimuth v.  The default patch stays away from the poles and from the
// equator umbilics of the oblate case.
inline EuclidSurface spheroid(double a, double c, Rect domain = {0.3, 1.2, 0.1, 1.3}) {
  if (!(a > 0) || !(c > 0) || a == c)
    throw ValidationError("spheroid: need distinct positive semiaxes");
  EuclidSurface s;
  s.domain = domain;
  s.canal = true;
  s.jet = [a, c](double u, double v) {
    const SurfJet ju = SurfJet::var1(u), jv = SurfJet::var2(v);
    const SurfJet su = sin(ju);
    return JetVec{a * su * sin(jv), a * su * cos(jv), c * cos(ju)};
  };
  return s;
}

// Triaxial ellipsoid with semiaxes a > b > c > 0 in confocal (ellipsoidal)
// coordinates: the patch (lam, mu) with c^2 < lam < b^2 < mu < a^2 covers
// one octant and the coordinate curves are the curvature lines.  This is
// the generic (non-canal) catalog member: both principal radii vary in
// both directions, so p and q are nonzero on the patch.
inline EuclidSurface ellipsoid(double a, double b, double c,
                               Rect domain = {1.5, 3.5, 4.5, 8.5}) {
  if (!(c > 0) || !(b > c) || !(a > b))
    throw ValidationError("ellipsoid: need a > b > c > 0");
  const double a2 = a * a, b2 = b * b, c2 = c * c;
  if (!(domain.r1min > c2) || !(domain.r1max < b2) || !(domain.r2min > b2) ||
      !(domain.r2max < a2))
    throw ValidationError("ellipsoid: domain must sit inside (c^2,b^2) x (b^2,a^2)");
  EuclidSurface s;
  s.domain = domain;
  s.jet = [a, b, c, a2, b2, c2](double lam, double mu) {
    const SurfJet l = SurfJet::var1(lam), m = SurfJet::var2(mu);
    return JetVec{a * sqrt((a2 - l) * (a2 - m) * (1.0 / ((a2 - b2) * (a2 - c2)))),
                  b * sqrt((b2 - l) * (m - b2) * (1.0 / ((a2 - b2) * (b2 - c2)))),
                  c * sqrt((l - c2) * (m - c2) * (1.0 / ((a2 - c2) * (b2 - c2))))};
  };
  return s;
}

// Ring cyclide in the standard trigonometric parametrization; both families
// of coordinate curves are circles, so like the torus it is a Dupin surface
// (p = q = 0) and only the lift/normalize layers apply to it.
inline EuclidSurface ring_cyclide(double a, double c, double d,
                                  Rect domain = {0.3, 1.2, 0.2, 1.1}) {
  if (!(c >= 0) || !(a > c) || !(d > c) || !(a > d))
    throw ValidationError("ring_cyclide: need a > d > c >= 0");
  const double b2 = a * a - c * c;
  const double b = std::sqrt(b2);
  EuclidSurface s;
  s.domain = domain;
  s.jet = [a, c, d, b, b2](double u, double v) {
    const SurfJet ju = SurfJet::var1(u), jv = SurfJet::var2(v);
    const SurfJet cu = cos(ju), cv = cos(jv);
    const SurfJet den = recip(a - c * cu * cv);
    return JetVec{(d * (c - a * cu * cv) + b2 * cu) * den,
                  (b * sin(ju)) * (a - d * cv) * den,
                  (b * sin(jv)) * (c * cu - d) * den};
  };
  return s;
}

// Circular cylinder: one curvature-sphere family degenerates to planes
// (straight rulings), which the Weingarten query reports as an infinite
// radius and the lift refuses.
inline EuclidSurface cylinder(double radius, Rect domain = {0.0, 1.2, 0.0, 1.0}) {
  if (!(radius > 0)) throw ValidationError("cylinder: need radius > 0");
  EuclidSurface s;
  s.domain = domain;
  s.canal = true;
  s.jet = [radius](double theta, double z) {
    const SurfJet jt = SurfJet::var1(theta);
    return JetVec{radius * cos(jt), radius * sin(jt), SurfJet::var2(z)};
  };
  return s;
}

inline EuclidSurface rigid_motion(const EuclidSurface& s,
                                  const std::array<std::array<double, 3>, 3>& rot,
                                  const Vec3& shift) {
  EuclidSurface out;
  out.domain = s.domain;
  out.canal = s.canal;
  out.jet = [f = s.jet, rot, shift](double r1, double r2) {
    const JetVec v = f(r1, r2);
    return JetVec{rot[0][0] * v.x + rot[0][1] * v.y + rot[0][2] * v.z + shift.x,
                  rot[1][0] * v.x + rot[1][1] * v.y + rot[1][2] * v.z + shift.y,
                  rot[2][0] * v.x + rot[2][1] * v.y + rot[2][2] * v.z + shift.z};
  };
  return out;
}

// ---------------------------------------------------------------------------
// Weingarten data
//
// n is the unit normal oriented along cross(d1 r, d2 r).  G11, G22 are the
// diagonal coefficients of the third fundamental form (the metric of the
// Gauss map); in curvature-line coordinates the Weingarten relations read
// d_i r = w^i d_i n with w^i the signed principal curvature radius.  A
// vanishing G_ii means d_i n = 0: that curvature-sphere family consists of
// planes and the radius is infinite.

struct WeingartenData {
  Vec3 n{};
  double w1 = 0, w2 = 0;
  double G11 = 0, G22 = 0;
  double residual = 0;
  bool infinite_radius = false;
};

namespace detail {

inline constexpr double kEpsFlat = 1e-10;
inline constexpr double kEpsPot = 1e-12;

struct ChainCore {
  JetVec r, ru, rv, n, nu, nv;
  SurfJet G11, G22, w1, w2;
  bool flat1 = false, flat2 = false;
};

inline ChainCore chain_core(const EuclidSurface& s, double r1, double r2) {
  if (!s.jet) throw ValidationError("surface has no parametrization");
  if (!s.domain.contains(r1, r2))
    throw DomainViolation("surface chain: point outside the domain");
  ChainCore c;
  c.r = s.jet(r1, r2);
  c.ru = dx(c.r);
  c.rv = dy(c.r);
  const JetVec cr = cross(c.ru, c.rv);
  const SurfJet n2 = dot(cr, cr);
  if (!(n2.value() > 1e-20))
    throw DegenerateParametrization("surface chain: tangent vectors are dependent");
  c.n = cr / sqrt(n2);
  c.nu = dx(c.n);
  c.nv = dy(c.n);
  c.G11 = dot(c.nu, c.nu);
  c.G22 = dot(c.nv, c.nv);
  c.flat1 = !(c.G11.value() > kEpsFlat);
  c.flat2 = !(c.G22.value() > kEpsFlat);
  if (!c.flat1) c.w1 = dot(c.ru, c.nu) / c.G11;
  if (!c.flat2) c.w2 = dot(c.rv, c.nv) / c.G22;
  return c;
}

inline double max_abs3(const Vec3& v) {
  return std::max({std::abs(v.x), std::abs(v.y), std::abs(v.z)});
}

}  // namespace detail

inline WeingartenData weingarten_data(const EuclidSurface& s, double r1, double r2) {
  const auto c = detail::chain_core(s, r1, r2);
  WeingartenData out;
  out.n = value3(c.n);
  out.G11 = c.G11.value();
  out.G22 = c.G22.value();
  out.infinite_radius = c.flat1 || c.flat2;
  const double inf = std::numeric_limits<double>::infinity();
  out.w1 = c.flat1 ? inf : c.w1.value();
  out.w2 = c.flat2 ? inf : c.w2.value();
  // residual of the Weingarten relations; for a flat direction the relation
  // degenerates to d_i n = 0, so the defect is just |d_i n|
  double res = c.flat1 ? detail::max_abs3(value3(c.nu))
                       : detail::max_abs3(value3(c.ru - c.w1 * c.nu));
  res = std::max(res, c.flat2 ? detail::max_abs3(value3(c.nv))
                              : detail::max_abs3(value3(c.rv - c.w2 * c.nv)));
  out.residual = res;
  if (!out.infinite_radius && std::abs(out.w1 - out.w2) <= kEpsUmbilic)
    throw UmbilicDegeneracy("weingarten: principal radii coincide");
  return out;
}

// ---------------------------------------------------------------------------
// hexaspherical lifts
//
// U is the lift of the curvature sphere with center r - w1 n and radius w1,
// V the one for w2.  The scaled vectors divide by sqrt(G22) (w2 - w1) and
// sqrt(G11) (w1 - w2) respectively, which normalizes the sphere products to
// (dU, dU) pattern the Dirac pair needs, and the potentials are
//
//   p = d1(w1) / (w1 - w2) * sqrt(G11 / G22)
//   q = d2(w2) / (w2 - w1) * sqrt(G22 / G11)

struct LiftJets {
  JetVec r, n;
  SurfJet w1, w2, G11, G22;
  Hex6 U, V;
  Hex6 cU, cV;
  SurfJet p, q;
};

namespace detail {

inline Hex6 hex_lift(const JetVec& r, const JetVec& n, const SurfJet& w,
                     const SurfJet& rr, const SurfJet& rn) {
  Hex6 h;
  const SurfJet wrn = 2.0 * w * rn;
  h[0] = 0.5 * (1.0 + rr - wrn);
  h[1] = 0.5 * (1.0 - rr + wrn);
  const JetVec center = r - w * n;
  h[2] = center.x;
  h[3] = center.y;
  h[4] = center.z;
  h[5] = w;
  return h;
}

inline SurfJet hex_dot(const Hex6& a, const Hex6& b) {
  return -(a[0] * b[0]) + a[1] * b[1] + a[2] * b[2] + a[3] * b[3] + a[4] * b[4] -
         a[5] * b[5];
}

}  // namespace detail

inline LiftJets lift_jets(const EuclidSurface& s, double r1, double r2) {
  const auto c = detail::chain_core(s, r1, r2);
  if (c.flat1 || c.flat2)
    throw MetricDegenerate("lift: a curvature-sphere family degenerates to planes");
  if (std::abs(c.w1.value() - c.w2.value()) <= kEpsUmbilic)
    throw UmbilicDegeneracy("lift: principal radii coincide");
  LiftJets out;
  out.r = c.r;
  out.n = c.n;
  out.w1 = c.w1;
  out.w2 = c.w2;
  out.G11 = c.G11;
  out.G22 = c.G22;
  const SurfJet rr = dot(c.r, c.r);
  const SurfJet rn = dot(c.r, c.n);
  out.U = detail::hex_lift(c.r, c.n, c.w1, rr, rn);
  out.V = detail::hex_lift(c.r, c.n, c.w2, rr, rn);
  const SurfJet dw = c.w1 - c.w2;
  const SurfJet idw = recip(dw);
  const SurfJet sg1 = sqrt(c.G11), sg2 = sqrt(c.G22);
  out.p = dx(c.w1) * idw * (sg1 / sg2);
  out.q = -1.0 * (dy(c.w2) * idw) * (sg2 / sg1);
  const SurfJet den_u = recip(-1.0 * (sg2 * dw));
  const SurfJet den_v = recip(sg1 * dw);
  for (int i = 0; i < 6; ++i) {
    out.cU[i] = out.U[i] * den_u;
    out.cV[i] = out.V[i] * den_v;
  }
  return out;
}

inline std::pair<surface::HexSphere, surface::HexSphere> lie_lift(
    const EuclidSurface& s, double r1, double r2) {
  const auto l = lift_jets(s, r1, r2);
  surface::HexSphere u, v;
  for (int i = 0; i < 6; ++i) {
    u.y[i] = l.U[i].value();
    v.y[i] = l.V[i].value();
  }
  return {u, v};
}

// ---------------------------------------------------------------------------
// frame completion in jets and potential extraction
//
// The remaining four frame vectors come from differentiating the scaled
// sphere vectors:
//
//   A = d2(cU) - (d2 p / p) cU        P = d2(A) - a cU,  a = -(d2 A, d2 A)/2
//   B = d1(cV) - (d1 q / q) cV        Q = d1(B) - b cV,  b = -(d1 B, d1 B)/2
//
// (canal surfaces drop the d1 q / q term).  The potentials then close up as
//
//   W = a + d2^2 ln p + (d2 ln p)^2 / 2
//   V = b + d1^2 ln q + (d1 ln q)^2 / 2     (canal: V = b)

struct PotentialJets {
  SurfJet p, q, a, b, V, W;
  Hex6 A, P, B, Q;
};

inline PotentialJets potential_jets(const EuclidSurface& s, double r1, double r2) {
  const auto l = lift_jets(s, r1, r2);
  PotentialJets out;
  out.p = l.p;
  out.q = l.q;
  if (std::abs(l.p.value()) < detail::kEpsPot)
    throw ZeroPotential("potential extraction: p vanishes (Dupin direction)");
  const SurfJet dlp = dy(l.p) / l.p;
  for (int i = 0; i < 6; ++i) out.A[i] = dy(l.cU[i]) - dlp * l.cU[i];
  Hex6 da;
  for (int i = 0; i < 6; ++i) da[i] = dy(out.A[i]);
  out.a = -0.5 * detail::hex_dot(da, da);
  for (int i = 0; i < 6; ++i) out.P[i] = da[i] - out.a * l.cU[i];
  out.W = out.a + dy(dlp) + 0.5 * dlp * dlp;
  if (s.canal) {
    for (int i = 0; i < 6; ++i) out.B[i] = dx(l.cV[i]);
  } else {
    if (std::abs(l.q.value()) < detail::kEpsPot)
      throw ZeroPotential("potential extraction: q vanishes (Dupin direction)");
    const SurfJet dlq = dx(l.q) / l.q;
    for (int i = 0; i < 6; ++i) out.B[i] = dx(l.cV[i]) - dlq * l.cV[i];
  }
  Hex6 db;
  for (int i = 0; i < 6; ++i) db[i] = dx(out.B[i]);
  out.b = -0.5 * detail::hex_dot(db, db);
  for (int i = 0; i < 6; ++i) out.Q[i] = db[i] - out.b * l.cV[i];
  if (s.canal) {
    out.V = out.b;
  } else {
    const SurfJet dlq = dx(l.q) / l.q;
    out.V = out.b + dx(dlq) + 0.5 * dlq * dlq;
  }
  return out;
}

// ---------------------------------------------------------------------------
// grid pipeline: normalized sphere vectors on a grid, Dirac residual, frame
// completion by finite differences, and the frame-equation residual

struct NormalizedFrames {
  GridSpec g{};
  Grid<surface::HexSphere> U, V;
  Field2 p, q;
  bool canal = false;
};

namespace detail {

// The jet chains are expensive, and the field consumers tend to query all
// the components at the same point in a row (p, then q, then V, then W, or
// p and its log-derivative).  A one-slot cache shared by the sibling field
// closures removes the repeated chain walks; the mutex keeps the closures
// safe to call from parallel grid loops.
template <class T>
struct EvalCache {
  std::mutex mu;
  bool has = false;
  double x = 0, y = 0;
  T val;
};

template <class T, class F>
T cached(const std::shared_ptr<EvalCache<T>>& c, double x, double y, F&& compute) {
  std::lock_guard<std::mutex> lock(c->mu);
  if (!c->has || c->x != x || c->y != y) {
    c->val = compute();
    c->x = x;
    c->y = y;
    c->has = true;
  }
  return c->val;
}

}  // namespace detail

inline NormalizedFrames normalize_uv(const EuclidSurface& s, const GridSpec& g) {
  if (g.n1 < 2 || g.n2 < 2)
    throw ValidationError("normalize_uv: grid needs at least 2 nodes per axis");
  if (!s.domain.contains(g.rect(), 1e-12))
    throw DomainViolation("normalize_uv: grid leaves the surface domain");
  NormalizedFrames nf;
  nf.g = g;
  nf.U = Grid<surface::HexSphere>(g);
  nf.V = Grid<surface::HexSphere>(g);
  nf.canal = s.canal;
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) {
      const auto l = lift_jets(s, g.r1(i), g.r2(j));
      for (int k = 0; k < 6; ++k) {
        nf.U.at(i, j).y[k] = l.cU[k].value();
        nf.V.at(i, j).y[k] = l.cV[k].value();
      }
    }
  auto cache = std::make_shared<detail::EvalCache<LiftJets>>();
  auto lifted = [s, cache](double x, double y) {
    return detail::cached(cache, x, y, [&] { return lift_jets(s, x, y); });
  };
  nf.p = Field2([lifted](double x, double y) {
    return truncate<kFieldOrder>(lifted(x, y).p);
  });
  nf.q = s.canal ? Field2::constant(0.0) : Field2([lifted](double x, double y) {
    return truncate<kFieldOrder>(lifted(x, y).q);
  });
  return nf;
}

// max-norm defect of d1(U) = p V and d2(V) = q U over the grid interior
inline std::pair<double, double> dirac_residual(const NormalizedFrames& nf) {
  const GridSpec& g = nf.g;
  if (g.n1 < 5 || g.n2 < 5)
    throw StencilOutOfDomain("dirac_residual: grid too small for the stencil");
  std::array<RGrid, 6> cu, cv;
  for (int k = 0; k < 6; ++k) {
    cu[k] = RGrid(g);
    cv[k] = RGrid(g);
  }
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i)
      for (int k = 0; k < 6; ++k) {
        cu[k].at(i, j) = nf.U.at(i, j).y[k];
        cv[k].at(i, j) = nf.V.at(i, j).y[k];
      }
  double res1 = 0, res2 = 0;
  for (int j = 2; j < g.n2 - 2; ++j)
    for (int i = 2; i < g.n1 - 2; ++i) {
      const double p = nf.p(g.r1(i), g.r2(j));
      const double q = nf.q(g.r1(i), g.r2(j));
      for (int k = 0; k < 6; ++k) {
        res1 = std::max(res1, std::abs(fd::axis1(cu[k], 1, i, j) - p * cv[k].at(i, j)));
        res2 = std::max(res2, std::abs(fd::axis2(cv[k], 1, i, j) - q * cu[k].at(i, j)));
      }
    }
  return {res1, res2};
}

// The six frame vectors on the grid, stored per vector and component; the
// derived vectors and coefficients are valid on the margin-4 window
// i, j in [margin, n - 1 - margin].
struct CompletedFrames {
  GridSpec g{};
  std::array<std::array<RGrid, 6>, 6> comp;  // [frame::LieIndex][hex component]
  RGrid a, b;
  Field2 p, q;
  bool canal = false;
  int margin = 4;
};

inline CompletedFrames complete_frame(const NormalizedFrames& nf) {
  const GridSpec& g = nf.g;
  if (g.n1 < 9 || g.n2 < 9)
    throw StencilOutOfDomain("complete_frame: grid too small for two stencil levels");
  CompletedFrames cf;
  cf.g = g;
  cf.p = nf.p;
  cf.q = nf.q;
  cf.canal = nf.canal;
  for (int v = 0; v < 6; ++v)
    for (int k = 0; k < 6; ++k) cf.comp[v][k] = RGrid(g);
  cf.a = RGrid(g);
  cf.b = RGrid(g);
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i)
      for (int k = 0; k < 6; ++k) {
        cf.comp[frame::kU][k].at(i, j) = nf.U.at(i, j).y[k];
        cf.comp[frame::kV][k].at(i, j) = nf.V.at(i, j).y[k];
      }
  const auto lie6 = [](const std::array<double, 6>& x, const std::array<double, 6>& y) {
    return -x[0] * y[0] + x[1] * y[1] + x[2] * y[2] + x[3] * y[3] + x[4] * y[4] -
           x[5] * y[5];
  };
  // A = d2(U) - (d2 p / p) U, on the margin-2 band in j
  for (int j = 2; j < g.n2 - 2; ++j)
    for (int i = 0; i < g.n1; ++i) {
      const double r1 = g.r1(i), r2 = g.r2(j);
      const double p = nf.p(r1, r2);
      if (std::abs(p) < detail::kEpsPot)
        throw ZeroPotential("complete_frame: p vanishes on the grid");
      const double dlp = nf.p.d(0, 1, r1, r2) / p;
      for (int k = 0; k < 6; ++k)
        cf.comp[frame::kA][k].at(i, j) =
            fd::axis2(cf.comp[frame::kU][k], 1, i, j) -
            dlp * cf.comp[frame::kU][k].at(i, j);
    }
  // B = d1(V) - (d1 q / q) V, on the margin-2 band in i
  for (int j = 0; j < g.n2; ++j)
    for (int i = 2; i < g.n1 - 2; ++i) {
      double dlq = 0;
      if (!nf.canal) {
        const double r1 = g.r1(i), r2 = g.r2(j);
        const double q = nf.q(r1, r2);
        if (std::abs(q) < detail::kEpsPot)
          throw ZeroPotential("complete_frame: q vanishes on the grid");
        dlq = nf.q.d(1, 0, r1, r2) / q;
      }
      for (int k = 0; k < 6; ++k)
        cf.comp[frame::kB][k].at(i, j) =
            fd::axis1(cf.comp[frame::kV][k], 1, i, j) -
            dlq * cf.comp[frame::kV][k].at(i, j);
    }
  // P = d2(A) - a U with a = -(d2 A, d2 A)/2, margin-4 band in j
  for (int j = 4; j < g.n2 - 4; ++j)
    for (int i = 0; i < g.n1; ++i) {
      std::array<double, 6> da{}, u{};
      for (int k = 0; k < 6; ++k) {
        da[k] = fd::axis2(cf.comp[frame::kA][k], 1, i, j);
        u[k] = cf.comp[frame::kU][k].at(i, j);
      }
      const double a = -0.5 * lie6(da, da);
      cf.a.at(i, j) = a;
      for (int k = 0; k < 6; ++k) cf.comp[frame::kP][k].at(i, j) = da[k] - a * u[k];
    }
  // Q = d1(B) - b V with b = -(d1 B, d1 B)/2, margin-4 band in i
  for (int j = 0; j < g.n2; ++j)
    for (int i = 4; i < g.n1 - 4; ++i) {
      std::array<double, 6> db{}, v{};
      for (int k = 0; k < 6; ++k) {
        db[k] = fd::axis1(cf.comp[frame::kB][k], 1, i, j);
        v[k] = cf.comp[frame::kV][k].at(i, j);
      }
      const double b = -0.5 * lie6(db, db);
      cf.b.at(i, j) = b;
      for (int k = 0; k < 6; ++k) cf.comp[frame::kQ][k].at(i, j) = db[k] - b * v[k];
    }
  return cf;
}

// worst defect against the scalar-product table of the six-frame
// ((U,P) = (V,Q) = -1, (A,A) = (B,B) = 1, all other pairs 0) over the
// margin-4 window
inline double scal_table_residual(const CompletedFrames& cf) {
  const GridSpec& g = cf.g;
  const int m = cf.margin;
  if (g.n1 <= 2 * m || g.n2 <= 2 * m)
    throw StencilOutOfDomain("scal_table_residual: no interior window");
  const auto lie6 = [](const std::array<double, 6>& x, const std::array<double, 6>& y) {
    return -x[0] * y[0] + x[1] * y[1] + x[2] * y[2] + x[3] * y[3] + x[4] * y[4] -
           x[5] * y[5];
  };
  auto target = [](int m1, int m2) -> double {
    auto pair = [&](frame::LieIndex s, frame::LieIndex t) {
      return (m1 == s && m2 == t) || (m1 == t && m2 == s);
    };
    if (pair(frame::kU, frame::kP) || pair(frame::kV, frame::kQ)) return -1;
    if ((m1 == frame::kA && m2 == frame::kA) || (m1 == frame::kB && m2 == frame::kB))
      return 1;
    return 0;
  };
  double worst = 0;
  for (int j = m; j < g.n2 - m; ++j)
    for (int i = m; i < g.n1 - m; ++i) {
      std::array<std::array<double, 6>, 6> f{};
      for (int v = 0; v < 6; ++v)
        for (int k = 0; k < 6; ++k) f[v][k] = cf.comp[v][k].at(i, j);
      for (int m1 = 0; m1 < 6; ++m1)
        for (int m2 = m1; m2 < 6; ++m2)
          worst = std::max(worst, std::abs(lie6(f[m1], f[m2]) - target(m1, m2)));
    }
  return worst;
}

// residual of the first-order frame equations for the completed six-frame,
// checked against the connection built from the extracted potentials
inline double lie_equation_residual(const CompletedFrames& cf,
                                    const potentials::PotentialField& pot) {
  const GridSpec& g = cf.g;
  const int m = cf.margin;
  if (g.n1 - 2 * m < 5 || g.n2 - 2 * m < 5)
    throw StencilOutOfDomain("lie_equation_residual: window too small");
  const GridSpec gw{g.n1 - 2 * m, g.n2 - 2 * m, g.r1(m), g.r2(m), g.h1, g.h2};
  Grid<frame::LieFrame6> lf(gw);
  for (int j = 0; j < gw.n2; ++j)
    for (int i = 0; i < gw.n1; ++i) {
      auto& node = lf.at(i, j);
      node.at = {gw.r1(i), gw.r2(j)};
      for (int v = 0; v < 6; ++v)
        for (int k = 0; k < 6; ++k)
          node.vec[v].y[k] = cd(cf.comp[v][k].at(i + m, j + m), 0);
    }
  return frame::lie6_residual(pot, lf);
}

// ---------------------------------------------------------------------------
// potential extraction

// analytic route: field evaluations walk the full jet chain, shared through
// the sibling cache so that querying p, q, V, W at one point costs one walk
inline potentials::PotentialField extract_potentials(const EuclidSurface& s) {
  potentials::PotentialField out;
  out.domain = s.domain;
  out.canal = s.canal;
  out.mode = potentials::FieldMode::analytic;
  auto cache = std::make_shared<detail::EvalCache<PotentialJets>>();
  auto jets = [s, cache](double x, double y) {
    return detail::cached(cache, x, y, [&] { return potential_jets(s, x, y); });
  };
  out.p = Field2([jets](double x, double y) {
    return truncate<kFieldOrder>(jets(x, y).p);
  });
  out.q = s.canal ? Field2::constant(0.0) : Field2([jets](double x, double y) {
    return truncate<kFieldOrder>(jets(x, y).q);
  });
  out.V = Field2([jets](double x, double y) {
    return truncate<kFieldOrder>(jets(x, y).V);
  });
  out.W = Field2([jets](double x, double y) {
    return truncate<kFieldOrder>(jets(x, y).W);
  });
  return out;
}

// assembly from already-extracted ingredient fields (p, q and the frame
// coefficients a, b); V and W close up from the gauge terms
inline potentials::PotentialField extract_potentials(
    const Field2& p, const Field2& q, const Field2& a, const Field2& b,
    const Rect& domain, bool canal, potentials::FieldMode mode) {
  potentials::PotentialField out;
  out.domain = domain;
  out.canal = canal;
  out.mode = mode;
  out.p = p;
  out.q = canal ? Field2::constant(0.0) : q;
  out.W = Field2([p, a](double x, double y) {
    const FieldJet pj = p.jet(x, y);
    if (std::abs(pj.value()) < detail::kEpsPot)
      throw ZeroPotential("potential assembly: p vanishes");
    const FieldJet dlp = dy(pj) / pj;
    return a.jet(x, y) + dy(dlp) + 0.5 * dlp * dlp;
  });
  out.V = canal ? b : Field2([q, b](double x, double y) {
    const FieldJet qj = q.jet(x, y);
    if (std::abs(qj.value()) < detail::kEpsPot)
      throw ZeroPotential("potential assembly: q vanishes");
    const FieldJet dlq = dx(qj) / qj;
    return b.jet(x, y) + dx(dlq) + 0.5 * dlq * dlq;
  });
  return out;
}

// sampled route: run the grid pipeline, freeze p, q, a, b on the margin-4
// window, and interpolate; the domain shrinks by the window margin plus the
// stencil band the interpolants need
inline potentials::PotentialField extract_potentials_fd(const EuclidSurface& s,
                                                        const GridSpec& g) {
  const auto nf = normalize_uv(s, g);
  const auto cf = complete_frame(nf);
  const int m = cf.margin;
  if (g.n1 - 2 * m < 9 || g.n2 - 2 * m < 9)
    throw StencilOutOfDomain("extract_potentials_fd: window too small to interpolate");
  const GridSpec gw{g.n1 - 2 * m, g.n2 - 2 * m, g.r1(m), g.r2(m), g.h1, g.h2};
  auto pg = std::make_shared<RGrid>(gw);
  auto qg = std::make_shared<RGrid>(gw);
  auto ag = std::make_shared<RGrid>(gw);
  auto bg = std::make_shared<RGrid>(gw);
  for (int j = 0; j < gw.n2; ++j)
    for (int i = 0; i < gw.n1; ++i) {
      const double r1 = gw.r1(i), r2 = gw.r2(j);
      pg->at(i, j) = nf.p(r1, r2);
      qg->at(i, j) = nf.canal ? 0.0 : nf.q(r1, r2);
      ag->at(i, j) = cf.a.at(i + m, j + m);
      bg->at(i, j) = cf.b.at(i + m, j + m);
    }
  const double pad = 3.0 * std::max(gw.h1, gw.h2);
  const Rect dom = gw.rect().inset(pad);
  return extract_potentials(sampled_field(pg), sampled_field(qg), sampled_field(ag),
                            sampled_field(bg), dom, s.canal,
                            potentials::FieldMode::sampled);
}

}  // namespace liesphere::euclid
