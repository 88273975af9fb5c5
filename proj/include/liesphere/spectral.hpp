#pragma once
// Commuting operator pairs attached to the potential families: the magnetic
// Schrodinger pair of the c=0 branch, the Laplace-Beltrami operator with
// magnetic and scalar potential of the c=1 branch (plus the second operator
// obtained by eliminating the spectral parameters from the first-order
// system), and the Landau-level canal surfaces of revolution together with
// their twistor line.
//
// Operators are applied to sampled functions with 4th-order central
// differences; every coefficient is evaluated analytically through the field
// jets, so the only discretization error is the stencil truncation.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include "liesphere/algebra.hpp"
#include "liesphere/errors.hpp"
#include "liesphere/fields.hpp"
#include "liesphere/jet.hpp"
#include "liesphere/ode.hpp"
#include "liesphere/potentials.hpp"
#include "liesphere/surface.hpp"

namespace liesphere::spectral {

using algebra::Bivector6;
using algebra::TwistorVector;

// profile values beyond this magnitude count as a pole of z(y), R(y)
inline constexpr double kPoleMagnitude = 1e8;
// relative tolerance of the adaptive quadrature behind the closed-form basis
inline constexpr double kQuadRelTol = 1e-12;

// ---------------------------------------------------------------------------
// Generic second-order operators with analytic coefficients

// L u = d11 u_11 + d22 u_22 + d1 u_1 + d2 u_2 + c u
struct OpCoeffs {
  cd d11{}, d22{}, d1{}, d2{}, c{};
};

// operator given directly by its expanded coefficients; eigen records the
// eigenvalue the family's frame solutions satisfy
struct SecondOrderOp {
  std::function<OpCoeffs(double, double)> at;
  double eigen = 0;
  OpCoeffs coeffs(double r1, double r2) const { return at(r1, r2); }
};

// Covariant form
//   sign1 * w (i d1 + A) (g11/w) (i d1 + A) +
//   sign2 * w (i d2 + B) (g22/w) (i d2 + B) + scalar,     w = sqrt(g11 g22).
// The c=0 branch carries the identity metric; a zero sign drops a direction
// entirely (the second Landau operator acts along x alone).
struct MagneticOperator {
  Field2 g11 = Field2::constant(1), g22 = Field2::constant(1);
  Field2 A = Field2::constant(0), B = Field2::constant(0);
  Field2 scalar = Field2::constant(0);
  double sign1 = 1, sign2 = 1;
  double eigen = 0;

  OpCoeffs coeffs(double r1, double r2) const {
    const FieldJet j11 = g11.jet(r1, r2), j22 = g22.jet(r1, r2);
    const FieldJet ja = A.jet(r1, r2), jb = B.jet(r1, r2);
    const FieldJet w = sqrt(j11 * j22);
    const FieldJet c1 = j11 * recip(w), c2 = j22 * recip(w);
    const double wv = w.value();
    const double a = ja.value(), b = jb.value();
    const double g1 = j11.value(), g2 = j22.value();
    const double d1c1 = dx(c1).value(), d2c2 = dy(c2).value();
    const double d1a = ja.partial(1, 0), d2b = jb.partial(0, 1);
    const cd I(0, 1);
    OpCoeffs o;
    o.d11 = sign1 * cd(-g1, 0);
    o.d22 = sign2 * cd(-g2, 0);
    o.d1 = sign1 * (cd(-wv * d1c1, 0) + 2.0 * I * (g1 * a));
    o.d2 = sign2 * (cd(-wv * d2c2, 0) + 2.0 * I * (g2 * b));
    o.c = sign1 * (I * (wv * (d1c1 * a + c1.value() * d1a)) + g1 * a * a) +
          sign2 * (I * (wv * (d2c2 * b + c2.value() * d2b)) + g2 * b * b) +
          scalar.jet(r1, r2).value();
    return o;
  }
};

// 4th-order application at an interior node (two-node margin on each side)
template <class Op>
cd apply_node(const Op& L, const CGrid& u, int i, int j) {
  const GridSpec& g = u.g;
  if (i < 2 || j < 2 || i + 2 >= g.n1 || j + 2 >= g.n2)
    throw StencilOutOfDomain("operator stencil leaves the grid");
  const OpCoeffs co = L.coeffs(g.r1(i), g.r2(j));
  const cd u1 = fd::axis1(u, 1, i, j), u11 = fd::axis1(u, 2, i, j);
  const cd u2 = fd::axis2(u, 1, i, j), u22 = fd::axis2(u, 2, i, j);
  return co.d11 * u11 + co.d22 * u22 + co.d1 * u1 + co.d2 * u2 + co.c * u.at(i, j);
}

// application over the whole interior; the two-node boundary band stays zero
template <class Op>
CGrid apply_grid(const Op& L, const CGrid& u) {
  if (u.g.n1 < 5 || u.g.n2 < 5) throw StencilOutOfDomain("operator grid needs >= 5 nodes");
  CGrid out(u.g);
  for (int j = 2; j + 2 < u.g.n2; ++j)
    for (int i = 2; i + 2 < u.g.n1; ++i) out.at(i, j) = apply_node(L, u, i, j);
  return out;
}

// max |L u - eigen u| over the stencil interior
template <class Op>
double eigen_residual(const Op& L, const CGrid& u, cd eigen) {
  if (u.g.n1 < 5 || u.g.n2 < 5) throw StencilOutOfDomain("operator grid needs >= 5 nodes");
  double worst = 0;
  for (int j = 2; j + 2 < u.g.n2; ++j)
    for (int i = 2; i + 2 < u.g.n1; ++i)
      worst = std::max(worst, std::abs(apply_node(L, u, i, j) - eigen * u.at(i, j)));
  return worst;
}

// max |X Y u - Y X u| over the double-application interior (margin 4)
template <class OpX, class OpY>
double commutator_residual(const OpX& X, const OpY& Y, const CGrid& u) {
  if (u.g.n1 < 9 || u.g.n2 < 9) throw StencilOutOfDomain("commutator grid needs >= 9 nodes");
  const CGrid yu = apply_grid(Y, u), xu = apply_grid(X, u);
  double worst = 0;
  for (int j = 4; j + 4 < u.g.n2; ++j)
    for (int i = 4; i + 4 < u.g.n1; ++i)
      worst = std::max(worst, std::abs(apply_node(X, yu, i, j) - apply_node(Y, xu, i, j)));
  return worst;
}

// column col of the frame row (0 psi, 1 psi1, 2 psi2, 3 eta) as a scalar grid
inline CGrid frame_component(const Grid<algebra::Mat4>& frames, int row, int col) {
  CGrid out(frames.g);
  for (int j = 0; j < frames.g.n2; ++j)
    for (int i = 0; i < frames.g.n1; ++i) out.at(i, j) = frames.at(i, j)[row][col];
  return out;
}

inline CGrid scaled_grid(const CGrid& u, const std::function<double(double, double)>& s) {
  CGrid out(u.g);
  for (int j = 0; j < u.g.n2; ++j)
    for (int i = 0; i < u.g.n1; ++i) out.at(i, j) = u.at(i, j) * s(u.g.r1(i), u.g.r2(j));
  return out;
}

// ---------------------------------------------------------------------------
// c = 0: commuting magnetic Schrodinger pair
//   H = (d1 + (i/2) psi2')^2 + (d2 + (i/2) psi1')^2 + V_H,   H psi = lambda psi
//   F = (d1 - (i/2) psi2')^2 - (d2 - (i/2) psi1')^2 + V_F,   F psi = mu psi
// with lambda = (eps1+eps2)/2 and mu = (eps1-eps2)/2.

struct C0Operators {
  MagneticOperator H, F;
  double lambda = 0, mu = 0;
};

namespace detail {

inline Field2 axis1_scaled(const Fn1& f, double s) {
  return Field2([f, s](double r1, double) { return embed1(f.jet<kFieldOrder>(r1)) * s; });
}

inline Field2 axis2_scaled(const Fn1& f, double s) {
  return Field2([f, s](double, double r2) { return embed2(f.jet<kFieldOrder>(r2)) * s; });
}

}  // namespace detail

inline C0Operators c0_operators(const potentials::C0Family& fam) {
  const auto& prm = fam.params;
  const Fn1 psi1 = potentials::curve_fn(fam.psi1), dpsi1 = potentials::curve_fn(fam.psi1, 1),
            ddpsi1 = potentials::curve_fn(fam.psi1, 2);
  const Fn1 psi2 = potentials::curve_fn(fam.psi2), dpsi2 = potentials::curve_fn(fam.psi2, 1),
            ddpsi2 = potentials::curve_fn(fam.psi2, 2);
  const double e0 = prm.eps0, rho1 = prm.rho1, rho2 = prm.rho2;

  // V_H for sgn = +1, V_F for sgn = -1
  auto vpot = [=](double sgn) {
    return Field2([=](double r1, double r2) {
      const auto j1 = embed1(psi1.jet<kFieldOrder>(r1));
      const auto j1p = embed1(dpsi1.jet<kFieldOrder>(r1));
      const auto j1pp = embed1(ddpsi1.jet<kFieldOrder>(r1));
      const auto j2 = embed2(psi2.jet<kFieldOrder>(r2));
      const auto j2p = embed2(dpsi2.jet<kFieldOrder>(r2));
      const auto j2pp = embed2(ddpsi2.jet<kFieldOrder>(r2));
      return 0.25 * (2.0 * (j2 * j1pp) + sgn * 2.0 * (j1 * j2pp) + rho2 * (j1 * j1) +
                     sgn * rho1 * (j2 * j2) + j2p * j2p + sgn * (j1p * j1p) -
                     2.0 * e0 * (j1 + sgn * j2));
    });
  };

  C0Operators out;
  out.lambda = 0.5 * (prm.eps1 + prm.eps2);
  out.mu = 0.5 * (prm.eps1 - prm.eps2);
  out.H.sign1 = out.H.sign2 = -1;
  out.H.A = detail::axis2_scaled(dpsi2, -0.5);
  out.H.B = detail::axis1_scaled(dpsi1, -0.5);
  out.H.scalar = vpot(+1);
  out.H.eigen = out.lambda;
  out.F.sign1 = -1;
  out.F.sign2 = +1;
  out.F.A = detail::axis2_scaled(dpsi2, +0.5);
  out.F.B = detail::axis1_scaled(dpsi1, +0.5);
  out.F.scalar = vpot(-1);
  out.F.eigen = out.mu;
  return out;
}

// ---------------------------------------------------------------------------
// c = 1: Laplace-Beltrami operator on the Stackel metric
//   g11 = f1/(R2-R1), g22 = f2/(R2-R1),
//   A = -sqrt(f2/f1)/(2(R2-R1)), B = -sqrt(f1/f2)/(2(R2-R1)),
//   h = (f1'-f2')/(4(R2-R1)^2) + (f1+f2)/(2(R2-R1)^3) + (eps2/2)(R1+R2),
// acting on the rescaled solutions R = (f1 f2)^{-1/4} psi:
//   H R = -(eps1/2) R,  F R = -(eps0/2) R.
//
// Hx and F are eliminated from the first-order pair: writing the two scalar
// equations as L1 R = -(E(R1)/2) R and L2 R = (E(R2)/2) R with
// E(t) = eps0 + eps1 t + eps2 t^2,
//   Hx = -(L1 + L2)/(R2-R1) + (eps2/2)(R1+R2),
//   F  =  (R2 L1 + R1 L2)/(R2-R1) - (eps2/2) R1 R2,
// and Hx coincides with H coefficient by coefficient.

struct C1Operators {
  MagneticOperator H;
  SecondOrderOp Hx, F;
};

inline C1Operators c1_operator(const potentials::C1Params& prm) {
  const Fn1 f1 = prm.f1, f2 = prm.f2;
  const double e2 = prm.eps2;
  auto delta = [](double r1, double r2) { return FieldJet::var2(r2) - FieldJet::var1(r1); };

  C1Operators out;
  out.H.g11 = Field2([f1, delta](double r1, double r2) {
    return embed1(f1.jet<kFieldOrder>(r1)) * recip(delta(r1, r2));
  });
  out.H.g22 = Field2([f2, delta](double r1, double r2) {
    return embed2(f2.jet<kFieldOrder>(r2)) * recip(delta(r1, r2));
  });
  out.H.A = Field2([f1, f2, delta](double r1, double r2) {
    const auto ratio = embed2(f2.jet<kFieldOrder>(r2)) / embed1(f1.jet<kFieldOrder>(r1));
    return -0.5 * (sqrt(ratio) * recip(delta(r1, r2)));
  });
  out.H.B = Field2([f1, f2, delta](double r1, double r2) {
    const auto ratio = embed1(f1.jet<kFieldOrder>(r1)) / embed2(f2.jet<kFieldOrder>(r2));
    return -0.5 * (sqrt(ratio) * recip(delta(r1, r2)));
  });
  out.H.scalar = Field2([f1, f2, e2, delta](double r1, double r2) {
    const auto jf1 = embed1(f1.jet<kFieldOrder>(r1)), jf1p = embed1(f1.jet<kFieldOrder>(r1, 1));
    const auto jf2 = embed2(f2.jet<kFieldOrder>(r2)), jf2p = embed2(f2.jet<kFieldOrder>(r2, 1));
    const auto id = recip(delta(r1, r2));
    return 0.25 * ((jf1p - jf2p) * (id * id)) + 0.5 * ((jf1 + jf2) * (id * id * id)) +
           0.5 * e2 * (FieldJet::var1(r1) + FieldJet::var2(r2));
  });
  out.H.eigen = -0.5 * prm.eps1;

  // expanded coefficients of L1 and L2 from the first-order pair
  struct Pair {
    OpCoeffs l1, l2;
  };
  auto first_order = [f1, f2](double r1, double r2) {
    const double v1 = f1(r1), v2 = f2(r2);
    const double v1p = f1.d(1, r1), v2p = f2.d(1, r2);
    const double dl = r2 - r1;
    const double root = std::sqrt(v1 * v2);
    const cd I(0, 1);
    Pair p;
    p.l1.d11 = v1;
    p.l1.d1 = 0.5 * v1p;
    p.l1.d2 = I * (root / dl);
    p.l1.c = -(0.75 * v1 / (dl * dl) + 0.25 * v1p / dl) + I * (0.5 * root / (dl * dl));
    p.l2.d22 = v2;
    p.l2.d2 = 0.5 * v2p;
    p.l2.d1 = I * (root / dl);
    p.l2.c = -(0.75 * v2 / (dl * dl) - 0.25 * v2p / dl) - I * (0.5 * root / (dl * dl));
    return p;
  };
  out.Hx.at = [first_order, e2](double r1, double r2) {
    const Pair p = first_order(r1, r2);
    const double dl = r2 - r1;
    OpCoeffs o;
    o.d11 = -(p.l1.d11 + p.l2.d11) / dl;
    o.d22 = -(p.l1.d22 + p.l2.d22) / dl;
    o.d1 = -(p.l1.d1 + p.l2.d1) / dl;
    o.d2 = -(p.l1.d2 + p.l2.d2) / dl;
    o.c = -(p.l1.c + p.l2.c) / dl + 0.5 * e2 * (r1 + r2);
    return o;
  };
  out.Hx.eigen = -0.5 * prm.eps1;
  out.F.at = [first_order, e2](double r1, double r2) {
    const Pair p = first_order(r1, r2);
    const double dl = r2 - r1;
    OpCoeffs o;
    o.d11 = (r2 * p.l1.d11 + r1 * p.l2.d11) / dl;
    o.d22 = (r2 * p.l1.d22 + r1 * p.l2.d22) / dl;
    o.d1 = (r2 * p.l1.d1 + r1 * p.l2.d1) / dl;
    o.d2 = (r2 * p.l1.d2 + r1 * p.l2.d2) / dl;
    o.c = (r2 * p.l1.c + r1 * p.l2.c) / dl - 0.5 * e2 * r1 * r2;
    return o;
  };
  out.F.eigen = -0.5 * prm.eps0;
  return out;
}

// multiplier turning frame solutions psi into the rescaled eigenfunctions R
inline std::function<double(double, double)> c1_rescale(const potentials::C1Params& prm) {
  const Fn1 f1 = prm.f1, f2 = prm.f2;
  return [f1, f2](double r1, double r2) { return std::pow(f1(r1) * f2(r2), -0.25); };
}

// ---------------------------------------------------------------------------
// Gaussian curvature of a diagonal metric given by its inverse components

inline double gaussian_curvature(const Field2& g11, const Field2& g22, double r1, double r2) {
  const FieldJet j11 = g11.jet(r1, r2), j22 = g22.jet(r1, r2);
  if (!(j11.value() > 0) || !(j22.value() > 0))
    throw MetricDegenerate("gaussian curvature: metric not positive at the point");
  const FieldJet E = recip(j11), G = recip(j22);
  const FieldJet w = sqrt(E * G);
  const FieldJet t1 = dx(G) * recip(w), t2 = dy(E) * recip(w);
  return -(dx(t1).value() + dy(t2).value()) / (2 * w.value());
}

// ---------------------------------------------------------------------------
// Magnetic identity: (d1 B - d2 A) dR1 ^ dR2 = -K dsigma

struct MagneticIdentity {
  double field = 0;      // d1 B - d2 A
  double curvature = 0;  // -K (R2-R1)/sqrt(f1 f2)
};

inline MagneticIdentity magnetic_identity_at(const C1Operators& ops, double r1, double r2) {
  MagneticIdentity m;
  m.field = ops.H.B.d(1, 0, r1, r2) - ops.H.A.d(0, 1, r1, r2);
  // area density sqrt(E G) of the metric with E = 1/g11, G = 1/g22
  const double g1 = ops.H.g11(r1, r2), g2 = ops.H.g22(r1, r2);
  m.curvature = -gaussian_curvature(ops.H.g11, ops.H.g22, r1, r2) / std::sqrt(g1 * g2);
  return m;
}

inline double magnetic_identity_check(const potentials::C1Params& prm, const GridSpec& g) {
  if (!prm.domain.contains(g.rect(), 1e-12))
    throw DomainViolation("magnetic identity: grid leaves the family domain");
  const C1Operators ops = c1_operator(prm);
  double worst = 0;
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) {
      const MagneticIdentity m = magnetic_identity_at(ops, g.r1(i), g.r2(j));
      worst = std::max(worst, std::abs(m.field - m.curvature));
    }
  return worst;
}

// ---------------------------------------------------------------------------
// Landau basis: solutions of psi'' = (y^2 - 2 lambda) psi

namespace detail {

inline double gauss5(const std::function<double(double)>& f, double a, double b) {
  static const double x1 = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
  static const double x2 = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
  static const double w0 = 128.0 / 225.0;
  static const double w1 = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
  static const double w2 = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
  const double c = 0.5 * (a + b), hl = 0.5 * (b - a);
  return hl * (w0 * f(c) + w1 * (f(c - hl * x1) + f(c + hl * x1)) +
               w2 * (f(c - hl * x2) + f(c + hl * x2)));
}

inline double adaptive_gauss(const std::function<double(double)>& f, double a, double b,
                             double scale, int depth) {
  const double whole = gauss5(f, a, b);
  const double m = 0.5 * (a + b);
  const double split = gauss5(f, a, m) + gauss5(f, m, b);
  if (std::abs(split - whole) <= kQuadRelTol * std::max(scale, std::abs(split)) || depth >= 48)
    return split;
  return adaptive_gauss(f, a, m, scale, depth + 1) + adaptive_gauss(f, m, b, scale, depth + 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b) {
  if (a == b) return 0;
  return adaptive_gauss(f, a, b, std::abs(gauss5(f, a, b)), 0);
}

// derivatives of a solution through the equation:
// f^(m+2) = (y^2 - 2 lambda) f^(m) + 2 m y f^(m-1) + m (m-1) f^(m-2)
inline double hermite_derivative(double lambda, double y, double value, double slope,
                                 int order) {
  std::array<double, 8> d{};
  d[0] = value;
  d[1] = slope;
  for (int m = 0; m + 2 <= order; ++m) {
    double acc = (y * y - 2 * lambda) * d[static_cast<size_t>(m)];
    if (m >= 1) acc += 2 * m * y * d[static_cast<size_t>(m - 1)];
    if (m >= 2) acc += m * (m - 1) * d[static_cast<size_t>(m - 2)];
    d[static_cast<size_t>(m + 2)] = acc;
  }
  return d[static_cast<size_t>(order)];
}

// dense RK4 cache of one solution, mirroring the potentials ODE curve
class HermiteCurve {
 public:
  HermiteCurve(double lambda, double value0, double slope0, double ymax, double step)
      : lambda_(lambda), ymax_(ymax) {
    auto rhs = [this](double t, const potentials::detail::P2& s) {
      if (std::abs(s.x) > potentials::kOdeBlowUpLimit ||
          std::abs(s.v) > potentials::kOdeBlowUpLimit)
        throw OdeBlowUp("landau basis: solution escaped the configured bound");
      return potentials::detail::P2{s.v, accel(t, s.x)};
    };
    const potentials::detail::P2 y0{value0, slope0};
    rk4_integrate(rhs, 0.0, -ymax, y0, step, [&](double t, const potentials::detail::P2& s) {
      ts_.push_back(t);
      ys_.push_back(s);
    });
    std::reverse(ts_.begin(), ts_.end());
    std::reverse(ys_.begin(), ys_.end());
    ts_.push_back(0.0);
    ys_.push_back(y0);
    rk4_integrate(rhs, 0.0, ymax, y0, step, [&](double t, const potentials::detail::P2& s) {
      ts_.push_back(t);
      ys_.push_back(s);
    });
  }

  double d(int order, double y) const {
    const auto [x, v] = eval(y);
    if (order == 0) return x;
    if (order == 1) return v;
    return hermite_derivative(lambda_, y, x, v, order);
  }

 private:
  double accel(double y, double x) const { return (y * y - 2 * lambda_) * x; }

  std::pair<double, double> eval(double y) const {
    if (y < -ymax_ - 1e-12 || y > ymax_ + 1e-12)
      throw DomainViolation("landau basis: evaluation outside the integration range");
    const auto it = std::upper_bound(ts_.begin(), ts_.end(), y);
    size_t k = static_cast<size_t>(std::max<std::ptrdiff_t>(1, it - ts_.begin())) - 1;
    k = std::min(k, ts_.size() - 2);
    const double t0 = ts_[k], t1 = ts_[k + 1], h = t1 - t0;
    const double u = (y - t0) / h;
    const auto& a = ys_[k];
    const auto& b = ys_[k + 1];
    const double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
    const double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
    const double x = h00 * a.x + h10 * h * a.v + h01 * b.x + h11 * h * b.v;
    const double v =
        h00 * a.v + h10 * h * accel(t0, a.x) + h01 * b.v + h11 * h * accel(t1, b.x);
    return {x, v};
  }

  double lambda_, ymax_;
  std::vector<double> ts_;
  std::vector<potentials::detail::P2> ys_;
};

}  // namespace detail

struct LandauBasis {
  double lambda = 0.5;
  bool closed_form = true;
  Fn1 psi1, psi2;  // derivative access via d(k, y)

  double wronskian(double y) const {
    return psi1(y) * psi2.d(1, y) - psi2(y) * psi1.d(1, y);
  }
};

// closed_form is available at the lowest Landau level only:
//   psi1 = exp(-y^2/2), psi2 = exp(-y^2/2) int_0^y exp(xi^2) dxi, W = 1.
// Otherwise the pair is integrated from psi1(0)=1, psi1'(0)=0 and psi2(0)=0,
// psi2'(0)=1 over |y| <= ymax.
inline LandauBasis landau_basis(double lambda, bool closed_form = true, double ymax = 5,
                                double step = kDefaultOdeStep) {
  LandauBasis b;
  b.lambda = lambda;
  b.closed_form = closed_form;
  if (closed_form) {
    if (lambda != 0.5)
      throw ValidationError("landau basis: the closed form exists at lambda = 1/2 only");
    b.psi1 = Fn1(
        [](int k, double y) {
          const double v = std::exp(-0.5 * y * y);
          return detail::hermite_derivative(0.5, y, v, -y * v, k);
        },
        7);
    b.psi2 = Fn1(
        [](int k, double y) {
          const double g = std::exp(-0.5 * y * y);
          const double v = g * detail::integrate([](double t) { return std::exp(t * t); },
                                                 0.0, y);
          const double s = -y * v + std::exp(0.5 * y * y);
          return detail::hermite_derivative(0.5, y, v, s, k);
        },
        7);
    return b;
  }
  auto c1 = std::make_shared<const detail::HermiteCurve>(lambda, 1.0, 0.0, ymax, step);
  auto c2 = std::make_shared<const detail::HermiteCurve>(lambda, 0.0, 1.0, ymax, step);
  b.psi1 = Fn1([c1](int k, double y) { return c1->d(k, y); }, 7);
  b.psi2 = Fn1([c2](int k, double y) { return c2->d(k, y); }, 7);
  return b;
}

// ---------------------------------------------------------------------------
// Landau canal surface of revolution: sphere centers z(y) on the z-axis and
// radii R(y),
//   z = k W psi1(y-k)/psi2(y-k) - psi2(y+k)/(4 k W psi1(y+k)),
//   R = k W psi1(y-k)/psi2(y-k) + psi2(y+k)/(4 k W psi1(y+k)).

struct ProfilePoint {
  double y = 0, z = 0, radius = 0;
  bool pole = false;
};

struct LandauProfile {
  std::vector<ProfilePoint> points;
  int pole_count = 0;
};

inline ProfilePoint landau_profile_point(const LandauBasis& b, double k, double y) {
  if (k == 0) throw ValidationError("landau profile: k must be nonzero");
  const double w = b.wronskian(0);
  const double t1 = k * w * b.psi1(y - k) / b.psi2(y - k);
  const double t2 = b.psi2(y + k) / (4 * k * w * b.psi1(y + k));
  ProfilePoint pt{y, t1 - t2, t1 + t2, false};
  if (!std::isfinite(pt.z) || !std::isfinite(pt.radius) || std::abs(pt.z) > kPoleMagnitude ||
      std::abs(pt.radius) > kPoleMagnitude)
    throw PoleOnGrid("landau profile: denominator vanishes at the sample");
  return pt;
}

// a point is recorded as a pole when its values blow past the magnitude
// threshold, or when a denominator changes sign across the previous sample
// and this sample sits closer to the crossing
inline LandauProfile landau_surface(const LandauBasis& b, double k,
                                    const std::vector<double>& ys) {
  if (k == 0) throw ValidationError("landau profile: k must be nonzero");
  LandauProfile out;
  out.points.reserve(ys.size());
  double prev1 = std::numeric_limits<double>::quiet_NaN();
  double prev2 = std::numeric_limits<double>::quiet_NaN();
  auto mark = [&out](ProfilePoint& pt) {
    if (pt.pole) return;
    pt.pole = true;
    pt.z = pt.radius = std::numeric_limits<double>::quiet_NaN();
    ++out.pole_count;
  };
  for (double y : ys) {
    const double den1 = b.psi2(y - k), den2 = b.psi1(y + k);
    ProfilePoint pt{y, 0, 0, false};
    try {
      pt = landau_profile_point(b, k, y);
    } catch (const PoleOnGrid&) {
      mark(pt);
    }
    if (std::isfinite(prev1)) {
      // a denominator crossed zero since the previous sample: flag whichever
      // endpoint sits closer to the crossing
      if (prev1 * den1 < 0)
        std::abs(den1) < std::abs(prev1) ? mark(pt) : mark(out.points.back());
      if (prev2 * den2 < 0)
        std::abs(den2) < std::abs(prev2) ? mark(pt) : mark(out.points.back());
    }
    out.points.push_back(pt);
    prev1 = den1;
    prev2 = den2;
  }
  return out;
}

// unnormalized hexaspherical components of the canal curvature sphere V
inline surface::HexSphere landau_hex(const LandauBasis& b, double k, double y) {
  if (k == 0) throw ValidationError("landau profile: k must be nonzero");
  const double w = b.wronskian(0);
  const double p1m = b.psi1(y - k), p1p = b.psi1(y + k);
  const double p2m = b.psi2(y - k), p2p = b.psi2(y + k);
  surface::HexSphere h;
  h[0] = (p1m * p2p - p2m * p1p) / w;
  h[1] = -(p1m * p2p + p2m * p1p) / w;
  h[2] = 0;
  h[3] = 0;
  h[4] = -2 * k * p1m * p1p + p2m * p2p / (2 * k * w * w);
  h[5] = -2 * k * p1m * p1p - p2m * p2p / (2 * k * w * w);
  return h;
}

// ---------------------------------------------------------------------------
// Landau twistor line: the complex 4-vector
//   psi = (e^{ikx} psi1(y+k), e^{-ikx} psi1(y-k),
//          e^{-ikx} psi2(y-k)/(2ikW), e^{ikx} psi2(y+k)/(2ikW))
// with its analytic x- and y-derivatives.

struct TwistorJet {
  TwistorVector v, vx, vy, vxy;
};

inline TwistorJet landau_twistor(const LandauBasis& b, double k, double x, double y) {
  if (k == 0) throw ValidationError("landau twistor: k must be nonzero");
  const double w = b.wronskian(0);
  const cd I(0, 1);
  const cd ep = std::exp(I * (k * x)), em = std::conj(ep);
  const cd s = 1.0 / (2.0 * I * k * w);
  const double p1p = b.psi1(y + k), p1m = b.psi1(y - k);
  const double p2p = b.psi2(y + k), p2m = b.psi2(y - k);
  const double d1p = b.psi1.d(1, y + k), d1m = b.psi1.d(1, y - k);
  const double d2p = b.psi2.d(1, y + k), d2m = b.psi2.d(1, y - k);
  TwistorJet t;
  t.v = {{ep * p1p, em * p1m, em * p2m * s, ep * p2p * s}};
  t.vx = {{I * k * ep * p1p, -I * k * em * p1m, -I * k * em * p2m * s, I * k * ep * p2p * s}};
  t.vy = {{ep * d1p, em * d1m, em * d2m * s, ep * d2p * s}};
  t.vxy = {{I * k * ep * d1p, -I * k * em * d1m, -I * k * em * d2m * s, I * k * ep * d2p * s}};
  return t;
}

// V = psi ^ psi_x + conjugate, as hexaspherical components
inline Bivector6 landau_twistor_sphere(const TwistorJet& t) {
  const Bivector6 v = algebra::wedge_to_hex(t.v, t.vx);
  return v + algebra::conj(v);
}

// ---------------------------------------------------------------------------
// Landau operator pair H = (1/2)(i d_x - M y)^2 + (1/2)(i d_y)^2, F = -d_x^2.
// M is normalized away internally: on xt = x sqrt(M), yt = y sqrt(M) the pair
// acts with kt = k/sqrt(M) and lt = lambda/M, and both operators pick up a
// factor M.

struct LandauCheck {
  double res_h = 0;   // max |H psi - lambda psi| over the four components
  double res_f = 0;   // max |F psi - k^2 psi|
  double lambda = 0;  // eigenvalue of H
  double ksq = 0;     // eigenvalue of F
};

// the pair in normalized coordinates; eigenvalues lambda and k^2
inline std::pair<MagneticOperator, MagneticOperator> landau_operators(double k, double lambda) {
  MagneticOperator h;
  h.g11 = h.g22 = Field2::constant(0.5);
  h.B = Field2::separable(Fn1::affine(-1, 0), Fn1::constant(1));
  h.eigen = lambda;
  MagneticOperator f;
  f.sign1 = 0;
  f.eigen = k * k;
  return {h, f};
}

// grid axes: r1 = y, r2 = x
inline LandauCheck landau_operator_check(double M, double k, double lambda, const GridSpec& g,
                                         bool closed_form = true) {
  if (M <= 0) throw ValidationError("landau operators: M must be positive");
  const double s = std::sqrt(M);
  const double kt = k / s, lt = lambda / M;
  const GridSpec gt{g.n1, g.n2, g.r1min * s, g.r2min * s, g.h1 * s, g.h2 * s};
  const double yspan = std::max(std::abs(gt.r1min), std::abs(gt.r1(gt.n1 - 1)));
  const LandauBasis basis =
      landau_basis(lt, closed_form, closed_form ? 5.0 : yspan + std::abs(kt) + 0.5);

  std::array<CGrid, 4> comp;
  for (auto& c : comp) c = CGrid(gt);
  for (int j = 0; j < gt.n2; ++j)
    for (int i = 0; i < gt.n1; ++i) {
      const TwistorJet t = landau_twistor(basis, kt, gt.r2(j), gt.r1(i));
      for (int c = 0; c < 4; ++c) comp[static_cast<size_t>(c)].at(i, j) = t.v[c];
    }

  const auto [h, f] = landau_operators(kt, lt);
  LandauCheck out;
  out.lambda = lambda;
  out.ksq = k * k;
  for (const CGrid& c : comp) {
    out.res_h = std::max(out.res_h, M * eigen_residual(h, c, lt));
    out.res_f = std::max(out.res_f, M * eigen_residual(f, c, kt * kt));
  }
  return out;
}

}  // namespace liesphere::spectral
