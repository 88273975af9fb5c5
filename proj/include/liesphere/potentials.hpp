#pragma once
// Potential data (p,q,V,W) for the conformal linear system
//   d1^2 psi = -i p d2 psi + (1/2)(V + i d2 p) psi
//   d2^2 psi =  i q d1 psi + (1/2)(W - i d1 q) psi
// together with its compatibility residuals, the derived frame coefficients,
// gauge covariance, and the explicit solvable families (c = 0, c = 1, and the
// canal / magnetic family with q = 0).

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include "liesphere/core.hpp"
#include "liesphere/errors.hpp"
#include "liesphere/fields.hpp"
#include "liesphere/jet.hpp"
#include "liesphere/ode.hpp"

namespace liesphere::potentials {

enum class FieldMode { analytic, sampled };

struct PotentialField {
  Field2 p, q, V, W;
  Rect domain{};
  bool canal = false;
  FieldMode mode = FieldMode::analytic;

  double tol_gc() const { return mode == FieldMode::analytic ? kTolGcAnalytic : kTolGcSampled; }
};

struct DerivedCoeffs {
  double k, l, a, b;
};

// Residuals of the three compatibility conditions (left minus right):
//   d2^3 p - 2 W d2 p - p d2 W + d1^3 q - 2 V d1 q - q d1 V = 0
//   d1 W - 2 q d2 p - p d2 q = 0
//   d2 V - 2 p d1 q - q d1 p = 0
// For the canal branch (q = 0) these reduce to
//   d2^3 p - 2 W d2 p - p d2 W = 0,  d1 W = 0,  d2 V = 0.
inline std::array<double, 3> gauss_codazzi_residual(const PotentialField& P, double r1,
                                                    double r2) {
  auto pj = P.p.jet(r1, r2);
  auto Wj = P.W.jet(r1, r2);
  auto Vj = P.V.jet(r1, r2);
  const double p = pj.value(), p2 = pj.partial(0, 1), p222 = pj.partial(0, 3);
  const double W = Wj.value(), W1 = Wj.partial(1, 0), W2 = Wj.partial(0, 1);
  const double V = Vj.value(), V1 = Vj.partial(1, 0), V2 = Vj.partial(0, 1);
  if (P.canal) {
    return {p222 - 2 * W * p2 - p * W2, W1, V2};
  }
  auto qj = P.q.jet(r1, r2);
  const double q = qj.value(), q1 = qj.partial(1, 0), q2 = qj.partial(0, 1),
               q111 = qj.partial(3, 0);
  const double p1 = pj.partial(1, 0);
  return {p222 - 2 * W * p2 - p * W2 + q111 - 2 * V * q1 - q * V1,
          W1 - 2 * q * p2 - p * q2, V2 - 2 * p * q1 - q * p1};
}

inline DerivedCoeffs derived_coeffs(const PotentialField& P, double r1, double r2) {
  auto pj = P.p.jet(r1, r2);
  const double p = pj.value();
  if (std::abs(p) < 1e-14) throw ZeroPotential("derived_coeffs: p vanishes");
  const double lp2 = pj.partial(0, 1) / p;
  const double lp22 = (p * pj.partial(0, 2) - pj.partial(0, 1) * pj.partial(0, 1)) / (p * p);
  const double lp12 = (p * pj.partial(1, 1) - pj.partial(1, 0) * pj.partial(0, 1)) / (p * p);
  const double W = P.W(r1, r2), V = P.V(r1, r2);
  DerivedCoeffs out{};
  out.a = W - lp22 - 0.5 * lp2 * lp2;
  if (P.canal) {
    out.k = -lp12;
    out.l = std::numeric_limits<double>::quiet_NaN();
    out.b = V;
    return out;
  }
  auto qj = P.q.jet(r1, r2);
  const double q = qj.value();
  if (std::abs(q) < 1e-14) throw ZeroPotential("derived_coeffs: q vanishes");
  const double lq1 = qj.partial(1, 0) / q;
  const double lq11 = (q * qj.partial(2, 0) - qj.partial(1, 0) * qj.partial(1, 0)) / (q * q);
  const double lq12 = (q * qj.partial(1, 1) - qj.partial(1, 0) * qj.partial(0, 1)) / (q * q);
  out.k = p * q - lp12;
  out.l = p * q - lq12;
  out.b = V - lq11 - 0.5 * lq1 * lq1;
  return out;
}

// S(h) = h'''/h' - (3/2)(h''/h')^2
inline double schwarzian(const Fn1& h, double t) {
  const double d1 = h.d(1, t);
  if (d1 == 0) throw DegenerateJet("schwarzian: critical point");
  const double r2 = h.d(2, t) / d1;
  return h.d(3, t) / d1 - 1.5 * r2 * r2;
}

// ---------------------------------------------------------------------------
// Gauge transformations R1 -> f(R1), R2 -> g(R2)

struct GaugeMap {
  Fn1 f, g, finv, ginv;

  static GaugeMap identity() {
    auto id = Fn1::identity();
    return {id, id, id, id};
  }
  // f = a1 t + b1, g = a2 t + b2 with positive slopes
  static GaugeMap affine(double a1, double b1, double a2, double b2) {
    if (a1 <= 0 || a2 <= 0) throw ValidationError("gauge: slopes must be positive");
    return {Fn1::affine(a1, b1), Fn1::affine(a2, b2), Fn1::affine(1 / a1, -b1 / a1),
            Fn1::affine(1 / a2, -b2 / a2)};
  }
  // f = (fc[0] t + fc[1])/(fc[2] t + fc[3]), same layout for g
  static GaugeMap moebius(const std::array<double, 4>& fc, const std::array<double, 4>& gc) {
    auto inv = [](const std::array<double, 4>& c) {
      return std::array<double, 4>{c[3], -c[1], -c[2], c[0]};
    };
    const auto fi = inv(fc), gi = inv(gc);
    return {Fn1::moebius(fc[0], fc[1], fc[2], fc[3]), Fn1::moebius(gc[0], gc[1], gc[2], gc[3]),
            Fn1::moebius(fi[0], fi[1], fi[2], fi[3]), Fn1::moebius(gi[0], gi[1], gi[2], gi[3])};
  }
  // outer after inner: acts as t -> outer.f(inner.f(t))
  static GaugeMap composed(const GaugeMap& outer, const GaugeMap& inner) {
    return {compose(outer.f, inner.f), compose(outer.g, inner.g),
            compose(inner.finv, outer.finv), compose(inner.ginv, outer.ginv)};
  }
};

namespace detail {

// substitute the zero-constant univariate series e1(du~), e2(dv~) into a
// bivariate series F(du,dv)
inline FieldJet substitute_sep(const FieldJet& F, const Jet1<kFieldOrder>& e1,
                               const Jet1<kFieldOrder>& e2) {
  std::array<Jet1<kFieldOrder>, kFieldOrder + 1> p1, p2;
  p1[0] = Jet1<kFieldOrder>::constant(1);
  p2[0] = Jet1<kFieldOrder>::constant(1);
  for (size_t i = 1; i <= kFieldOrder; ++i) {
    p1[i] = p1[i - 1] * e1;
    p2[i] = p2[i - 1] * e2;
  }
  FieldJet out;
  for (int i = 0; i <= kFieldOrder; ++i)
    for (int j = 0; i + j <= kFieldOrder; ++j)
      out = out + F.at(i, j) * (embed1(p1[static_cast<size_t>(i)]) *
                                embed2(p2[static_cast<size_t>(j)]));
  return out;
}

// Schwarzian derivative of h as a jet about t (uses h-derivatives to order 6)
inline Jet1<kFieldOrder> schwarzian_jet(const Fn1& h, double t) {
  auto d1 = h.jet<kFieldOrder>(t, 1);
  auto d2 = h.jet<kFieldOrder>(t, 2);
  auto d3 = h.jet<kFieldOrder>(t, 3);
  if (d1.value() == 0) throw DegenerateJet("schwarzian: critical point");
  auto r = d2 / d1;
  return d3 / d1 - 1.5 * r * r;
}

struct GaugeAtoms {
  double r1, r2;             // preimage point
  Jet1<kFieldOrder> e1, e2;  // displacement series of the inverse maps
  Jet1<kFieldOrder> fp, gp;  // f'(r1), g'(r2) as jets in the new coordinates
};

inline GaugeAtoms gauge_atoms(const GaugeMap& G, double u, double v) {
  GaugeAtoms at;
  auto j1 = G.finv.jet<kFieldOrder>(u);
  auto j2 = G.ginv.jet<kFieldOrder>(v);
  at.r1 = j1.value();
  at.r2 = j2.value();
  at.e1 = j1;
  at.e1.c[0] = 0;
  at.e2 = j2;
  at.e2.c[0] = 0;
  at.fp = compose1<kFieldOrder>(at.e1, G.f.jet<kFieldOrder>(at.r1, 1).c);
  at.gp = compose1<kFieldOrder>(at.e2, G.g.jet<kFieldOrder>(at.r2, 1).c);
  return at;
}

// second-order state for the family ODEs
struct P2 {
  double x = 0, v = 0;
  P2 operator+(const P2& o) const { return {x + o.x, v + o.v}; }
};
inline P2 operator*(double s, const P2& p) { return {s * p.x, s * p.v}; }

}  // namespace detail

// p* = p g'/(f')^2, q* = q f'/(g')^2, V* = (V + S(f))/(f')^2,
// W* = (W + S(g))/(g')^2, on the image rectangle.
inline PotentialField apply_gauge(const PotentialField& P, const GaugeMap& G) {
  for (int i = 0; i <= 32; ++i) {
    const double t1 = P.domain.r1min + P.domain.span1() * i / 32.0;
    const double t2 = P.domain.r2min + P.domain.span2() * i / 32.0;
    if (G.f.d(1, t1) <= 0 || G.g.d(1, t2) <= 0)
      throw ValidationError("gauge: map must be orientation-preserving on the domain");
  }
  PotentialField out;
  out.domain = {G.f(P.domain.r1min), G.f(P.domain.r1max), G.g(P.domain.r2min),
                G.g(P.domain.r2max)};
  out.canal = P.canal;
  out.mode = P.mode;
  out.p = Field2([F = P.p, G](double u, double v) {
    auto at = detail::gauge_atoms(G, u, v);
    return detail::substitute_sep(F.jet(at.r1, at.r2), at.e1, at.e2) *
           embed1(recip(at.fp * at.fp)) * embed2(at.gp);
  });
  out.q = Field2([F = P.q, G](double u, double v) {
    auto at = detail::gauge_atoms(G, u, v);
    return detail::substitute_sep(F.jet(at.r1, at.r2), at.e1, at.e2) *
           embed2(recip(at.gp * at.gp)) * embed1(at.fp);
  });
  out.V = Field2([F = P.V, G](double u, double v) {
    auto at = detail::gauge_atoms(G, u, v);
    auto sf = compose1<kFieldOrder>(at.e1, detail::schwarzian_jet(G.f, at.r1).c);
    return (detail::substitute_sep(F.jet(at.r1, at.r2), at.e1, at.e2) + embed1(sf)) *
           embed1(recip(at.fp * at.fp));
  });
  out.W = Field2([F = P.W, G](double u, double v) {
    auto at = detail::gauge_atoms(G, u, v);
    auto sg = compose1<kFieldOrder>(at.e2, detail::schwarzian_jet(G.g, at.r2).c);
    return (detail::substitute_sep(F.jet(at.r1, at.r2), at.e1, at.e2) + embed2(sg)) *
           embed2(recip(at.gp * at.gp));
  });
  return out;
}

struct FormValues {
  double metric;  // -p q dR1 dR2
  double cubic;   // p dR1^3 - q dR2^3
};

inline FormValues invariant_forms(const PotentialField& P, double r1, double r2, double d1,
                                  double d2) {
  const double p = P.p(r1, r2), q = P.canal ? 0.0 : P.q(r1, r2);
  return {-p * q * d1 * d2, p * d1 * d1 * d1 - q * d2 * d2 * d2};
}

// ---------------------------------------------------------------------------
// Validation

// Throws unless the field is compatible on a validation grid and p (and q,
// unless canal) stays away from zero. Frame integration calls this first.
inline void validate(const PotentialField& P, int n = 21) {
  const Rect box = P.domain.inset(0.05 * std::min(P.domain.span1(), P.domain.span2()));
  auto g = GridSpec::over(box, n, n);
  double pmin = std::numeric_limits<double>::max(), pmax = -pmin;
  double qmin = pmin, qmax = -pmin;
  double worst = 0;
  for (int j = 0; j < g.n2; ++j)
    for (int i = 0; i < g.n1; ++i) {
      const double r1 = g.r1(i), r2 = g.r2(j);
      const double p = P.p(r1, r2);
      pmin = std::min(pmin, p);
      pmax = std::max(pmax, p);
      if (!P.canal) {
        const double q = P.q(r1, r2);
        qmin = std::min(qmin, q);
        qmax = std::max(qmax, q);
      }
      auto r = gauss_codazzi_residual(P, r1, r2);
      for (double x : r) worst = std::max(worst, std::abs(x));
    }
  if (pmin <= 0 && pmax >= 0) throw ZeroPotential("validate: p crosses zero on the domain");
  if (!P.canal && qmin <= 0 && qmax >= 0)
    throw ZeroPotential("validate: q crosses zero on the domain");
  if (worst > P.tol_gc()) throw ValidationError("validate: compatibility residual too large");
}

// ---------------------------------------------------------------------------
// Family c = 0:  p = psi1'(R1), q = -psi2'(R2) with psi_i'' = alpha psi_i^2
// + rho_i psi_i + s_i, and
//   V = eps1 + eps0 psi1 - psi2 psi1'' - (rho2/2) psi1^2
//   W = eps2 + eps0 psi2 - psi1 psi2'' - (rho1/2) psi2^2

inline constexpr double kOdeBlowUpLimit = 1e6;

// Solution curve of x'' = alpha x^2 + rho x + s with dense output and
// derivatives to order 5 through the equation.
class OdeCurve {
 public:
  OdeCurve(double alpha, double rho, double s, double value0, double slope0, double t0,
           double tmin, double tmax, double step = kDefaultOdeStep)
      : alpha_(alpha), rho_(rho), s_(s), tmin_(tmin), tmax_(tmax) {
    if (!(tmin <= t0 && t0 <= tmax)) throw ValidationError("ode curve: t0 outside range");
    auto rhs = [this](double, const detail::P2& y) {
      if (std::abs(y.x) > kOdeBlowUpLimit || std::abs(y.v) > kOdeBlowUpLimit)
        throw OdeBlowUp("ode curve: solution escaped the configured bound");
      return detail::P2{y.v, accel(y.x)};
    };
    const detail::P2 y0{value0, slope0};
    // left sweep (reversed afterwards), then the seed, then the right sweep
    rk4_integrate(rhs, t0, tmin, y0, step, [&](double t, const detail::P2& y) {
      ts_.push_back(t);
      ys_.push_back(y);
    });
    std::reverse(ts_.begin(), ts_.end());
    std::reverse(ys_.begin(), ys_.end());
    ts_.push_back(t0);
    ys_.push_back(y0);
    rk4_integrate(rhs, t0, tmax, y0, step, [&](double t, const detail::P2& y) {
      ts_.push_back(t);
      ys_.push_back(y);
    });
  }

  double tmin() const { return tmin_; }
  double tmax() const { return tmax_; }
  double operator()(double t) const { return d(0, t); }

  // derivative of any order <= 5 (orders >= 2 through the equation)
  double d(int order, double t) const {
    auto [x, v] = eval(t);
    const double lin = 2 * alpha_ * x + rho_;
    switch (order) {
      case 0: return x;
      case 1: return v;
      case 2: return accel(x);
      case 3: return lin * v;
      case 4: return lin * accel(x) + 2 * alpha_ * v * v;
      case 5: return lin * lin * v + 6 * alpha_ * v * accel(x);
      default: throw Error("ode curve: derivative order not supported");
    }
  }

 private:
  double accel(double x) const { return alpha_ * x * x + rho_ * x + s_; }

  std::pair<double, double> eval(double t) const {
    if (t < tmin_ - 1e-12 || t > tmax_ + 1e-12)
      throw DomainViolation("ode curve: evaluation outside the integration range");
    const auto it = std::upper_bound(ts_.begin(), ts_.end(), t);
    size_t k = static_cast<size_t>(std::max<std::ptrdiff_t>(1, it - ts_.begin())) - 1;
    k = std::min(k, ts_.size() - 2);
    const double t0 = ts_[k], t1 = ts_[k + 1], h = t1 - t0;
    const double u = (t - t0) / h;
    const auto& a = ys_[k];
    const auto& b = ys_[k + 1];
    // cubic Hermite for the value; again for the slope using accelerations
    const double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
    const double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
    const double x = h00 * a.x + h10 * h * a.v + h01 * b.x + h11 * h * b.v;
    const double v = h00 * a.v + h10 * h * accel(a.x) + h01 * b.v + h11 * h * accel(b.x);
    return {x, v};
  }

  double alpha_, rho_, s_;
  double tmin_, tmax_;
  std::vector<double> ts_;
  std::vector<detail::P2> ys_;
};

// view the shift-th derivative of a curve as a function
inline Fn1 curve_fn(std::shared_ptr<const OdeCurve> c, int shift = 0) {
  return Fn1([c, shift](int k, double t) { return c->d(k + shift, t); }, 5 - shift);
}

struct C0Params {
  double eps0 = 0, eps1 = 0, eps2 = 0;
  double alpha = 0, rho1 = 0, rho2 = 0, s1 = 0, s2 = 0;
  double psi1_value0 = 1, psi1_slope0 = 0;
  double psi2_value0 = 1, psi2_slope0 = 0;
  Rect domain{};
  double ode_step = kDefaultOdeStep;
};

struct C0Family {
  PotentialField field;
  std::shared_ptr<const OdeCurve> psi1, psi2;
  C0Params params;
};

inline C0Family make_c0_family(const C0Params& prm) {
  const Rect d = prm.domain;
  auto c1 = std::make_shared<const OdeCurve>(prm.alpha, prm.rho1, prm.s1, prm.psi1_value0,
                                             prm.psi1_slope0, 0.0, std::min(0.0, d.r1min),
                                             std::max(0.0, d.r1max), prm.ode_step);
  auto c2 = std::make_shared<const OdeCurve>(prm.alpha, prm.rho2, prm.s2, prm.psi2_value0,
                                             prm.psi2_slope0, 0.0, std::min(0.0, d.r2min),
                                             std::max(0.0, d.r2max), prm.ode_step);
  const Fn1 psi1 = curve_fn(c1), dpsi1 = curve_fn(c1, 1), ddpsi1 = curve_fn(c1, 2);
  const Fn1 psi2 = curve_fn(c2), dpsi2 = curve_fn(c2, 1), ddpsi2 = curve_fn(c2, 2);

  C0Family fam;
  fam.psi1 = c1;
  fam.psi2 = c2;
  fam.params = prm;
  fam.field.domain = d;
  fam.field.p =
      Field2([dpsi1](double r1, double) { return embed1(dpsi1.jet<kFieldOrder>(r1)); });
  fam.field.q =
      Field2([dpsi2](double, double r2) { return embed2(dpsi2.jet<kFieldOrder>(r2)) * -1.0; });
  const double e0 = prm.eps0, e1 = prm.eps1, e2 = prm.eps2;
  const double rho1 = prm.rho1, rho2 = prm.rho2;
  fam.field.V = Field2([psi1, ddpsi1, psi2, e0, e1, rho2](double r1, double r2) {
    auto j1 = embed1(psi1.jet<kFieldOrder>(r1));
    auto j1pp = embed1(ddpsi1.jet<kFieldOrder>(r1));
    auto j2 = embed2(psi2.jet<kFieldOrder>(r2));
    return e1 + e0 * j1 - j2 * j1pp - 0.5 * rho2 * (j1 * j1);
  });
  fam.field.W = Field2([psi1, psi2, ddpsi2, e0, e2, rho1](double r1, double r2) {
    auto j2 = embed2(psi2.jet<kFieldOrder>(r2));
    auto j2pp = embed2(ddpsi2.jet<kFieldOrder>(r2));
    auto j1 = embed1(psi1.jet<kFieldOrder>(r1));
    return e2 + e0 * j2 - j1 * j2pp - 0.5 * rho1 * (j2 * j2);
  });
  return fam;
}

// ---------------------------------------------------------------------------
// Family c = 1:  p = sqrt(f2(R2)/f1(R1))/(R2-R1), q = -sqrt(f1/f2)/(R2-R1),
//   V = d1^2 ln q + (1/2)(d1 ln q)^2 - E(R1)/f1
//   W = d2^2 ln p + (1/2)(d2 ln p)^2 + E(R2)/f2,  E(t) = eps0 + eps1 t + eps2 t^2

struct C1Params {
  Fn1 f1, f2;
  double eps0 = 0, eps1 = 0, eps2 = 0;
  Rect domain{};
};

inline PotentialField make_c1_family(const C1Params& prm) {
  for (int i = 0; i <= 32; ++i) {
    const double r1 = prm.domain.r1min + prm.domain.span1() * i / 32.0;
    const double r2 = prm.domain.r2min + prm.domain.span2() * i / 32.0;
    if (prm.f1(r1) <= 0 || prm.f2(r2) <= 0)
      throw DomainViolation("c=1 family: f1, f2 must be positive on the domain");
  }
  if (prm.domain.r2min <= prm.domain.r1max)
    throw DomainViolation("c=1 family: the domain must satisfy R2 > R1");

  PotentialField out;
  out.domain = prm.domain;
  const Fn1 f1 = prm.f1, f2 = prm.f2;
  const Fn1 E = Fn1::polynomial({prm.eps0, prm.eps1, prm.eps2});

  auto delta = [](double r1, double r2) { return FieldJet::var2(r2) - FieldJet::var1(r1); };
  out.p = Field2([f1, f2, delta](double r1, double r2) {
    auto ratio = embed2(f2.jet<kFieldOrder>(r2)) / embed1(f1.jet<kFieldOrder>(r1));
    return sqrt(ratio) * recip(delta(r1, r2));
  });
  out.q = Field2([f1, f2, delta](double r1, double r2) {
    auto ratio = embed1(f1.jet<kFieldOrder>(r1)) / embed2(f2.jet<kFieldOrder>(r2));
    return sqrt(ratio) * recip(delta(r1, r2)) * -1.0;
  });
  out.V = Field2([f1, E, delta](double r1, double r2) {
    auto invd = recip(delta(r1, r2));
    auto lf1 = embed1(f1.jet<kFieldOrder>(r1, 1) / f1.jet<kFieldOrder>(r1));
    auto lf1p = embed1(f1.jet<kFieldOrder>(r1, 2) / f1.jet<kFieldOrder>(r1));
    auto dlnq = invd + 0.5 * lf1;
    auto d2lnq = invd * invd + 0.5 * (lf1p - lf1 * lf1);
    auto Ej = embed1(E.jet<kFieldOrder>(r1) / f1.jet<kFieldOrder>(r1));
    return d2lnq + 0.5 * (dlnq * dlnq) - Ej;
  });
  out.W = Field2([f2, E, delta](double r1, double r2) {
    auto invd = recip(delta(r1, r2));
    auto lf2 = embed2(f2.jet<kFieldOrder>(r2, 1) / f2.jet<kFieldOrder>(r2));
    auto lf2p = embed2(f2.jet<kFieldOrder>(r2, 2) / f2.jet<kFieldOrder>(r2));
    auto dlnp = invd * -1.0 + 0.5 * lf2;
    auto d2lnp = invd * invd + 0.5 * (lf2p - lf2 * lf2);
    auto Ej = embed2(E.jet<kFieldOrder>(r2) / f2.jet<kFieldOrder>(r2));
    return d2lnp + 0.5 * (dlnp * dlnp) + Ej;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Canal / magnetic family:  p = 2 M R1, q = 0,
//   V = 2 M^2 (R1)^2 + 2 k^2 - 4 lambda,  W = -2 k^2

struct CanalParams {
  double M = 1, lambda = 0.5, k = 1;
  Rect domain{};
};

inline PotentialField make_canal_landau(const CanalParams& prm) {
  if (prm.M <= 0) throw ValidationError("canal family: M must be positive");
  PotentialField out;
  out.domain = prm.domain;
  out.canal = true;
  out.p = Field2::separable(Fn1::affine(2 * prm.M, 0), Fn1::constant(1));
  out.q = Field2::constant(0);
  out.V = Field2::separable(
      Fn1::polynomial({2 * prm.k * prm.k - 4 * prm.lambda, 0, 2 * prm.M * prm.M}),
      Fn1::constant(1));
  out.W = Field2::constant(-2 * prm.k * prm.k);
  return out;
}

// Potentials backed by grid samples (4th-order stencils between the nodes).
inline PotentialField sampled_potentials(std::shared_ptr<const RGrid> p,
                                         std::shared_ptr<const RGrid> q,
                                         std::shared_ptr<const RGrid> V,
                                         std::shared_ptr<const RGrid> W, bool canal = false) {
  PotentialField out;
  out.domain = p->g.rect();
  out.canal = canal;
  out.mode = FieldMode::sampled;
  out.p = sampled_field(std::move(p));
  out.q = canal && !q ? Field2::constant(0) : sampled_field(std::move(q));
  out.V = sampled_field(std::move(V));
  out.W = sampled_field(std::move(W));
  return out;
}

}  // namespace liesphere::potentials
