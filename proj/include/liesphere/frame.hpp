#pragma once
// The moving frame (psi, psi1, psi2, eta) of the conformal linear system: the
// 4x4 connection pair, RK4 transport along polylines, holonomy defects, and
// the induced 6-dimensional frame (U, A, P, V, B, Q) with its connection.

#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "liesphere/algebra.hpp"
#include "liesphere/core.hpp"
#include "liesphere/errors.hpp"
#include "liesphere/fields.hpp"
#include "liesphere/ode.hpp"
#include "liesphere/potentials.hpp"

namespace liesphere::frame {

using algebra::Bivector6;
using algebra::Mat4;
using algebra::TwistorVector;
using potentials::PotentialField;

struct FrameState {
  Point2 at{};
  TwistorVector psi, psi1, psi2, eta;

  // frame vectors stacked as matrix rows, in the order psi, psi1, psi2, eta
  Mat4 rows() const {
    Mat4 m;
    const TwistorVector* v[4] = {&psi, &psi1, &psi2, &eta};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) m[i][j] = (*v[i])[j];
    return m;
  }
  static FrameState from_rows(Point2 at, const Mat4& m) {
    FrameState f;
    f.at = at;
    TwistorVector* v[4] = {&f.psi, &f.psi1, &f.psi2, &f.eta};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) (*v[i])[j] = m[i][j];
    return f;
  }
};

// target of the frame normalization: (psi1,psi2)=(psi2,psi1)=1,
// (psi,eta)=(eta,psi)=-1, every other pair 0
inline Mat4 gram_target() { return algebra::herm4_gram(); }

inline Mat4 gram_matrix(const FrameState& F) {
  const TwistorVector* v[4] = {&F.psi, &F.psi1, &F.psi2, &F.eta};
  Mat4 g;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) g[i][j] = algebra::herm_product4(*v[i], *v[j]);
  return g;
}

inline cd frame_det(const FrameState& F) {
  return algebra::det4(F.psi, F.psi1, F.psi2, F.eta);
}

inline FrameState standard_null_tetrad(Point2 at = {}) {
  FrameState f;
  f.at = at;
  f.psi = TwistorVector::unit(0);
  f.psi1 = TwistorVector::unit(1);
  f.psi2 = TwistorVector::unit(2);
  f.eta = TwistorVector::unit(3);
  return f;
}

inline void check_frame(const FrameState& F, double tol = 1e-8) {
  if (algebra::max_abs(gram_matrix(F) - gram_target()) > tol)
    throw InvalidFrame("frame: Gram matrix does not match the normalization");
  if (std::abs(frame_det(F) - cd(1, 0)) > tol)
    throw InvalidFrame("frame: determinant is not 1");
}

struct ConnectionPair {
  Mat4 M1, M2;
};

// Coefficient matrices of d1 F = M1 F, d2 F = M2 F on the stacked frame.
// Generic branch:
//   M1 = [[k1, 1, 0, 0], [b/2, -k1, -ip, 0], [k/2, 0, k1, 1],
//         [-(i/2) p a, k/2, b/2, -k1]],   k1 = (1/2) d1 q / q
//   M2 = [[k2, 0, 1, 0], [l/2, k2, 0, 1], [a/2, iq, -k2, 0],
//         [(i/2) q b, a/2, l/2, -k2]],    k2 = (1/2) d2 p / p
// Canal branch (q = 0): k1-terms and the q-column entries drop out.
inline ConnectionPair connection_matrices(const PotentialField& P, double r1, double r2) {
  const auto dc = potentials::derived_coeffs(P, r1, r2);
  const double p = P.p(r1, r2);
  const cd I(0, 1);
  ConnectionPair out;
  if (P.canal) {
    Mat4& m1 = out.M1;
    m1[0][1] = 1;
    m1[1][0] = dc.b / 2;
    m1[1][2] = -I * p;
    m1[2][0] = dc.k / 2;
    m1[2][3] = 1;
    m1[3][0] = -I / 2.0 * p * dc.a;
    m1[3][1] = dc.k / 2;
    m1[3][2] = dc.b / 2;
    const double k2 = 0.5 * P.p.d(0, 1, r1, r2) / p;
    Mat4& m2 = out.M2;
    m2[0][0] = k2;
    m2[0][2] = 1;
    m2[1][1] = k2;
    m2[1][3] = 1;
    m2[2][0] = dc.a / 2;
    m2[2][2] = -k2;
    m2[3][1] = dc.a / 2;
    m2[3][3] = -k2;
    return out;
  }
  const double q = P.q(r1, r2);
  const double k1 = 0.5 * P.q.d(1, 0, r1, r2) / q;
  const double k2 = 0.5 * P.p.d(0, 1, r1, r2) / p;
  Mat4& m1 = out.M1;
  m1[0][0] = k1;
  m1[0][1] = 1;
  m1[1][0] = dc.b / 2;
  m1[1][1] = -k1;
  m1[1][2] = -I * p;
  m1[2][0] = dc.k / 2;
  m1[2][2] = k1;
  m1[2][3] = 1;
  m1[3][0] = -I / 2.0 * p * dc.a;
  m1[3][1] = dc.k / 2;
  m1[3][2] = dc.b / 2;
  m1[3][3] = -k1;
  Mat4& m2 = out.M2;
  m2[0][0] = k2;
  m2[0][2] = 1;
  m2[1][0] = dc.l / 2;
  m2[1][1] = k2;
  m2[1][3] = 1;
  m2[2][0] = dc.a / 2;
  m2[2][1] = I * q;
  m2[2][2] = -k2;
  m2[3][0] = I / 2.0 * q * dc.b;
  m2[3][1] = dc.a / 2;
  m2[3][2] = dc.l / 2;
  m2[3][3] = -k2;
  return out;
}

// Transport the frame along a polyline inside the domain. Fixed-step RK4 on
// each segment; the reported value is the difference against one integration
// with halved steps (Richardson control, not used to adapt).
struct TransportResult {
  FrameState state;
  double step_halved_diff = 0;
};

namespace detail {

inline Mat4 transport_segment(const PotentialField& P, Mat4 G, Point2 a, Point2 b, double h) {
  const double d1 = b.r1 - a.r1, d2 = b.r2 - a.r2;
  const double len = std::hypot(d1, d2);
  if (len == 0) return G;
  auto rhs = [&](double t, const Mat4& g) {
    const auto c = connection_matrices(P, a.r1 + t * d1, a.r2 + t * d2);
    return (c.M1 * cd(d1, 0) + c.M2 * cd(d2, 0)) * g;
  };
  return rk4_integrate(rhs, 0.0, 1.0, std::move(G), h / len);
}

}  // namespace detail

namespace detail {

inline void check_path(const PotentialField& P, Point2 base, const FrameState& init,
                       const std::vector<Point2>& path) {
  if (path.empty()) throw ValidationError("frame transport: empty path");
  if (std::abs(path.front().r1 - base.r1) > 1e-12 || std::abs(path.front().r2 - base.r2) > 1e-12)
    throw ValidationError("frame transport: path must start at the base point");
  if (std::abs(init.at.r1 - base.r1) > 1e-12 || std::abs(init.at.r2 - base.r2) > 1e-12)
    throw ValidationError("frame transport: initial frame not anchored at the base point");
  for (const auto& pt : path)
    if (!P.domain.contains(pt.r1, pt.r2, 1e-12))
      throw DomainViolation("frame transport: path leaves the domain");
  check_frame(init);
}

}  // namespace detail

inline TransportResult integrate_frame_reported(const PotentialField& P, Point2 base,
                                                const FrameState& init,
                                                const std::vector<Point2>& path,
                                                double h = kDefaultOdeStep) {
  detail::check_path(P, base, init, path);
  Mat4 g = init.rows(), gh = g;
  for (size_t s = 0; s + 1 < path.size(); ++s) {
    g = detail::transport_segment(P, g, path[s], path[s + 1], h);
    gh = detail::transport_segment(P, gh, path[s], path[s + 1], h / 2);
  }
  TransportResult out;
  out.state = FrameState::from_rows(path.back(), g);
  out.step_halved_diff = algebra::max_abs(g - gh);
  return out;
}

inline FrameState integrate_frame(const PotentialField& P, Point2 base, const FrameState& init,
                                  const std::vector<Point2>& path,
                                  double h = kDefaultOdeStep) {
  detail::check_path(P, base, init, path);
  Mat4 g = init.rows();
  for (size_t s = 0; s + 1 < path.size(); ++s)
    g = detail::transport_segment(P, g, path[s], path[s + 1], h);
  return FrameState::from_rows(path.back(), g);
}

inline FrameState integrate_frame(const PotentialField& P, Point2 base,
                                  const std::vector<Point2>& path,
                                  double h = kDefaultOdeStep) {
  return integrate_frame(P, base, standard_null_tetrad(base), path, h);
}

// Max-norm defect of transporting around the rectangle boundary
// (counterclockwise from the lower-left corner, where init is anchored).
inline double holonomy_defect(const PotentialField& P, const Rect& rect, const FrameState& init,
                              double h = kDefaultOdeStep) {
  const Point2 c00{rect.r1min, rect.r2min}, c10{rect.r1max, rect.r2min};
  const Point2 c11{rect.r1max, rect.r2max}, c01{rect.r1min, rect.r2max};
  auto loop = integrate_frame(P, c00, init, {c00, c10, c11, c01, c00}, h);
  return algebra::max_abs(loop.rows() - init.rows());
}

inline double holonomy_defect(const PotentialField& P, const Rect& rect,
                              double h = kDefaultOdeStep) {
  return holonomy_defect(P, rect, standard_null_tetrad({rect.r1min, rect.r2min}), h);
}

// (d1 d2 psi, d1 d2 psi) reconstructed from the tetrad and the potentials;
// equals -pq whenever the frame satisfies the normalization. A consequence of
// the construction, verified as a property rather than enforced.
inline cd mixed_derivative_product(const PotentialField& P, const FrameState& F) {
  const double p = P.p(F.at.r1, F.at.r2);
  const double q = P.canal ? 0.0 : P.q(F.at.r1, F.at.r2);
  const double u = P.canal ? 0.0 : 0.5 * P.q.d(1, 0, F.at.r1, F.at.r2) / q;
  const double w = 0.5 * P.p.d(0, 1, F.at.r1, F.at.r2) / p;
  const TwistorVector x =
      F.eta + u * F.psi2 + w * F.psi1 + cd(u * w + 0.5 * p * q, 0) * F.psi;
  return algebra::herm_product4(x, x);
}

// ---------------------------------------------------------------------------
// Lie sphere frame: U = i psi^psi1, V = psi^psi2, A = i psi2^psi1 + i psi^eta,
// B = psi1^psi2 + psi^eta, P = 2i psi2^eta, Q = 2 psi1^eta.

// component order used throughout: U, A, P, V, B, Q
enum LieIndex { kU = 0, kA = 1, kP = 2, kV = 3, kB = 4, kQ = 5 };

struct LieFrame6 {
  Point2 at{};
  std::array<Bivector6, 6> vec{};

  Bivector6& operator[](int i) { return vec[static_cast<size_t>(i)]; }
  const Bivector6& operator[](int i) const { return vec[static_cast<size_t>(i)]; }
};

inline LieFrame6 frame_to_lie6(const FrameState& F) {
  using algebra::wedge_to_hex;
  const cd I(0, 1);
  LieFrame6 L;
  L.at = F.at;
  L[kU] = I * wedge_to_hex(F.psi, F.psi1);
  L[kV] = wedge_to_hex(F.psi, F.psi2);
  L[kA] = I * wedge_to_hex(F.psi2, F.psi1) + I * wedge_to_hex(F.psi, F.eta);
  L[kB] = wedge_to_hex(F.psi1, F.psi2) + wedge_to_hex(F.psi, F.eta);
  L[kP] = 2.0 * I * wedge_to_hex(F.psi2, F.eta);
  L[kQ] = 2.0 * wedge_to_hex(F.psi1, F.eta);
  return L;
}

struct Mat6 {
  std::array<std::array<double, 6>, 6> m{};
  std::array<double, 6>& operator[](int i) { return m[static_cast<size_t>(i)]; }
  const std::array<double, 6>& operator[](int i) const { return m[static_cast<size_t>(i)]; }
};

// Coefficient matrices of the 6-frame equations d_i (U,A,P,V,B,Q)^T = L_i (...)^T
inline std::pair<Mat6, Mat6> lie_connection(const PotentialField& Pot, double r1, double r2) {
  const auto dc = potentials::derived_coeffs(Pot, r1, r2);
  const double p = Pot.p(r1, r2);
  const double dlp2 = Pot.p.d(0, 1, r1, r2) / p;
  Mat6 L1, L2;
  if (Pot.canal) {
    L1[kU][kV] = p;
    L1[kA][kU] = dc.k;
    L1[kP][kA] = dc.k;
    L1[kP][kV] = -p * dc.a;
    L1[kV][kB] = 1;
    L1[kB][kV] = dc.b;
    L1[kB][kQ] = 1;
    L1[kQ][kU] = p * dc.a;
    L1[kQ][kP] = -p;
    L1[kQ][kB] = dc.b;

    L2[kU][kU] = dlp2;
    L2[kU][kA] = 1;
    L2[kA][kU] = dc.a;
    L2[kA][kP] = 1;
    L2[kP][kA] = dc.a;
    L2[kP][kP] = -dlp2;
    return {L1, L2};
  }
  const double q = Pot.q(r1, r2);
  const double dlq1 = Pot.q.d(1, 0, r1, r2) / q;
  L1[kU][kV] = p;
  L1[kA][kU] = dc.k;
  L1[kP][kA] = dc.k;
  L1[kP][kV] = -p * dc.a;
  L1[kV][kV] = dlq1;
  L1[kV][kB] = 1;
  L1[kB][kV] = dc.b;
  L1[kB][kQ] = 1;
  L1[kQ][kU] = p * dc.a;
  L1[kQ][kP] = -p;
  L1[kQ][kB] = dc.b;
  L1[kQ][kQ] = -dlq1;

  L2[kU][kU] = dlp2;
  L2[kU][kA] = 1;
  L2[kA][kU] = dc.a;
  L2[kA][kP] = 1;
  L2[kP][kA] = dc.a;
  L2[kP][kP] = -dlp2;
  L2[kP][kV] = q * dc.b;
  L2[kP][kQ] = -q;
  L2[kV][kU] = q;
  L2[kB][kV] = dc.l;
  L2[kQ][kU] = -q * dc.b;
  L2[kQ][kB] = dc.l;
  return {L1, L2};
}

// Frames at every node of a grid: transport along the bottom edge, then up
// each column.
inline Grid<Mat4> integrate_grid(const PotentialField& P, const GridSpec& g,
                                 double h = kDefaultOdeStep) {
  if (!P.domain.contains(g.rect(), 1e-12))
    throw DomainViolation("frame grid: grid leaves the domain");
  Grid<Mat4> out(g);
  auto base = standard_null_tetrad({g.r1(0), g.r2(0)});
  check_frame(base);
  Mat4 row = base.rows();
  out.at(0, 0) = row;
  for (int i = 1; i < g.n1; ++i) {
    row = detail::transport_segment(P, row, {g.r1(i - 1), g.r2(0)}, {g.r1(i), g.r2(0)}, h);
    out.at(i, 0) = row;
  }
  for (int i = 0; i < g.n1; ++i) {
    Mat4 col = out.at(i, 0);
    for (int j = 1; j < g.n2; ++j) {
      col = detail::transport_segment(P, col, {g.r1(i), g.r2(j - 1)}, {g.r1(i), g.r2(j)}, h);
      out.at(i, j) = col;
    }
  }
  return out;
}

inline Grid<LieFrame6> lie6_grid(const Grid<Mat4>& frames) {
  Grid<LieFrame6> out(frames.g);
  for (int j = 0; j < frames.g.n2; ++j)
    for (int i = 0; i < frames.g.n1; ++i)
      out.at(i, j) = frame_to_lie6(FrameState::from_rows({frames.g.r1(i), frames.g.r2(j)},
                                                         frames.at(i, j)));
  return out;
}

// Max-norm residual of the 6-frame equations over the interior of the grid:
// 4th-order finite differences of the six bivectors against the L_i action.
inline double lie6_residual(const PotentialField& P, const Grid<LieFrame6>& L) {
  const GridSpec& g = L.g;
  if (g.n1 < 5 || g.n2 < 5) throw StencilOutOfDomain("lie6 residual: grid too small");
  double worst = 0;
  for (int j = 2; j < g.n2 - 2; ++j)
    for (int i = 2; i < g.n1 - 2; ++i) {
      const auto conn = lie_connection(P, g.r1(i), g.r2(j));
      for (int dir = 0; dir < 2; ++dir) {
        const Mat6& M = dir == 0 ? conn.first : conn.second;
        const double h = dir == 0 ? g.h1 : g.h2;
        auto nb = [&](int o) -> const LieFrame6& {
          return dir == 0 ? L.at(i + o, j) : L.at(i, j + o);
        };
        for (int r = 0; r < 6; ++r) {
          Bivector6 fd = (1.0 / (12 * h)) *
                         (-1.0 * nb(2)[r] + 8.0 * nb(1)[r] - 8.0 * nb(-1)[r] + nb(-2)[r]);
          Bivector6 pred;
          for (int c = 0; c < 6; ++c)
            if (M[r][c] != 0) pred = pred + M[r][c] * L.at(i, j)[c];
          worst = std::max(worst, algebra::max_abs(fd - pred));
        }
      }
    }
  return worst;
}

}  // namespace liesphere::frame
