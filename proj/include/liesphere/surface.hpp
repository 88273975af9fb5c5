#pragma once
// Real curvature-sphere vectors U = 2 Re(curly U), V = 2 Re(curly V), the
// hexaspherical <-> (center, radius) dictionary, orthogonality checks for the
// sphere congruences, and reconstruction of the enveloping surface.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "liesphere/algebra.hpp"
#include "liesphere/core.hpp"
#include "liesphere/errors.hpp"
#include "liesphere/fields.hpp"
#include "liesphere/frame.hpp"
#include "liesphere/potentials.hpp"

namespace liesphere::surface {

using potentials::PotentialField;

struct HexSphere {
  std::array<double, 6> y{};

  double& operator[](int i) { return y[static_cast<size_t>(i)]; }
  const double& operator[](int i) const { return y[static_cast<size_t>(i)]; }
};

// signature (4,2) product; the quadric is the null cone of this form
inline double lie_product(const HexSphere& a, const HexSphere& b) {
  return -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3] + a[4] * b[4] - a[5] * b[5];
}

inline double quadric_residual(const HexSphere& a) { return lie_product(a, a); }

// oriented sphere (center, radius) -> hexaspherical coordinates
inline HexSphere hex_embed(const Vec3& center, double radius) {
  const double c2 = dot(center, center), r2 = radius * radius;
  HexSphere h;
  h[0] = (1 + c2 - r2) / 2;
  h[1] = (1 - c2 + r2) / 2;
  h[2] = center.x;
  h[3] = center.y;
  h[4] = center.z;
  h[5] = radius;
  return h;
}

struct CenterRadius {
  Vec3 center;
  double radius = 0;
};

inline CenterRadius hex_normalize(const HexSphere& h) {
  const double s = h[0] + h[1];
  if (std::abs(s) <= kEpsPlane)
    throw PlaneAtInfinity("hex_normalize: y0 + y1 vanishes (plane, no finite center)");
  return {{h[2] / s, h[3] / s, h[4] / s}, h[5] / s};
}

// curvature spheres of the frame: real parts of the first two 6-frame vectors
inline std::pair<HexSphere, HexSphere> curvature_spheres(const frame::FrameState& F) {
  const auto L = frame::frame_to_lie6(F);
  HexSphere U, V;
  for (int i = 0; i < 6; ++i) {
    U[i] = 2 * L[frame::kU][i].real();
    V[i] = 2 * L[frame::kV][i].real();
  }
  return {U, V};
}

struct SurfaceSample {
  Point2 at{};
  Vec3 r{}, n{};
  double w1 = 0, w2 = 0;
  HexSphere U, V;
};

// envelope point of the two curvature spheres; the normal is left
// unnormalized so |n| = 1 acts as a consistency certificate
inline SurfaceSample envelope_reconstruct(const HexSphere& U, const HexSphere& V) {
  const auto cu = hex_normalize(U);
  const auto cv = hex_normalize(V);
  if (std::abs(cu.radius - cv.radius) <= kEpsUmbilic)
    throw UmbilicDegeneracy("envelope: curvature spheres coincide");
  SurfaceSample s;
  s.U = U;
  s.V = V;
  s.w1 = cu.radius;
  s.w2 = cv.radius;
  s.n = (1.0 / (s.w2 - s.w1)) * (cu.center - cv.center);
  s.r = cu.center + s.w1 * s.n;
  return s;
}

// ---------------------------------------------------------------------------
// Orthogonality of the sphere congruences over a frame grid

struct CongruenceReport {
  // (U,U), (V,V), then the 3x3 block {U, d2 U, d2^2 U} x {V, d1 V, d1^2 V}
  std::array<double, 11> residual{};
  // canal only: max component of d2 V (the V-sphere is then R2-independent)
  double canal_dv2 = std::numeric_limits<double>::quiet_NaN();

  double worst() const {
    double w = 0;
    for (double r : residual) w = std::max(w, r);
    return w;
  }
};

namespace detail {

struct HexGrids {
  std::array<RGrid, 6> u, v;
};

inline HexGrids sphere_component_grids(const Grid<algebra::Mat4>& frames) {
  HexGrids out;
  for (int c = 0; c < 6; ++c) {
    out.u[static_cast<size_t>(c)] = RGrid(frames.g);
    out.v[static_cast<size_t>(c)] = RGrid(frames.g);
  }
  for (int j = 0; j < frames.g.n2; ++j)
    for (int i = 0; i < frames.g.n1; ++i) {
      const auto F = frame::FrameState::from_rows({frames.g.r1(i), frames.g.r2(j)},
                                                  frames.at(i, j));
      const auto [U, V] = curvature_spheres(F);
      for (int c = 0; c < 6; ++c) {
        out.u[static_cast<size_t>(c)].at(i, j) = U[c];
        out.v[static_cast<size_t>(c)].at(i, j) = V[c];
      }
    }
  return out;
}

inline HexSphere eval_d2(const std::array<RGrid, 6>& comp, int order, int i, int j) {
  HexSphere h;
  for (int c = 0; c < 6; ++c) h[c] = fd::axis2(comp[static_cast<size_t>(c)], order, i, j);
  return h;
}

inline HexSphere eval_d1(const std::array<RGrid, 6>& comp, int order, int i, int j) {
  HexSphere h;
  for (int c = 0; c < 6; ++c) h[c] = fd::axis1(comp[static_cast<size_t>(c)], order, i, j);
  return h;
}

}  // namespace detail

// max residuals of the eleven products that vanish for an isothermic sphere
// congruence: the two norms and the 3x3 orthogonality block
inline CongruenceReport theorem1_check(const PotentialField& P,
                                       const Grid<algebra::Mat4>& frames) {
  const GridSpec& g = frames.g;
  if (g.n1 < 5 || g.n2 < 5) throw StencilOutOfDomain("congruence check: grid too small");
  const auto grids = detail::sphere_component_grids(frames);
  CongruenceReport rep;
  double dv2 = 0;
  for (int j = 2; j < g.n2 - 2; ++j)
    for (int i = 2; i < g.n1 - 2; ++i) {
      const std::array<HexSphere, 3> us = {detail::eval_d2(grids.u, 0, i, j),
                                           detail::eval_d2(grids.u, 1, i, j),
                                           detail::eval_d2(grids.u, 2, i, j)};
      const std::array<HexSphere, 3> vs = {detail::eval_d1(grids.v, 0, i, j),
                                           detail::eval_d1(grids.v, 1, i, j),
                                           detail::eval_d1(grids.v, 2, i, j)};
      rep.residual[0] = std::max(rep.residual[0], std::abs(lie_product(us[0], us[0])));
      rep.residual[1] = std::max(rep.residual[1], std::abs(lie_product(vs[0], vs[0])));
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          const size_t slot = static_cast<size_t>(2 + 3 * a + b);
          rep.residual[slot] =
              std::max(rep.residual[slot], std::abs(lie_product(us[static_cast<size_t>(a)],
                                                                vs[static_cast<size_t>(b)])));
        }
      if (P.canal) {
        const HexSphere dv = detail::eval_d2(grids.v, 1, i, j);
        for (int c = 0; c < 6; ++c) dv2 = std::max(dv2, std::abs(dv[c]));
      }
    }
  if (P.canal) rep.canal_dv2 = dv2;
  return rep;
}

// ---------------------------------------------------------------------------
// Grid reconstruction

enum class SampleStatus : std::uint8_t { ok = 0, plane = 1, umbilic = 2 };

struct SurfaceGrid {
  Grid<SurfaceSample> samples;
  Grid<SampleStatus> status;
  int degenerate = 0;
};

inline SurfaceGrid reconstruct_grid(const Grid<algebra::Mat4>& frames) {
  SurfaceGrid out;
  out.samples = Grid<SurfaceSample>(frames.g);
  out.status = Grid<SampleStatus>(frames.g);
  for (int j = 0; j < frames.g.n2; ++j)
    for (int i = 0; i < frames.g.n1; ++i) {
      const Point2 at{frames.g.r1(i), frames.g.r2(j)};
      const auto F = frame::FrameState::from_rows(at, frames.at(i, j));
      const auto [U, V] = curvature_spheres(F);
      try {
        auto s = envelope_reconstruct(U, V);
        s.at = at;
        out.samples.at(i, j) = s;
        out.status.at(i, j) = SampleStatus::ok;
      } catch (const PlaneAtInfinity&) {
        out.status.at(i, j) = SampleStatus::plane;
        ++out.degenerate;
      } catch (const UmbilicDegeneracy&) {
        out.status.at(i, j) = SampleStatus::umbilic;
        ++out.degenerate;
      }
    }
  return out;
}

}  // namespace liesphere::surface
