#pragma once
// Shared POD types and frozen numeric thresholds.

#include <array>
#include <cmath>
#include <complex>

namespace liesphere {

using cd = std::complex<double>;

// Frozen default tolerances. Config may override the check tolerances,
// never the geometric degeneracy thresholds.
inline constexpr double kEpsReal = 1e-10;     // reality of bivector components
inline constexpr double kEpsPlane = 1e-10;    // |y0+y1| below this: plane, no finite center
inline constexpr double kEpsUmbilic = 1e-8;   // |w1-w2| below this: umbilic point
inline constexpr double kTolDriftPerUnit = 1e-8;
inline constexpr double kTolGcAnalytic = 1e-8;
inline constexpr double kTolGcSampled = 1e-4;
inline constexpr double kTolThmFd = 1e-5;
inline constexpr double kTolThmAnalytic = 1e-9;
inline constexpr double kTolDiracAnalytic = 1e-5;
inline constexpr double kTolDiracSampled = 1e-3;
inline constexpr double kDefaultOdeStep = 1e-3;
inline constexpr double kDefaultGridStep = 1e-2;

struct Vec3 {
  double x = 0, y = 0, z = 0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

struct Point2 {
  double r1 = 0, r2 = 0;
};

struct Rect {
  double r1min = 0, r1max = 1, r2min = 0, r2max = 1;

  double span1() const { return r1max - r1min; }
  double span2() const { return r2max - r2min; }
  bool contains(double r1, double r2, double margin = 0) const {
    return r1 >= r1min - margin && r1 <= r1max + margin && r2 >= r2min - margin &&
           r2 <= r2max + margin;
  }
  bool contains(const Rect& o, double margin = 0) const {
    return o.r1min >= r1min - margin && o.r1max <= r1max + margin &&
           o.r2min >= r2min - margin && o.r2max <= r2max + margin;
  }
  Rect inset(double d) const { return {r1min + d, r1max - d, r2min + d, r2max - d}; }
};

}  // namespace liesphere
