#pragma once
// Pseudo-Hermitian linear algebra on C^4 of signature (2,2), its exterior
// square, and the hexaspherical component form of bivectors.
//
// Frozen conventions:
//   C^4 vectors   a = (a0, a1, a2, a3), products conjugate-linear in the
//                 second argument:  (a,b) = -a0 conj(b3) + a1 conj(b2)
//                                          + a2 conj(b1) - a3 conj(b0)
//   bivectors     y = (y0,...,y5) with  y0 = (p02 - p31)/2,
//                 y1 = (p02 + p31)/2, y2 = (p03 + p12)/2,
//                 y3 = (p03 - p12)/(2i), y4 = (p01 - p23)/(2i),
//                 y5 = (p01 + p23)/(2i), where p_ij = a_i b_j - a_j b_i.
//   signature     (y,y) form is (-,+,+,+,+,-): four plus between two minus.
//
// Conjugation of a bivector is componentwise in the y coordinates (that is
// the convention every reality statement in the library relies on). Note the
// wedge map does NOT commute with argument conjugation on y3..y5.

#include <array>
#include <cmath>
#include <complex>

#include "liesphere/core.hpp"

namespace liesphere::algebra {

using liesphere::cd;

struct TwistorVector {
  std::array<cd, 4> c{};

  cd& operator[](int i) { return c[static_cast<size_t>(i)]; }
  const cd& operator[](int i) const { return c[static_cast<size_t>(i)]; }

  TwistorVector operator+(const TwistorVector& o) const {
    return {{c[0] + o.c[0], c[1] + o.c[1], c[2] + o.c[2], c[3] + o.c[3]}};
  }
  TwistorVector operator-(const TwistorVector& o) const {
    return {{c[0] - o.c[0], c[1] - o.c[1], c[2] - o.c[2], c[3] - o.c[3]}};
  }
  TwistorVector operator*(cd s) const { return {{c[0] * s, c[1] * s, c[2] * s, c[3] * s}}; }
  TwistorVector operator-() const { return {{-c[0], -c[1], -c[2], -c[3]}}; }

  static TwistorVector unit(int i) {
    TwistorVector e;
    e[i] = 1;
    return e;
  }
};

inline TwistorVector operator*(cd s, const TwistorVector& v) { return v * s; }

inline TwistorVector conj(const TwistorVector& v) {
  return {{std::conj(v[0]), std::conj(v[1]), std::conj(v[2]), std::conj(v[3])}};
}

inline double max_abs(const TwistorVector& v) {
  double m = 0;
  for (const cd& z : v.c) m = std::max(m, std::abs(z));
  return m;
}

// (a,b) = -a0 conj(b3) + a1 conj(b2) + a2 conj(b1) - a3 conj(b0)
inline cd herm_product4(const TwistorVector& a, const TwistorVector& b) {
  return -a[0] * std::conj(b[3]) + a[1] * std::conj(b[2]) + a[2] * std::conj(b[1]) -
         a[3] * std::conj(b[0]);
}

struct Mat4 {
  std::array<std::array<cd, 4>, 4> m{};

  std::array<cd, 4>& operator[](int i) { return m[static_cast<size_t>(i)]; }
  const std::array<cd, 4>& operator[](int i) const { return m[static_cast<size_t>(i)]; }

  static Mat4 identity() {
    Mat4 r;
    for (int i = 0; i < 4; ++i) r[i][i] = 1;
    return r;
  }

  Mat4 operator+(const Mat4& o) const {
    Mat4 r;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) r[i][j] = m[i][j] + o[i][j];
    return r;
  }
  Mat4 operator-(const Mat4& o) const {
    Mat4 r;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) r[i][j] = m[i][j] - o[i][j];
    return r;
  }
  Mat4 operator*(const Mat4& o) const {
    Mat4 r;
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < 4; ++k) {
        const cd a = m[i][k];
        if (a == cd{}) continue;
        for (int j = 0; j < 4; ++j) r[i][j] += a * o[k][j];
      }
    return r;
  }
  Mat4 operator*(cd s) const {
    Mat4 r;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) r[i][j] = m[i][j] * s;
    return r;
  }
  cd trace() const { return m[0][0] + m[1][1] + m[2][2] + m[3][3]; }
  Mat4 adjoint() const {
    Mat4 r;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) r[i][j] = std::conj(m[j][i]);
    return r;
  }
};

inline Mat4 operator*(cd s, const Mat4& a) { return a * s; }
inline Mat4 operator*(double s, const Mat4& a) { return a * cd(s, 0); }

inline double max_abs(const Mat4& a) {
  double m = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m = std::max(m, std::abs(a[i][j]));
  return m;
}

// Gram matrix of the (2,2) form: (a,b) = sum_ij a_i J_ij conj(b_j)
inline Mat4 herm4_gram() {
  Mat4 j;
  j[0][3] = -1;
  j[1][2] = 1;
  j[2][1] = 1;
  j[3][0] = -1;
  return j;
}

// det of the 4x4 matrix with rows a,b,c,d via the two-row Laplace expansion
inline cd det4(const TwistorVector& a, const TwistorVector& b, const TwistorVector& c,
               const TwistorVector& d) {
  auto p = [&](const TwistorVector& u, const TwistorVector& v, int i, int j) {
    return u[i] * v[j] - u[j] * v[i];
  };
  return p(a, b, 0, 1) * p(c, d, 2, 3) - p(a, b, 0, 2) * p(c, d, 1, 3) +
         p(a, b, 0, 3) * p(c, d, 1, 2) + p(a, b, 1, 2) * p(c, d, 0, 3) -
         p(a, b, 1, 3) * p(c, d, 0, 2) + p(a, b, 2, 3) * p(c, d, 0, 1);
}

struct Bivector6 {
  std::array<cd, 6> y{};

  cd& operator[](int i) { return y[static_cast<size_t>(i)]; }
  const cd& operator[](int i) const { return y[static_cast<size_t>(i)]; }

  Bivector6 operator+(const Bivector6& o) const {
    Bivector6 r;
    for (int i = 0; i < 6; ++i) r[i] = y[i] + o.y[i];
    return r;
  }
  Bivector6 operator-(const Bivector6& o) const {
    Bivector6 r;
    for (int i = 0; i < 6; ++i) r[i] = y[i] - o.y[i];
    return r;
  }
  Bivector6 operator*(cd s) const {
    Bivector6 r;
    for (int i = 0; i < 6; ++i) r[i] = y[i] * s;
    return r;
  }

  double max_imag() const {
    double m = 0;
    for (const cd& z : y) m = std::max(m, std::abs(z.imag()));
    return m;
  }
  bool is_real(double eps = kEpsReal) const { return max_imag() <= eps; }
};

inline Bivector6 operator*(cd s, const Bivector6& b) { return b * s; }

inline Bivector6 conj(const Bivector6& b) {
  Bivector6 r;
  for (int i = 0; i < 6; ++i) r[i] = std::conj(b[i]);
  return r;
}

inline double max_abs(const Bivector6& b) {
  double m = 0;
  for (const cd& z : b.y) m = std::max(m, std::abs(z));
  return m;
}

inline Bivector6 wedge_to_hex(const TwistorVector& a, const TwistorVector& b) {
  auto p = [&](int i, int j) { return a[i] * b[j] - a[j] * b[i]; };
  const cd p01 = p(0, 1), p02 = p(0, 2), p03 = p(0, 3);
  const cd p12 = p(1, 2), p23 = p(2, 3), p31 = p(3, 1);
  const cd half(0.5, 0.0);
  const cd half_over_i(0.0, -0.5);  // 1/(2i)
  Bivector6 r;
  r[0] = (p02 - p31) * half;
  r[1] = (p02 + p31) * half;
  r[2] = (p03 + p12) * half;
  r[3] = (p03 - p12) * half_over_i;
  r[4] = (p01 - p23) * half_over_i;
  r[5] = (p01 + p23) * half_over_i;
  return r;
}

// (x,Y) = -x0 conj(Y0) + x1 conj(Y1) + x2 conj(Y2) + x3 conj(Y3)
//         + x4 conj(Y4) - x5 conj(Y5)
inline cd herm_product6(const Bivector6& x, const Bivector6& Y) {
  return -x[0] * std::conj(Y[0]) + x[1] * std::conj(Y[1]) + x[2] * std::conj(Y[2]) +
         x[3] * std::conj(Y[3]) + x[4] * std::conj(Y[4]) - x[5] * std::conj(Y[5]);
}

// bilinear companion {x,Y}; for decomposables {a^b, A^B} = det(a,b,A,B)/2,
// and (x,Y) = {x, conj(Y)}
inline cd complex_product6(const Bivector6& x, const Bivector6& Y) {
  return -x[0] * Y[0] + x[1] * Y[1] + x[2] * Y[2] + x[3] * Y[3] + x[4] * Y[4] - x[5] * Y[5];
}

}  // namespace liesphere::algebra
