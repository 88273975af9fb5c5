#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <random>

#include "liesphere/algebra.hpp"

using namespace liesphere::algebra;
using liesphere::cd;

namespace {

std::mt19937 rng(20240907);

cd rand_c() {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return {u(rng), u(rng)};
}

TwistorVector rand_vec() {
  TwistorVector v;
  for (int i = 0; i < 4; ++i) v[i] = rand_c();
  return v;
}

// independent determinant oracle: cofactor expansion along the first row
cd det3(const cd m[3][3]) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

cd det4_cofactor(const TwistorVector& a, const TwistorVector& b, const TwistorVector& c,
                 const TwistorVector& d) {
  const TwistorVector rows[4] = {a, b, c, d};
  cd acc = 0;
  for (int k = 0; k < 4; ++k) {
    cd minor[3][3];
    for (int r = 1; r < 4; ++r) {
      int cc = 0;
      for (int col = 0; col < 4; ++col) {
        if (col == k) continue;
        minor[r - 1][cc++] = rows[r][col];
      }
    }
    acc += ((k % 2) ? -1.0 : 1.0) * rows[0][k] * det3(minor);
  }
  return acc;
}

}  // namespace

TEST_CASE("indefinite product has the documented Gram matrix and symmetry") {
  auto J = herm4_gram();
  for (int trial = 0; trial < 10; ++trial) {
    auto a = rand_vec(), b = rand_vec();
    cd via_gram = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) via_gram += a[i] * J[i][j] * std::conj(b[j]);
    auto p = herm_product4(a, b);
    CHECK(std::abs(p - via_gram) < 1e-14);
    CHECK(std::abs(p - std::conj(herm_product4(b, a))) < 1e-14);
  }
  // J is an involution: applying the pairing twice is the identity
  auto J2 = J * J;
  CHECK(max_abs(J2 - Mat4::identity()) < 1e-15);
  CHECK(std::abs(J.trace()) < 1e-15);
}

TEST_CASE("signature of the pairing is (2,2)") {
  // diagonalizing combinations of the null basis vectors
  auto e0 = TwistorVector::unit(0), e1 = TwistorVector::unit(1);
  auto e2 = TwistorVector::unit(2), e3 = TwistorVector::unit(3);
  CHECK(herm_product4(e0 + e3, e0 + e3).real() == Catch::Approx(-2.0));
  CHECK(herm_product4(e0 - e3, e0 - e3).real() == Catch::Approx(2.0));
  CHECK(herm_product4(e1 + e2, e1 + e2).real() == Catch::Approx(2.0));
  CHECK(herm_product4(e1 - e2, e1 - e2).real() == Catch::Approx(-2.0));
  // the four are pairwise orthogonal
  CHECK(std::abs(herm_product4(e0 + e3, e0 - e3)) < 1e-15);
  CHECK(std::abs(herm_product4(e0 + e3, e1 + e2)) < 1e-15);
  CHECK(std::abs(herm_product4(e1 + e2, e1 - e2)) < 1e-15);
}

TEST_CASE("two-row Laplace determinant matches cofactor expansion") {
  for (int trial = 0; trial < 20; ++trial) {
    auto a = rand_vec(), b = rand_vec(), c = rand_vec(), d = rand_vec();
    auto lhs = det4(a, b, c, d);
    auto rhs = det4_cofactor(a, b, c, d);
    CHECK(std::abs(lhs - rhs) < 1e-13);
  }
  auto e0 = TwistorVector::unit(0), e1 = TwistorVector::unit(1);
  auto e2 = TwistorVector::unit(2), e3 = TwistorVector::unit(3);
  CHECK(std::abs(det4(e0, e1, e2, e3) - cd(1, 0)) < 1e-15);
  CHECK(std::abs(det4(e1, e0, e2, e3) + cd(1, 0)) < 1e-15);
}

TEST_CASE("wedge components of the null basis") {
  auto e0 = TwistorVector::unit(0), e1 = TwistorVector::unit(1);
  auto e2 = TwistorVector::unit(2), e3 = TwistorVector::unit(3);
  auto w01 = wedge_to_hex(e0, e1);
  const cd mihalf(0, -0.5);
  CHECK(std::abs(w01[4] - mihalf) < 1e-15);
  CHECK(std::abs(w01[5] - mihalf) < 1e-15);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(w01[i]) < 1e-15);
  auto w02 = wedge_to_hex(e0, e2);
  CHECK(std::abs(w02[0] - cd(0.5, 0)) < 1e-15);
  CHECK(std::abs(w02[1] - cd(0.5, 0)) < 1e-15);
  auto w23 = wedge_to_hex(e2, e3);
  CHECK(std::abs(w23[4] - cd(0, 0.5)) < 1e-15);
  CHECK(std::abs(w23[5] - mihalf) < 1e-15);
}

TEST_CASE("wedge is bilinear and alternating") {
  auto a = rand_vec(), b = rand_vec();
  cd s = rand_c();
  auto swap = wedge_to_hex(b, a) + wedge_to_hex(a, b);
  CHECK(max_abs(swap) < 1e-14);
  auto self = wedge_to_hex(a, a);
  CHECK(max_abs(self) < 1e-14);
  auto lin = wedge_to_hex(a * s, b) - s * wedge_to_hex(a, b);
  CHECK(max_abs(lin) < 1e-13);
}

TEST_CASE("decomposable bivectors are null for the bilinear product") {
  for (int trial = 0; trial < 10; ++trial) {
    auto a = rand_vec(), b = rand_vec();
    auto w = wedge_to_hex(a, b);
    CHECK(std::abs(complex_product6(w, w)) < 1e-13);
  }
}

TEST_CASE("bilinear product of decomposables is half the determinant") {
  for (int trial = 0; trial < 10; ++trial) {
    auto a = rand_vec(), b = rand_vec(), A = rand_vec(), B = rand_vec();
    auto lhs = complex_product6(wedge_to_hex(a, b), wedge_to_hex(A, B));
    auto rhs = 0.5 * det4(a, b, A, B);
    CHECK(std::abs(lhs - rhs) < 1e-13);
  }
}

TEST_CASE("sesquilinear product of decomposables factors through the pairing") {
  for (int trial = 0; trial < 10; ++trial) {
    auto a = rand_vec(), b = rand_vec(), A = rand_vec(), B = rand_vec();
    auto lhs = herm_product6(wedge_to_hex(a, b), wedge_to_hex(A, B));
    auto rhs = 0.5 * (herm_product4(a, B) * herm_product4(b, A) -
                      herm_product4(a, A) * herm_product4(b, B));
    CHECK(std::abs(lhs - rhs) < 1e-13);
  }
}

TEST_CASE("sesquilinear product is the bilinear product of the conjugate") {
  for (int trial = 0; trial < 10; ++trial) {
    auto x = wedge_to_hex(rand_vec(), rand_vec());
    auto Y = wedge_to_hex(rand_vec(), rand_vec());
    CHECK(std::abs(herm_product6(x, Y) - complex_product6(x, conj(Y))) < 1e-13);
  }
}

TEST_CASE("conjugating both wedge factors flips the last three components") {
  for (int trial = 0; trial < 10; ++trial) {
    auto a = rand_vec(), b = rand_vec();
    auto lhs = wedge_to_hex(conj(a), conj(b));
    auto rhs = conj(wedge_to_hex(a, b));
    for (int i = 3; i < 6; ++i) rhs[i] = -rhs[i];
    CHECK(max_abs(lhs - rhs) < 1e-13);
  }
}

TEST_CASE("reality check uses the componentwise convention") {
  Bivector6 y;
  y[0] = cd(1, 0);
  y[4] = cd(-2, 0);
  CHECK(y.is_real());
  y[3] = cd(0, 1e-6);
  CHECK_FALSE(y.is_real());
  CHECK(y.is_real(1e-5));
}
