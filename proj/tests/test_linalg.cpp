#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hotcs/linalg.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace hotcs;

namespace {

CVector unit(std::initializer_list<Complex> entries) {
  CVector v(static_cast<Index>(entries.size()));
  Index i = 0;
  for (const auto& e : entries) v[i++] = e;
  return v / v.norm();
}

}  // namespace

TEST_CASE("make_householder accepts a unit vector and full support") {
  CVector v = unit({{1.0, 0.0}, {2.0, -1.0}, {0.0, 3.0}});
  auto h = make_householder(v);
  CHECK(h.support.size() == 3);
  CHECK(h.v.isApprox(v));
}

TEST_CASE("make_householder rejects bad input") {
  CVector v(3);
  v << Complex(1.0, 0.0), Complex(0.0, 0.0), Complex(0.0, 0.0);

  SUBCASE("non-unit norm") {
    CHECK_THROWS_AS(make_householder(2.0 * v), std::invalid_argument);
  }
  SUBCASE("empty vector") {
    CHECK_THROWS_AS(make_householder(CVector(0)), std::invalid_argument);
  }
  SUBCASE("support out of range") {
    CHECK_THROWS_AS(make_householder(v, {0, 3}), std::invalid_argument);
  }
  SUBCASE("duplicate support") {
    CHECK_THROWS_AS(make_householder(v, {0, 0}), std::invalid_argument);
  }
  SUBCASE("empty support") {
    CHECK_THROWS_AS(make_householder(v, {}), std::invalid_argument);
  }
  SUBCASE("mass outside support") {
    CVector w = unit({{1.0, 0.0}, {1.0, 0.0}, {0.0, 0.0}});
    CHECK_THROWS_AS(make_householder(w, {0}), std::invalid_argument);
  }
  SUBCASE("non-finite entry") {
    CVector w = v;
    w[1] = Complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
    CHECK_THROWS_AS(make_householder(w), std::invalid_argument);
  }
}

TEST_CASE("householder_apply matches the dense oracle") {
  CVector v = unit({{0.3, 0.1}, {-0.2, 0.5}, {1.0, 0.0}, {0.0, -0.7}});
  auto h = make_householder(v);
  CMatrix dense = oracle::dense_householder(v);

  CVector a(4);
  a << Complex(1.0, 2.0), Complex(-0.5, 0.0), Complex(0.0, 1.5), Complex(3.0, -1.0);

  CVector got = householder_apply(h, a);
  CVector want = oracle::dense_matvec(dense, a);
  CHECK((got - want).norm() < 1e-12);
}

TEST_CASE("householder reflection is involutive and unitary") {
  CVector v = unit({{0.3, 0.1}, {-0.2, 0.5}, {1.0, 0.0}, {0.0, -0.7}});
  auto h = make_householder(v);

  CVector a(4);
  a << Complex(1.0, 2.0), Complex(-0.5, 0.0), Complex(0.0, 1.5), Complex(3.0, -1.0);

  CVector twice = householder_apply(h, householder_apply(h, a));
  CHECK((twice - a).norm() < 1e-12);
  CHECK(householder_apply(h, a).norm() == doctest::Approx(a.norm()).epsilon(1e-12));
}

TEST_CASE("partial support fixes off-support coordinates") {
  CVector v = CVector::Zero(5);
  v[1] = Complex(1.0, 0.0);
  v[3] = Complex(0.0, 1.0);
  v /= v.norm();
  auto h = make_householder(v, {1, 3});

  CVector a(5);
  a << Complex(1.0, 0.0), Complex(2.0, 0.0), Complex(3.0, 0.0), Complex(4.0, 0.0),
      Complex(5.0, 0.0);
  CVector out = householder_apply(h, a);
  CHECK(out[0] == a[0]);
  CHECK(out[2] == a[2]);
  CHECK(out[4] == a[4]);
  CHECK(std::abs(out[1] - a[1]) + std::abs(out[3] - a[3]) > 0.1);
}

TEST_CASE("householder_apply_matrix agrees with dense products on both sides") {
  CVector v = unit({{1.0, -1.0}, {0.5, 0.5}, {-0.25, 2.0}});
  auto h = make_householder(v);
  CMatrix dense = oracle::dense_householder(v);

  CMatrix a(3, 4);
  for (Index i = 0; i < 3; ++i) {
    for (Index j = 0; j < 4; ++j) {
      a(i, j) = Complex(static_cast<double>(i) - 1.0, static_cast<double>(j) * 0.5);
    }
  }

  CMatrix left = householder_apply_matrix(h, a, Side::Left);
  CHECK((left - dense * a).norm() < 1e-12);

  CMatrix b = a.transpose();
  CMatrix right = householder_apply_matrix(h, b, Side::Right);
  CHECK((right - b * dense).norm() < 1e-12);
}

TEST_CASE("householder_to_matrix matches the loop oracle") {
  CVector v = unit({{0.1, 0.9}, {2.0, 0.0}, {-1.0, 1.0}, {0.0, 0.0}});
  auto h = make_householder(v);
  CHECK((householder_to_matrix(h) - oracle::dense_householder(v)).norm() < 1e-12);
}

TEST_CASE("adjoint_apply is Aᴴx") {
  CMatrix a(3, 2);
  a << Complex(1.0, 1.0), Complex(0.0, -2.0), Complex(2.0, 0.0), Complex(1.0, 0.5),
      Complex(-1.0, 0.0), Complex(0.0, 0.0);
  CVector x(3);
  x << Complex(1.0, 0.0), Complex(0.0, 1.0), Complex(2.0, -1.0);

  CVector got = adjoint_apply(a, x);
  CVector want = oracle::dense_adjoint_matvec(a, x);
  CHECK((got - want).norm() < 1e-14);
}

TEST_CASE("size mismatches throw") {
  CVector v = unit({{1.0, 0.0}, {1.0, 0.0}});
  auto h = make_householder(v);
  CHECK_THROWS_AS(householder_apply(h, CVector(3)), std::invalid_argument);
  CHECK_THROWS_AS(householder_apply_matrix(h, CMatrix(3, 2), Side::Left),
                  std::invalid_argument);
  CHECK_THROWS_AS(householder_apply_matrix(h, CMatrix(2, 3), Side::Right),
                  std::invalid_argument);
  CHECK_THROWS_AS(adjoint_apply(CMatrix(3, 2), CVector(2)), std::invalid_argument);
}
