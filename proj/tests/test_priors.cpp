#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hotcs/priors.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace hotcs;

namespace {

double unitarity_defect(const PriorTransform& p) {
  CMatrix gram = p.matrix().adjoint() * p.matrix();
  gram -= CMatrix::Identity(p.dim(), p.dim());
  return gram.cwiseAbs().maxCoeff();
}

CVector ramp(Index n) {
  CVector x(n);
  for (Index i = 0; i < n; ++i) {
    x[i] = Complex(std::sin(0.7 * static_cast<double>(i) + 0.3),
                   std::cos(1.3 * static_cast<double>(i)));
  }
  return x;
}

}  // namespace

TEST_CASE("every prior kind is unitary across sizes") {
  for (Index n : {2, 4, 8, 16, 64, 128}) {
    CAPTURE(n);
    CHECK(unitarity_defect(PriorTransform::identity(n)) <= 1e-10);
    CHECK(unitarity_defect(PriorTransform::dft(n)) <= 1e-10);
    CHECK(unitarity_defect(PriorTransform::dct2(n)) <= 1e-10);
    CHECK(unitarity_defect(PriorTransform::haar(n)) <= 1e-10);
  }
}

TEST_CASE("identity does nothing") {
  auto p = PriorTransform::identity(5);
  CVector x = ramp(5);
  CHECK((p.synthesize(x) - x).norm() == 0.0);
  CHECK((p.analyze(x) - x).norm() == 0.0);
  CHECK(p.is_real());
}

TEST_CASE("DFT matches the direct-summation oracle") {
  for (Index n : {3, 8, 64}) {
    CAPTURE(n);
    auto p = PriorTransform::dft(n);
    CMatrix want = oracle::dft_matrix(n);
    CHECK((p.matrix() - want).cwiseAbs().maxCoeff() < 1e-10);

    CVector x = ramp(n);
    CVector got = p.analyze(x);
    CVector ref = oracle::dense_adjoint_matvec(want, x);
    CHECK((got - ref).norm() < 1e-10);
  }
}

TEST_CASE("DFT(2) has the closed form") {
  auto p = PriorTransform::dft(2);
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(p.matrix()(0, 0) - Complex(s, 0.0)) < 1e-15);
  CHECK(std::abs(p.matrix()(0, 1) - Complex(s, 0.0)) < 1e-15);
  CHECK(std::abs(p.matrix()(1, 0) - Complex(s, 0.0)) < 1e-15);
  CHECK(std::abs(p.matrix()(1, 1) - Complex(-s, 0.0)) < 1e-13);
  CHECK_FALSE(p.is_real());  // kind is complex even when N=2 happens to be real
}

TEST_CASE("DFT analyze sends the all-ones vector to √N e_1") {
  for (Index n : {4, 16, 64}) {
    CAPTURE(n);
    auto p = PriorTransform::dft(n);
    CVector ones = CVector::Ones(n);
    CVector w = p.analyze(ones);
    CHECK(std::abs(w[0] - std::sqrt(static_cast<double>(n))) < 1e-12);
    CHECK(w.tail(n - 1).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("DCT2 matches the direct-summation oracle and the N=2 closed form") {
  auto p = PriorTransform::dct2(8);
  CVector x = ramp(8).real().cast<Complex>();
  CHECK((p.analyze(x) - oracle::dct2_analyze(x)).norm() < 1e-12);
  CHECK(p.is_real());

  auto p2 = PriorTransform::dct2(2);
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(p2.matrix()(0, 0).real() - s) < 1e-15);
  CHECK(std::abs(p2.matrix()(0, 1).real() - s) < 1e-15);
  CHECK(std::abs(p2.matrix()(1, 0).real() - s) < 1e-15);
  CHECK(std::abs(p2.matrix()(1, 1).real() + s) < 1e-15);
}

TEST_CASE("DCT2 analyze also concentrates the constant vector") {
  auto p = PriorTransform::dct2(16);
  CVector w = p.analyze(CVector::Ones(16));
  CHECK(std::abs(w[0] - 4.0) < 1e-12);
  CHECK(w.tail(15).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("single-level Haar matches the hand-built 4x4 matrix") {
  auto p = PriorTransform::haar(4, 1);
  CMatrix a = oracle::haar4_single_level();
  CHECK((p.matrix() - a.adjoint()).cwiseAbs().maxCoeff() < 1e-15);

  CVector x(4);
  x << 1.0, 1.0, -1.0, -1.0;
  CVector w = p.analyze(x);
  CHECK(std::abs(w[0] - std::sqrt(2.0)) < 1e-14);
  CHECK(std::abs(w[1] + std::sqrt(2.0)) < 1e-14);
  CHECK(std::abs(w[2]) < 1e-14);
  CHECK(std::abs(w[3]) < 1e-14);
}

TEST_CASE("full-depth Haar concentrates a constant vector at dyadic N") {
  for (Index n : {8, 64, 128}) {
    CAPTURE(n);
    auto p = PriorTransform::haar(n);
    CVector w = p.analyze(CVector::Ones(n));
    const double gamma = w.cwiseAbs2().maxCoeff() / w.squaredNorm();
    CHECK(gamma == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("Haar default depth is the largest dyadic level") {
  CHECK(PriorTransform::haar(8).levels() == 3);
  CHECK(PriorTransform::haar(96).levels() == 5);  // 96 = 3·32
  CHECK(PriorTransform::haar(8, 2).levels() == 2);
}

TEST_CASE("Haar rejects impossible level counts") {
  CHECK_THROWS_AS(PriorTransform::haar(8, 4), std::invalid_argument);
  CHECK_THROWS_AS(PriorTransform::haar(6, 2), std::invalid_argument);
  CHECK_THROWS_AS(PriorTransform::haar(7), std::invalid_argument);
  CHECK_THROWS_AS(PriorTransform::haar(4, -1), std::invalid_argument);
}

TEST_CASE("analyze inverts synthesize for every kind") {
  CVector w = ramp(16);
  for (auto p : {PriorTransform::identity(16), PriorTransform::dft(16),
                 PriorTransform::dct2(16), PriorTransform::haar(16)}) {
    CAPTURE(to_string(p.kind()));
    CVector x = p.synthesize(w);
    CHECK(x.norm() == doctest::Approx(w.norm()).epsilon(1e-12));
    CHECK((p.analyze(x) - w).norm() < 1e-12 * w.norm());
  }
}

TEST_CASE("custom matrices are checked for unitarity") {
  CMatrix u = PriorTransform::dft(6).matrix();
  auto p = PriorTransform::custom(u);
  CHECK(p.kind() == PriorKind::Custom);
  CHECK((p.matrix() - u).norm() == 0.0);

  CMatrix bad = u;
  bad(0, 0) += Complex(1e-3, 0.0);
  CHECK_THROWS_AS(PriorTransform::custom(bad), std::invalid_argument);
  CHECK_THROWS_AS(PriorTransform::custom(CMatrix::Zero(3, 2)), std::invalid_argument);
}

TEST_CASE("dimension mismatches throw") {
  auto p = PriorTransform::dft(4);
  CHECK_THROWS_AS(p.synthesize(CVector(3)), std::invalid_argument);
  CHECK_THROWS_AS(p.analyze(CVector(5)), std::invalid_argument);
  CHECK_THROWS_AS(PriorTransform::identity(0), std::invalid_argument);
}

TEST_CASE("kind names round-trip") {
  for (auto k : {PriorKind::Identity, PriorKind::Dft, PriorKind::Dct2, PriorKind::Haar,
                 PriorKind::Custom}) {
    CHECK(prior_kind_from_string(to_string(k)) == k);
  }
  CHECK_THROWS_AS(prior_kind_from_string("wavelet"), std::invalid_argument);
}
