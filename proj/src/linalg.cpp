#include "hotcs/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace hotcs {

bool all_finite(const CVector& a) {
  for (Index i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a[i].real()) || !std::isfinite(a[i].imag())) return false;
  }
  return true;
}

bool all_finite(const CMatrix& a) {
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) return false;
    }
  }
  return true;
}

HouseholderFactor make_householder(CVector v, std::vector<Index> support) {
  const Index n = v.size();
  if (n == 0) throw std::invalid_argument("householder: empty vector");
  if (!all_finite(v)) throw std::invalid_argument("householder: non-finite entries");
  if (support.empty()) throw std::invalid_argument("householder: empty support");
  std::sort(support.begin(), support.end());
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (support[i] < 0 || support[i] >= n) {
      throw std::invalid_argument("householder: support index out of range");
    }
    if (i > 0 && support[i] == support[i - 1]) {
      throw std::invalid_argument("householder: duplicate support index");
    }
  }
  // Off-support entries must be zero; clamp exact zeros rather than trusting
  // the caller, but reject anything material.
  std::size_t k = 0;
  for (Index i = 0; i < n; ++i) {
    if (k < support.size() && support[k] == i) {
      ++k;
      continue;
    }
    if (std::abs(v[i]) > tol::kUnitNorm) {
      throw std::invalid_argument("householder: nonzero entry outside support");
    }
    v[i] = Complex(0.0, 0.0);
  }
  const double norm = v.norm();
  if (std::abs(norm - 1.0) > tol::kUnitNorm) {
    throw std::invalid_argument("householder: vector is not unit norm");
  }
  return HouseholderFactor{std::move(v), std::move(support)};
}

HouseholderFactor make_householder(CVector v) {
  std::vector<Index> support(static_cast<std::size_t>(v.size()));
  for (Index i = 0; i < v.size(); ++i) support[static_cast<std::size_t>(i)] = i;
  return make_householder(std::move(v), std::move(support));
}

CVector householder_apply(const HouseholderFactor& h, const CVector& a) {
  if (a.size() != h.v.size()) throw std::invalid_argument("householder_apply: size mismatch");
  // Eigen's dot conjugates the left argument, so this is vᴴa.
  const Complex proj = h.v.dot(a);
  return a - 2.0 * proj * h.v;
}

CMatrix householder_apply_matrix(const HouseholderFactor& h, const CMatrix& a, Side side) {
  if (side == Side::Left) {
    if (a.rows() != h.v.size()) {
      throw std::invalid_argument("householder_apply_matrix: size mismatch");
    }
    // (I − 2vvᴴ)A = A − 2v(vᴴA)
    CMatrix out = a;
    Eigen::RowVectorXcd proj = h.v.adjoint() * a;
    out.noalias() -= 2.0 * h.v * proj;
    return out;
  }
  if (a.cols() != h.v.size()) {
    throw std::invalid_argument("householder_apply_matrix: size mismatch");
  }
  // A(I − 2vvᴴ) = A − 2(Av)vᴴ
  CMatrix out = a;
  CVector proj = a * h.v;
  out.noalias() -= 2.0 * proj * h.v.adjoint();
  return out;
}

CVector adjoint_apply(const CMatrix& a, const CVector& x) {
  if (a.rows() != x.size()) throw std::invalid_argument("adjoint_apply: size mismatch");
  return a.adjoint() * x;
}

CMatrix householder_to_matrix(const HouseholderFactor& h) {
  const Index n = h.v.size();
  CMatrix out = CMatrix::Identity(n, n);
  out.noalias() -= 2.0 * h.v * h.v.adjoint();
  return out;
}

}  // namespace hotcs
