#include "hotcs/metrics.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace hotcs {

DomainComparison domain_compare(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("domain_compare: dimension mismatch");
  }
  if (a.rows() != a.cols()) throw std::invalid_argument("domain_compare: matrices must be square");
  const double bnorm = b.norm();
  if (bnorm == 0.0) throw std::invalid_argument("domain_compare: zero baseline");

  double corr_sum = 0.0;
  for (Index j = 0; j < a.cols(); ++j) {
    const double na = a.col(j).norm();
    const double nb = b.col(j).norm();
    if (na == 0.0 || nb == 0.0) throw std::invalid_argument("domain_compare: zero column");
    corr_sum += std::abs(a.col(j).dot(b.col(j))) / (na * nb);
  }
  return DomainComparison{(a - b).norm() / bnorm, corr_sum / static_cast<double>(a.cols())};
}

double energy_concentration(const CVector& a, Index k) {
  const Index n = a.size();
  if (k < 1 || k > n) throw std::invalid_argument("energy_concentration: K out of range");
  const double total = a.squaredNorm();
  if (total == 0.0) throw std::invalid_argument("energy_concentration: zero vector");

  std::vector<double> mags(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) mags[static_cast<std::size_t>(i)] = std::norm(a[i]);
  std::nth_element(mags.begin(), mags.begin() + (k - 1), mags.end(), std::greater<>());
  double top = 0.0;
  for (Index i = 0; i < k; ++i) top += mags[static_cast<std::size_t>(i)];
  return top / total;
}

double numerical_sparsity_odd(const CVector& a) {
  const double l2 = a.norm();
  if (l2 == 0.0) throw std::invalid_argument("numerical_sparsity_odd: zero vector");
  return a.cwiseAbs().sum() / l2;
}

double signal_correlation(const CVector& r, const CVector& x) {
  if (r.size() != x.size()) throw std::invalid_argument("signal_correlation: size mismatch");
  const double nr = r.norm();
  const double nx = x.norm();
  if (nr == 0.0 || nx == 0.0) throw std::invalid_argument("signal_correlation: zero input");
  return std::abs(r.dot(x)) / (nr * nx);
}

double representational_fidelity(const CMatrix& r, const CVector& x) {
  if (r.rows() != x.size()) {
    throw std::invalid_argument("representational_fidelity: size mismatch");
  }
  if (r.cols() < 1) throw std::invalid_argument("representational_fidelity: empty basis");
  const double nx = x.norm();
  if (nx == 0.0) throw std::invalid_argument("representational_fidelity: zero vector");

  Eigen::JacobiSVD<CMatrix> svd(r);
  const auto& sv = svd.singularValues();
  if (sv[sv.size() - 1] <= tol::kRankRel * sv[0]) {
    throw std::invalid_argument("representational_fidelity: rank-deficient basis");
  }

  // ‖proj_span(R) x‖ via an orthonormal basis; avoids forming (RᴴR)⁻¹.
  Eigen::HouseholderQR<CMatrix> qr(r);
  CMatrix q = qr.householderQ() * CMatrix::Identity(r.rows(), r.cols());
  const double rho = (q.adjoint() * x).norm() / nx;
  return std::min(rho, 1.0);
}

double nmse(const CVector& est, const CVector& truth) {
  if (est.size() != truth.size()) throw std::invalid_argument("nmse: size mismatch");
  const double denom = truth.squaredNorm();
  if (denom == 0.0) throw std::invalid_argument("nmse: zero truth");
  return (est - truth).squaredNorm() / denom;
}

double correlation(const CVector& est, const CVector& truth) {
  if (est.size() != truth.size()) throw std::invalid_argument("correlation: size mismatch");
  const double nt = truth.norm();
  if (nt == 0.0) throw std::invalid_argument("correlation: zero truth");
  const double ne = est.norm();
  if (ne == 0.0) return 0.0;  // failed-recovery convention
  return std::abs(est.dot(truth)) / (ne * nt);
}

TemporalMetrics temporal_metrics(const std::vector<CVector>& ests,
                                 const std::vector<CVector>& truths) {
  if (ests.size() != truths.size()) {
    throw std::invalid_argument("temporal_metrics: length mismatch");
  }
  if (ests.empty()) throw std::invalid_argument("temporal_metrics: empty input");
  double nm = 0.0;
  double co = 0.0;
  for (std::size_t t = 0; t < ests.size(); ++t) {
    nm += nmse(ests[t], truths[t]);
    co += correlation(ests[t], truths[t]);
  }
  const double count = static_cast<double>(ests.size());
  return TemporalMetrics{nm / count, co / count};
}

Index thresholded_l0(const CVector& a) {
  const double gate = tol::kSupportRel * a.norm();
  Index count = 0;
  for (Index i = 0; i < a.size(); ++i) {
    if (std::abs(a[i]) > gate) ++count;
  }
  return count;
}

std::vector<Index> thresholded_support(const CVector& a) {
  const double gate = tol::kSupportRel * a.norm();
  std::vector<Index> out;
  for (Index i = 0; i < a.size(); ++i) {
    if (std::abs(a[i]) > gate) out.push_back(i);
  }
  return out;
}

SparsityProfile sparsity_profile(const CVector& a, Index k) {
  return SparsityProfile{thresholded_l0(a), a.cwiseAbs().sum(), a.norm(),
                         energy_concentration(a, k), numerical_sparsity_odd(a)};
}

double l1_contraction_threshold(Index n, Index k, double odd) {
  if (n < 1 || k < 1 || k > n) throw std::invalid_argument("l1_contraction_threshold: bad dims");
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  const double slack = std::max(nd - odd * odd, 0.0);  // odd ≤ √N, clamp roundoff
  return (std::sqrt(kd) * odd + std::sqrt((nd - kd) * slack)) / nd;
}

}  // namespace hotcs
