#pragma once

#include "hotcs/linalg.hpp"

#include <vector>

namespace hotcs {

/// How far a transform drifted from another one, column for column.
struct DomainComparison {
  double relative_error;      // ‖A − B‖_F / ‖B‖_F
  double column_correlation;  // mean of |a_jᴴ b_j| / (‖a_j‖‖b_j‖)
};

/// Shape summary of a coefficient vector.
struct SparsityProfile {
  Index l0;        // entries above the relative support threshold
  double l1;
  double l2;
  double gamma_k;  // top-K energy fraction for the requested K
  double odd;      // ℓ1/ℓ2 numerical sparsity, in [1, √N]
};

DomainComparison domain_compare(const CMatrix& a, const CMatrix& b);

/// Fraction of ‖a‖₂² carried by the K largest-magnitude entries.
double energy_concentration(const CVector& a, Index k);

/// ‖a‖₁/‖a‖₂. Equals 1 for a 1-sparse vector, √N for a flat one.
double numerical_sparsity_odd(const CVector& a);

/// |rᴴx| / (‖r‖‖x‖).
double signal_correlation(const CVector& r, const CVector& x);

/// Norm fraction of x captured by the orthogonal projection onto span(R).
/// R must have full column rank.
double representational_fidelity(const CMatrix& r, const CVector& x);

/// ‖est − truth‖² / ‖truth‖².
double nmse(const CVector& est, const CVector& truth);

/// |estᴴtruth| / (‖est‖‖truth‖); 0 when est is zero.
double correlation(const CVector& est, const CVector& truth);

struct TemporalMetrics {
  double tnmse;
  double tcorr;
};

/// Arithmetic means of per-step nmse and correlation.
TemporalMetrics temporal_metrics(const std::vector<CVector>& ests,
                                 const std::vector<CVector>& truths);

/// Number of entries with |a_i| > kSupportRel·‖a‖₂.
Index thresholded_l0(const CVector& a);

/// Indices of those entries, ascending.
std::vector<Index> thresholded_support(const CVector& a);

SparsityProfile sparsity_profile(const CVector& a, Index k);

/// Smallest reference correlation for which a single-reference update cannot
/// increase the ℓ1 norm of the coefficient vector, as a function of the
/// dimension, the number of references and the prior coefficients' ℓ1/ℓ2
/// ratio: (√K·odd + √((N−K)(N−odd²))) / N.
double l1_contraction_threshold(Index n, Index k, double odd);

}  // namespace hotcs
