#pragma once

#include "hotcs/linalg.hpp"
#include "hotcs/priors.hpp"

#include <optional>
#include <vector>

namespace hotcs {

/// One or more reference vectors steering a posterior transform. Validated
/// on construction: equal lengths, no zero vectors, K ≤ N, and linear
/// independence (smallest singular value above kRankRel times the largest).
class ReferenceSet {
 public:
  explicit ReferenceSet(std::vector<CVector> refs);

  Index count() const { return static_cast<Index>(refs_.size()); }
  Index dim() const { return refs_.front().size(); }
  const CVector& ref(Index i) const { return refs_.at(static_cast<std::size_t>(i)); }
  const std::vector<CVector>& all() const { return refs_; }

 private:
  std::vector<CVector> refs_;
};

/// Record of one reference folded into the transform. A trivial step means
/// the (masked, updated) reference already pointed along a single basis
/// direction, so no reflection was needed; the pivot stays reserved either
/// way.
struct HotStep {
  Index pivot;
  Complex alpha;
  bool trivial;
  std::optional<HouseholderFactor> factor;  // absent iff trivial
};

/// A prior transform corrected by a chain of Householder reflections so that
/// each reference analyzes to (at most) one new nonzero coefficient:
/// D_post = D_prior · H_1 ⋯ H_K. Immutable; analyze/synthesize cost one prior
/// application plus O(N) per factor.
class PosteriorTransform {
 public:
  PosteriorTransform(PriorTransform prior, std::vector<HotStep> steps);

  /// D_postᴴ x = H_K ⋯ H_1 (D_priorᴴ x).
  CVector analyze(const CVector& x) const;

  /// D_post w; inverse of analyze.
  CVector synthesize(const CVector& w) const;

  /// Φ · D_post, built by right-applying the factor chain to Φ·D_prior.
  CMatrix sensing_matrix(const CMatrix& phi) const;

  /// Dense D_post.
  CMatrix matrix() const;

  const PriorTransform& prior() const { return prior_; }
  const std::vector<HotStep>& steps() const { return steps_; }
  Index num_refs() const { return static_cast<Index>(steps_.size()); }
  Index dim() const { return prior_.dim(); }

  std::vector<Index> pivots() const;
  std::vector<Complex> alphas() const;
  std::vector<bool> trivial_flags() const;

 private:
  PriorTransform prior_;
  std::vector<HotStep> steps_;
};

inline constexpr Index kAutoPivot = -1;

/// Index j maximizing |(D_priorᴴ r)_j| outside `excluded`; ties go to the
/// smallest index.
Index select_pivot(const PriorTransform& p, const CVector& r,
                   const std::vector<Index>& excluded = {});

/// Posterior transform for a single reference. With pivot == kAutoPivot the
/// pivot is chosen by select_pivot. The result satisfies D_postᴴ r = α e_j
/// exactly (up to roundoff) and D_post equals D_prior outside a rank-one
/// correction.
PosteriorTransform construct_hot(const PriorTransform& p, const CVector& r,
                                 Index pivot = kAutoPivot);

/// Sequential multi-reference construction. Each reference is analyzed,
/// passed through the factors built so far, masked to the indices no earlier
/// pivot has claimed, and folded in with its own reflection. Empty `pivots`
/// selects every pivot automatically; otherwise exactly one distinct pivot
/// per reference must be given.
PosteriorTransform construct_hot_multi(const PriorTransform& p, const ReferenceSet& refs,
                                       const std::vector<Index>& pivots = {});

}  // namespace hotcs
