#include "hotcs/hot.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace hotcs {

ReferenceSet::ReferenceSet(std::vector<CVector> refs) : refs_(std::move(refs)) {
  if (refs_.empty()) throw std::invalid_argument("reference set: need at least one reference");
  const Index n = refs_.front().size();
  if (n < 1) throw std::invalid_argument("reference set: empty reference");
  if (static_cast<Index>(refs_.size()) > n) {
    throw std::invalid_argument("reference set: more references than dimensions");
  }
  for (const auto& r : refs_) {
    if (r.size() != n) throw std::invalid_argument("reference set: length mismatch");
    if (!all_finite(r)) throw std::invalid_argument("reference set: non-finite entries");
    if (r.norm() == 0.0) throw std::invalid_argument("reference set: zero reference");
  }
  if (refs_.size() > 1) {
    CMatrix stack(n, static_cast<Index>(refs_.size()));
    for (std::size_t i = 0; i < refs_.size(); ++i) {
      stack.col(static_cast<Index>(i)) = refs_[i];
    }
    Eigen::JacobiSVD<CMatrix> svd(stack);
    const auto& sv = svd.singularValues();
    if (sv[sv.size() - 1] <= tol::kRankRel * sv[0]) {
      throw std::invalid_argument("reference set: references are linearly dependent");
    }
  }
}

PosteriorTransform::PosteriorTransform(PriorTransform prior, std::vector<HotStep> steps)
    : prior_(std::move(prior)), steps_(std::move(steps)) {
  std::vector<Index> seen;
  for (const auto& s : steps_) {
    if (s.pivot < 0 || s.pivot >= prior_.dim()) {
      throw std::invalid_argument("posterior transform: pivot out of range");
    }
    if (std::find(seen.begin(), seen.end(), s.pivot) != seen.end()) {
      throw std::invalid_argument("posterior transform: duplicate pivot");
    }
    if (s.trivial == s.factor.has_value()) {
      throw std::invalid_argument("posterior transform: trivial flag disagrees with factor");
    }
    if (s.factor) {
      if (s.factor->v.size() != prior_.dim()) {
        throw std::invalid_argument("posterior transform: factor dimension mismatch");
      }
      // The reflection may not touch coordinates claimed by earlier pivots.
      for (Index used : seen) {
        if (std::binary_search(s.factor->support.begin(), s.factor->support.end(), used)) {
          throw std::invalid_argument("posterior transform: factor support hits earlier pivot");
        }
      }
    }
    seen.push_back(s.pivot);
  }
}

CVector PosteriorTransform::analyze(const CVector& x) const {
  CVector w = prior_.analyze(x);
  for (const auto& s : steps_) {
    if (s.factor) w = householder_apply(*s.factor, w);
  }
  return w;
}

CVector PosteriorTransform::synthesize(const CVector& w) const {
  CVector z = w;
  for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) {
    if (it->factor) z = householder_apply(*it->factor, z);
  }
  return prior_.synthesize(z);
}

CMatrix PosteriorTransform::sensing_matrix(const CMatrix& phi) const {
  if (phi.cols() != dim()) {
    throw std::invalid_argument("sensing_matrix: dimension mismatch");
  }
  CMatrix a = phi * prior_.matrix();
  for (const auto& s : steps_) {
    if (s.factor) a = householder_apply_matrix(*s.factor, a, Side::Right);
  }
  return a;
}

CMatrix PosteriorTransform::matrix() const {
  CMatrix a = prior_.matrix();
  for (const auto& s : steps_) {
    if (s.factor) a = householder_apply_matrix(*s.factor, a, Side::Right);
  }
  return a;
}

std::vector<Index> PosteriorTransform::pivots() const {
  std::vector<Index> out;
  out.reserve(steps_.size());
  for (const auto& s : steps_) out.push_back(s.pivot);
  return out;
}

std::vector<Complex> PosteriorTransform::alphas() const {
  std::vector<Complex> out;
  out.reserve(steps_.size());
  for (const auto& s : steps_) out.push_back(s.alpha);
  return out;
}

std::vector<bool> PosteriorTransform::trivial_flags() const {
  std::vector<bool> out;
  out.reserve(steps_.size());
  for (const auto& s : steps_) out.push_back(s.trivial);
  return out;
}

namespace {

Index argmax_magnitude(const CVector& w, const std::vector<bool>& used) {
  Index best = -1;
  double best_mag = -1.0;
  for (Index j = 0; j < w.size(); ++j) {
    if (used[static_cast<std::size_t>(j)]) continue;
    const double mag = std::abs(w[j]);
    if (mag > best_mag) {
      best_mag = mag;
      best = j;
    }
  }
  return best;
}

// Folds one updated-and-analyzed reference into the chain. `w` is
// H_{i−1}⋯H_1 D_priorᴴ r, `used` marks coordinates claimed by earlier
// pivots. Mutates `used` to claim the new pivot.
HotStep build_step(const CVector& w, double ref_norm, Index pivot, std::vector<bool>& used) {
  const Index n = w.size();

  CVector masked = CVector::Zero(n);
  std::vector<Index> remaining;
  for (Index j = 0; j < n; ++j) {
    if (!used[static_cast<std::size_t>(j)]) {
      masked[j] = w[j];
      remaining.push_back(j);
    }
  }
  if (remaining.empty()) throw std::invalid_argument("hot: no free pivot left");

  const double masked_norm = masked.norm();
  if (masked_norm <= 1e-12 * ref_norm) {
    // All remaining energy vanished: the reference lies (numerically) in the
    // span of the earlier ones even though the upfront rank check passed.
    throw std::invalid_argument("hot: reference is dependent on earlier references");
  }

  if (pivot == kAutoPivot) {
    pivot = argmax_magnitude(masked, used);
  } else {
    if (pivot < 0 || pivot >= n) throw std::invalid_argument("hot: pivot out of range");
    if (used[static_cast<std::size_t>(pivot)]) {
      throw std::invalid_argument("hot: pivot already claimed");
    }
  }
  used[static_cast<std::size_t>(pivot)] = true;

  const Complex wj = masked[pivot];
  const double wj_mag = std::abs(wj);

  // Degenerate case: the masked reference is already a single coefficient,
  // so no reflection is needed. The off-pivot energy is summed directly;
  // ‖masked‖² − |w_j|² would cancel catastrophically right at the gate's
  // scale.
  double off_energy = 0.0;
  for (Index j = 0; j < n; ++j) {
    if (j != pivot) off_energy += std::norm(masked[j]);
  }
  const double gate = tol::kCaseA * ref_norm;
  if (off_energy <= gate * gate) {
    const Complex alpha =
        (wj_mag > 0.0) ? Complex(masked_norm) * (wj / wj_mag) : Complex(masked_norm);
    return HotStep{pivot, alpha, true, std::nullopt};
  }

  // Sign convention: α·conj(w_j) ≤ 0 maximizes ‖masked − αe_j‖ and keeps the
  // reflector well conditioned.
  const Complex alpha =
      (wj_mag > 0.0) ? Complex(-masked_norm) * (wj / wj_mag) : Complex(masked_norm);
  CVector u = masked;
  u[pivot] -= alpha;
  u /= u.norm();
  return HotStep{pivot, alpha, false, make_householder(std::move(u), std::move(remaining))};
}

void check_constraints(const PosteriorTransform& t, const std::vector<CVector>& refs) {
  // D_postᴴ r_i must vanish off the first i pivots; for one reference it must
  // equal α e_j outright. Violations mean the construction itself is broken.
  const auto& steps = t.steps();
  std::vector<bool> allowed(static_cast<std::size_t>(t.dim()), false);
  for (std::size_t i = 0; i < refs.size(); ++i) {
    allowed[static_cast<std::size_t>(steps[i].pivot)] = true;
    const CVector z = t.analyze(refs[i]);
    const double gate = tol::kConstraint * refs[i].norm();
    for (Index j = 0; j < z.size(); ++j) {
      if (!allowed[static_cast<std::size_t>(j)] && std::abs(z[j]) > gate) {
        throw std::runtime_error("hot: constructed transform violates its support constraint");
      }
    }
    if (refs.size() == 1 && std::abs(z[steps[0].pivot] - steps[0].alpha) > gate) {
      throw std::runtime_error("hot: constructed transform violates its pivot constraint");
    }
  }
}

void check_realness(const PosteriorTransform& t, const std::vector<CVector>& refs) {
  if (!t.prior().is_real()) return;
  for (const auto& r : refs) {
    for (Index i = 0; i < r.size(); ++i) {
      if (r[i].imag() != 0.0) return;
    }
  }
  for (const auto& s : t.steps()) {
    if (!s.factor) continue;
    if (s.factor->v.imag().cwiseAbs().maxCoeff() > 1e-12) {
      throw std::runtime_error("hot: real inputs produced a complex reflection");
    }
  }
}

PosteriorTransform construct_impl(const PriorTransform& p, const std::vector<CVector>& refs,
                                  const std::vector<Index>& pivots) {
  if (!pivots.empty()) {
    if (pivots.size() != refs.size()) {
      throw std::invalid_argument("hot: pivot list must match reference count");
    }
    std::vector<Index> sorted = pivots;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw std::invalid_argument("hot: duplicate pivot");
    }
  }

  std::vector<HotStep> steps;
  steps.reserve(refs.size());
  std::vector<bool> used(static_cast<std::size_t>(p.dim()), false);
  for (std::size_t i = 0; i < refs.size(); ++i) {
    CVector w = p.analyze(refs[i]);
    for (const auto& s : steps) {
      if (s.factor) w = householder_apply(*s.factor, w);
    }
    const Index pivot = pivots.empty() ? kAutoPivot : pivots[i];
    steps.push_back(build_step(w, refs[i].norm(), pivot, used));
  }

  PosteriorTransform t(p, std::move(steps));
  check_constraints(t, refs);
  check_realness(t, refs);
  return t;
}

}  // namespace

Index select_pivot(const PriorTransform& p, const CVector& r,
                   const std::vector<Index>& excluded) {
  if (r.size() != p.dim()) throw std::invalid_argument("select_pivot: dimension mismatch");
  if (r.norm() == 0.0) throw std::invalid_argument("select_pivot: zero reference");
  std::vector<bool> used(static_cast<std::size_t>(p.dim()), false);
  for (Index j : excluded) {
    if (j < 0 || j >= p.dim()) throw std::invalid_argument("select_pivot: bad excluded index");
    used[static_cast<std::size_t>(j)] = true;
  }
  const Index best = argmax_magnitude(p.analyze(r), used);
  if (best < 0) throw std::invalid_argument("select_pivot: all indices excluded");
  return best;
}

PosteriorTransform construct_hot(const PriorTransform& p, const CVector& r, Index pivot) {
  if (r.size() != p.dim()) throw std::invalid_argument("hot: dimension mismatch");
  if (!all_finite(r)) throw std::invalid_argument("hot: non-finite reference");
  if (r.norm() == 0.0) throw std::invalid_argument("hot: zero reference");
  std::vector<Index> pivots;
  if (pivot != kAutoPivot) pivots.push_back(pivot);
  return construct_impl(p, {r}, pivots);
}

PosteriorTransform construct_hot_multi(const PriorTransform& p, const ReferenceSet& refs,
                                       const std::vector<Index>& pivots) {
  if (refs.dim() != p.dim()) throw std::invalid_argument("hot: dimension mismatch");
  return construct_impl(p, refs.all(), pivots);
}

}  // namespace hotcs
