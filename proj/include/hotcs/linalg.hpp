#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <vector>

namespace hotcs {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Shared numeric gates. All values are absolute unless the name or the
/// call site says relative.
namespace tol {
inline constexpr double kUnitNorm = 1e-12;    // |‖v‖ − 1| for reflectors
inline constexpr double kCaseA = 1e-10;       // off-pivot residual, relative to ‖r‖
inline constexpr double kConstraint = 1e-10;  // transform constraint residual, relative to ‖r‖
inline constexpr double kSupportRel = 1e-10;  // thresholded ℓ0, relative to ‖a‖₂
inline constexpr double kRankRel = 1e-10;     // σ_min/σ_max gate for full column rank
inline constexpr double kUnitary = 1e-10;     // ‖DᴴD − I‖_max
}  // namespace tol

/// Unitary reflection I − 2vvᴴ stored by its unit vector. Entries of v
/// outside `support` are exactly zero, so the reflection fixes those
/// coordinates. Applied in O(N); never materialized in computational paths.
struct HouseholderFactor {
  CVector v;
  std::vector<Index> support;  // sorted, distinct, in range
};

bool all_finite(const CVector& a);
bool all_finite(const CMatrix& a);

/// Validates the unit-norm and support invariants and returns the factor.
HouseholderFactor make_householder(CVector v, std::vector<Index> support);
HouseholderFactor make_householder(CVector v);

enum class Side { Left, Right };

/// (I − 2vvᴴ)a = a − 2(vᴴa)v.
CVector householder_apply(const HouseholderFactor& h, const CVector& a);

/// H·A (Left) or A·H (Right) without forming H.
CMatrix householder_apply_matrix(const HouseholderFactor& h, const CMatrix& a, Side side);

/// Aᴴx.
CVector adjoint_apply(const CMatrix& a, const CVector& x);

/// Dense I − 2vvᴴ. For tests and diagnostics only.
CMatrix householder_to_matrix(const HouseholderFactor& h);

}  // namespace hotcs
