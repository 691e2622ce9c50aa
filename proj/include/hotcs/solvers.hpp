#pragma once

#include "hotcs/linalg.hpp"

#include <vector>

namespace hotcs {

/// Compressed measurement setup y = Φx + n. sigma2 and snr_db are carried
/// for reporting; solvers look only at phi.
struct MeasurementModel {
  CMatrix phi;
  double sigma2 = 0.0;
  double snr_db = 0.0;
};

/// Validates M ≤ N and nonzero columns.
MeasurementModel make_measurement_model(CMatrix phi, double sigma2 = 0.0,
                                        double snr_db = 0.0);

struct SolverResult {
  CVector coeffs;
  std::vector<Index> support;  // thresholded support of coeffs
  double residual_norm = 0.0;  // ‖A·coeffs − y‖₂
  int iterations = 0;
  bool converged = false;
};

/// Greedy pursuit: repeatedly pick the column best correlated with the
/// residual, refit by least squares on the active set (incremental QR), stop
/// at max_atoms columns or once ‖residual‖ ≤ residual_tol·‖y‖.
SolverResult omp(const CMatrix& a, const CVector& y, Index max_atoms,
                 double residual_tol = 1e-6);

/// min ½‖Aw − y‖² + λ‖w‖₁ by accelerated proximal gradient with magnitude
/// soft-thresholding. Monotone variant: an iterate that would raise the
/// objective is replaced by a plain proximal step and the momentum restarts.
SolverResult lasso(const CMatrix& a, const CVector& y, double lambda,
                   int max_iters = 20000);

/// min ‖w‖₁ s.t. ‖Aw − y‖ ≤ epsilon, by geometric continuation over the
/// penalty of `lasso` followed by a bisection that lands the residual on the
/// constraint. max_iters is the total inner-iteration budget; exhausting it
/// returns the best iterate with converged = false.
SolverResult bp(const CMatrix& a, const CVector& y, double epsilon,
                int max_iters = 20000);

/// ½‖Aw − y‖² + λ‖w‖₁.
double lasso_objective(const CMatrix& a, const CVector& y, double lambda,
                       const CVector& w);

/// Magnitude shrinkage keeping the phase: z·max(1 − t/|z|, 0).
Complex soft_threshold(Complex z, double t);
CVector soft_threshold(const CVector& z, double t);

/// Power-iteration estimate of σ_max(A)², deterministic start.
double largest_squared_singular_value(const CMatrix& a);

}  // namespace hotcs
