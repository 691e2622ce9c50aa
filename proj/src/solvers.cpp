#include "hotcs/solvers.hpp"

#include "hotcs/metrics.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>

namespace hotcs {

MeasurementModel make_measurement_model(CMatrix phi, double sigma2, double snr_db) {
  if (phi.rows() < 1 || phi.cols() < 1) {
    throw std::invalid_argument("measurement model: empty matrix");
  }
  if (phi.rows() > phi.cols()) {
    throw std::invalid_argument("measurement model: more measurements than dimensions");
  }
  if (!all_finite(phi)) throw std::invalid_argument("measurement model: non-finite entries");
  for (Index j = 0; j < phi.cols(); ++j) {
    if (phi.col(j).norm() == 0.0) {
      throw std::invalid_argument("measurement model: zero column");
    }
  }
  if (sigma2 < 0.0) throw std::invalid_argument("measurement model: negative variance");
  return MeasurementModel{std::move(phi), sigma2, snr_db};
}

Complex soft_threshold(Complex z, double t) {
  const double mag = std::abs(z);
  if (mag <= t) return Complex(0.0, 0.0);
  return z * ((mag - t) / mag);
}

CVector soft_threshold(const CVector& z, double t) {
  CVector out(z.size());
  for (Index i = 0; i < z.size(); ++i) out[i] = soft_threshold(z[i], t);
  return out;
}

double lasso_objective(const CMatrix& a, const CVector& y, double lambda,
                       const CVector& w) {
  return 0.5 * (a * w - y).squaredNorm() + lambda * w.cwiseAbs().sum();
}

double largest_squared_singular_value(const CMatrix& a) {
  CVector v = CVector::Ones(a.cols());
  v /= v.norm();
  double value = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    CVector u = a.adjoint() * (a * v);
    double next = u.norm();
    if (next == 0.0) {
      // The start vector sat in the null space. Restart from the heaviest
      // column's axis; if that is zero too, A itself is zero.
      Index heaviest = 0;
      double best = 0.0;
      for (Index j = 0; j < a.cols(); ++j) {
        const double cn = a.col(j).norm();
        if (cn > best) {
          best = cn;
          heaviest = j;
        }
      }
      if (best == 0.0) return 0.0;
      v = CVector::Zero(a.cols());
      v[heaviest] = Complex(1.0, 0.0);
      continue;
    }
    v = u / next;
    if (std::abs(next - value) <= 1e-12 * next) return next;
    value = next;
  }
  return value;
}

namespace {

void finalize(SolverResult& res, const CMatrix& a, const CVector& y) {
  res.support = thresholded_support(res.coeffs);
  res.residual_norm = (a * res.coeffs - y).norm();
}

}  // namespace

SolverResult omp(const CMatrix& a, const CVector& y, Index max_atoms,
                 double residual_tol) {
  const Index m = a.rows();
  const Index n = a.cols();
  if (y.size() != m) throw std::invalid_argument("omp: dimension mismatch");
  if (max_atoms < 1) throw std::invalid_argument("omp: need at least one atom");
  if (max_atoms > n) throw std::invalid_argument("omp: more atoms than columns");
  if (max_atoms > m) throw std::invalid_argument("omp: more atoms than measurements");
  if (residual_tol < 0.0) throw std::invalid_argument("omp: negative tolerance");

  RVector col_norms(n);
  for (Index j = 0; j < n; ++j) {
    col_norms[j] = a.col(j).norm();
    if (col_norms[j] == 0.0) throw std::invalid_argument("omp: zero column");
  }

  SolverResult res;
  res.coeffs = CVector::Zero(n);
  const double ynorm = y.norm();
  if (ynorm == 0.0) {
    res.converged = true;
    finalize(res, a, y);
    return res;
  }

  // Thin QR of the active columns, grown one column per pick. The residual
  // stays orthogonal to the active span, so correlations can be taken
  // against it directly.
  CMatrix q(m, max_atoms);
  CMatrix r_fac = CMatrix::Zero(max_atoms, max_atoms);
  std::vector<Index> active;
  CVector resid = y;
  double resid_norm = ynorm;

  while (static_cast<Index>(active.size()) < max_atoms &&
         resid_norm > residual_tol * ynorm) {
    Index best = -1;
    double best_corr = 0.0;
    for (Index j = 0; j < n; ++j) {
      if (std::find(active.begin(), active.end(), j) != active.end()) continue;
      const double corr = std::abs(a.col(j).dot(resid)) / col_norms[j];
      if (corr > best_corr) {
        best_corr = corr;
        best = j;
      }
    }
    // Every remaining column is orthogonal to the residual: the least-squares
    // optimum over any superset is already reached.
    if (best < 0 || best_corr <= 1e-14 * resid_norm) break;

    const Index k = static_cast<Index>(active.size());
    CVector col = a.col(best);
    CVector z = q.leftCols(k).adjoint() * col;
    CVector orth = col - q.leftCols(k) * z;
    const double rkk = orth.norm();
    if (rkk <= 1e-12 * col_norms[best]) break;  // numerically dependent column

    q.col(k) = orth / rkk;
    r_fac.block(0, k, k, 1) = z;
    r_fac(k, k) = Complex(rkk, 0.0);
    active.push_back(best);

    const Complex qr_proj = q.col(k).dot(resid);
    resid -= qr_proj * q.col(k);
    resid_norm = resid.norm();
    ++res.iterations;
  }

  if (!active.empty()) {
    const Index k = static_cast<Index>(active.size());
    // Back-substitute R c = Qᴴy for the active coefficients.
    CVector rhs = q.leftCols(k).adjoint() * y;
    CVector c(k);
    for (Index i = k - 1; i >= 0; --i) {
      Complex sum = rhs[i];
      for (Index j = i + 1; j < k; ++j) sum -= r_fac(i, j) * c[j];
      c[i] = sum / r_fac(i, i);
    }
    for (Index i = 0; i < k; ++i) res.coeffs[active[static_cast<std::size_t>(i)]] = c[i];
  }

  finalize(res, a, y);
  res.converged = res.residual_norm <= residual_tol * ynorm;
  return res;
}

namespace {

struct FistaState {
  CVector x;       // current iterate
  double obj;      // objective at x
  int iterations = 0;
  bool converged = false;
};

// Accelerated proximal gradient from a warm start. Monotone: whenever the
// momentum step raises the objective the step is redone from x and momentum
// restarts, so `obj` never increases.
FistaState run_fista(const CMatrix& a, const CVector& y, double lambda, CVector x0,
                     double step, int max_iters, double rel_tol) {
  FistaState st{std::move(x0), 0.0, 0, false};
  st.obj = lasso_objective(a, y, lambda, st.x);

  CVector z = st.x;
  double t = 1.0;
  for (int iter = 0; iter < max_iters; ++iter) {
    CVector grad = a.adjoint() * (a * z - y);
    CVector x_next = soft_threshold(z - step * grad, lambda * step);
    double obj_next = lasso_objective(a, y, lambda, x_next);

    if (obj_next > st.obj) {
      // Redo as a plain proximal step from x, backtracking in case the
      // Lipschitz estimate undershot. At a fixed point this reproduces x
      // itself, so the objective can never increase.
      grad = a.adjoint() * (a * st.x - y);
      double s = step;
      for (int back = 0; back < 60; ++back) {
        x_next = soft_threshold(st.x - s * grad, lambda * s);
        obj_next = lasso_objective(a, y, lambda, x_next);
        if (obj_next <= st.obj) break;
        s *= 0.5;
      }
      if (obj_next > st.obj) {
        x_next = st.x;
        obj_next = st.obj;
      }
      t = 1.0;
    }

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    z = x_next + ((t - 1.0) / t_next) * (x_next - st.x);
    t = t_next;

    const double change = (x_next - st.x).norm();
    const double scale = std::max(st.x.norm(), 1e-12);
    st.x = std::move(x_next);
    st.obj = obj_next;
    ++st.iterations;
    if (change <= rel_tol * scale) {
      st.converged = true;
      break;
    }
  }
  return st;
}

}  // namespace

SolverResult lasso(const CMatrix& a, const CVector& y, double lambda, int max_iters) {
  if (y.size() != a.rows()) throw std::invalid_argument("lasso: dimension mismatch");
  if (lambda <= 0.0) throw std::invalid_argument("lasso: lambda must be positive");
  if (max_iters < 1) throw std::invalid_argument("lasso: need at least one iteration");

  SolverResult res;
  const double lsq = largest_squared_singular_value(a);
  if (lsq == 0.0) {
    // A ≈ 0: the penalty alone decides and w = 0 is optimal.
    res.coeffs = CVector::Zero(a.cols());
    res.converged = true;
    finalize(res, a, y);
    return res;
  }
  const double step = 1.0 / (1.01 * lsq);

  FistaState st =
      run_fista(a, y, lambda, CVector::Zero(a.cols()), step, max_iters, 1e-8);
  res.iterations = st.iterations;
  res.converged = st.converged;

  // The accelerated loop stops on relative change, which can leave an
  // error a couple of orders above the fixed-point accuracy. A handful of
  // plain proximal steps closes that gap cheaply.
  CVector x = std::move(st.x);
  int polish_budget = std::min(max_iters - res.iterations, 50);
  while (polish_budget-- > 0) {
    CVector next = soft_threshold(x - step * (a.adjoint() * (a * x - y)), lambda * step);
    const double change = (next - x).norm();
    x = std::move(next);
    ++res.iterations;
    if (change <= 1e-13 * std::max(x.norm(), 1e-12)) break;
  }

  res.coeffs = std::move(x);
  finalize(res, a, y);
  return res;
}

SolverResult bp(const CMatrix& a, const CVector& y, double epsilon, int max_iters) {
  if (y.size() != a.rows()) throw std::invalid_argument("bp: dimension mismatch");
  if (epsilon < 0.0) throw std::invalid_argument("bp: negative epsilon");
  if (max_iters < 1) throw std::invalid_argument("bp: need at least one iteration");

  SolverResult res;
  res.coeffs = CVector::Zero(a.cols());
  const double ynorm = y.norm();
  if (ynorm <= epsilon) {
    // Zero is already feasible and has minimal ℓ1.
    res.converged = true;
    finalize(res, a, y);
    return res;
  }

  const double lsq = largest_squared_singular_value(a);
  if (lsq == 0.0) {
    // No measurement operator to satisfy the constraint with.
    finalize(res, a, y);
    return res;
  }
  const double step = 1.0 / (1.01 * lsq);
  const double feas_gap = 1e-8 * std::max(ynorm, 1.0);

  const double lambda_max = (a.adjoint() * y).cwiseAbs().maxCoeff();
  double lambda = 0.5 * lambda_max;
  const double lambda_floor = 1e-14 * lambda_max;

  CVector w = CVector::Zero(a.cols());
  int budget = max_iters;
  auto residual_at = [&](const CVector& v) { return (a * v - y).norm(); };

  // Phase 1: geometric descent until the ε-ball is reached (or λ bottoms
  // out, which is the ε = 0 exit).
  double lambda_hi = -1.0;  // last λ whose solution was infeasible
  bool feasible = false;
  while (budget > 0) {
    FistaState st = run_fista(a, y, lambda, w, step, budget, 1e-8);
    budget -= st.iterations;
    w = std::move(st.x);
    const double resid = residual_at(w);
    if (resid <= epsilon + feas_gap) {
      feasible = true;
      break;
    }
    if (lambda <= lambda_floor) break;
    lambda_hi = lambda;
    lambda = std::max(lambda / 10.0, lambda_floor);
  }

  // Rescue for ε at or near zero: continuation alone leaves a residual on the
  // order of √λ_floor, which can sit above a tight constraint. If the
  // iterate has found a small support, an unpenalized least-squares refit on
  // that support removes the shrinkage bias without raising the ℓ1 norm.
  if (!feasible) {
    // Support for the refit: entries within six orders of the peak. The
    // convergence-bookkeeping gate is far too permissive here, it keeps the
    // O(λ_floor) dust the refit exists to remove.
    const double peak = w.cwiseAbs().maxCoeff();
    std::vector<Index> support;
    for (Index i = 0; i < w.size(); ++i) {
      if (std::abs(w[i]) > 1e-6 * peak) support.push_back(i);
    }
    if (static_cast<Index>(support.size()) > a.rows()) {
      std::sort(support.begin(), support.end(), [&](Index l, Index r) {
        return std::abs(w[l]) > std::abs(w[r]);
      });
      support.resize(static_cast<std::size_t>(a.rows()));
      std::sort(support.begin(), support.end());
    }
    const Index s = static_cast<Index>(support.size());
    if (s >= 1) {
      CMatrix sub(a.rows(), s);
      for (Index i = 0; i < s; ++i) sub.col(i) = a.col(support[static_cast<std::size_t>(i)]);
      Eigen::HouseholderQR<CMatrix> qr(sub);
      CVector c = qr.solve(y);
      CVector refit = CVector::Zero(a.cols());
      for (Index i = 0; i < s; ++i) refit[support[static_cast<std::size_t>(i)]] = c[i];
      const double l1_slack = 1e-6 * w.cwiseAbs().sum() + 1e-12;
      if (residual_at(refit) <= epsilon + feas_gap &&
          refit.cwiseAbs().sum() <= w.cwiseAbs().sum() + l1_slack) {
        w = std::move(refit);
        feasible = true;
      }
    }
  }

  // Phase 2: for ε > 0, tighten λ between the last infeasible and first
  // feasible values so the residual lands on the constraint instead of far
  // inside it; shrinking less keeps the ℓ1 objective lower.
  if (feasible && epsilon > 0.0 && lambda_hi > 0.0) {
    double lo = lambda;
    double hi = lambda_hi;
    CVector best = w;
    for (int round = 0; round < 12 && budget > 0; ++round) {
      const double mid = std::sqrt(lo * hi);
      FistaState st = run_fista(a, y, mid, best, step, budget, 1e-8);
      budget -= st.iterations;
      if (residual_at(st.x) <= epsilon + feas_gap) {
        best = std::move(st.x);
        lo = mid;
        if (hi / lo < 1.02) break;
      } else {
        hi = mid;
      }
    }
    w = std::move(best);
  }

  res.coeffs = std::move(w);
  res.iterations = max_iters - budget;
  res.converged = feasible;
  finalize(res, a, y);
  return res;
}

}  // namespace hotcs
