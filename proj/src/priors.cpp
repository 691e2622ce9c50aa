#include "hotcs/priors.hpp"

#include <cmath>
#include <numbers>

namespace hotcs {

std::string to_string(PriorKind kind) {
  switch (kind) {
    case PriorKind::Identity: return "identity";
    case PriorKind::Dft: return "dft";
    case PriorKind::Dct2: return "dct2";
    case PriorKind::Haar: return "haar";
    case PriorKind::Custom: return "custom";
  }
  throw std::invalid_argument("unknown prior kind");
}

PriorKind prior_kind_from_string(const std::string& name) {
  if (name == "identity") return PriorKind::Identity;
  if (name == "dft") return PriorKind::Dft;
  if (name == "dct2") return PriorKind::Dct2;
  if (name == "haar") return PriorKind::Haar;
  if (name == "custom") return PriorKind::Custom;
  throw std::invalid_argument("unknown prior kind: " + name);
}

namespace {

void check_dim(Index n) {
  if (n < 1) throw std::invalid_argument("prior: dimension must be positive");
}

bool matrix_is_real(const CMatrix& d) {
  for (Index j = 0; j < d.cols(); ++j) {
    for (Index i = 0; i < d.rows(); ++i) {
      if (d(i, j).imag() != 0.0) return false;
    }
  }
  return true;
}

}  // namespace

PriorTransform::PriorTransform(PriorKind kind, CMatrix d, int levels)
    : kind_(kind), d_(std::move(d)), levels_(levels), real_(matrix_is_real(d_)) {}

PriorTransform PriorTransform::identity(Index n) {
  check_dim(n);
  return PriorTransform(PriorKind::Identity, CMatrix::Identity(n, n), 0);
}

PriorTransform PriorTransform::dft(Index n) {
  check_dim(n);
  CMatrix d(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (Index k = 0; k < n; ++k) {
    for (Index m = 0; m < n; ++m) {
      // Reduce k·m mod N before forming the angle so large N keeps full
      // precision in the phase.
      const Index km = (k * m) % n;
      const double angle =
          -2.0 * std::numbers::pi * static_cast<double>(km) / static_cast<double>(n);
      d(k, m) = scale * std::polar(1.0, angle);
    }
  }
  return PriorTransform(PriorKind::Dft, std::move(d), 0);
}

PriorTransform PriorTransform::dct2(Index n) {
  check_dim(n);
  // Build the analysis matrix C row by row, then synthesize with D = Cᵀ.
  CMatrix d(n, n);
  for (Index k = 0; k < n; ++k) {
    const double ck = (k == 0) ? std::sqrt(1.0 / static_cast<double>(n))
                               : std::sqrt(2.0 / static_cast<double>(n));
    for (Index m = 0; m < n; ++m) {
      const double angle = std::numbers::pi * (2.0 * static_cast<double>(m) + 1.0) *
                           static_cast<double>(k) / (2.0 * static_cast<double>(n));
      d(m, k) = Complex(ck * std::cos(angle), 0.0);
    }
  }
  return PriorTransform(PriorKind::Dct2, std::move(d), 0);
}

PriorTransform PriorTransform::haar(Index n, int levels) {
  check_dim(n);
  int max_levels = 0;
  for (Index m = n; m % 2 == 0; m /= 2) ++max_levels;
  if (levels == 0) levels = max_levels;
  if (levels < 0) throw std::invalid_argument("haar: negative level count");
  if (levels > max_levels) {
    throw std::invalid_argument("haar: dimension not divisible by 2^levels");
  }
  if (levels == 0) {
    // Odd N admits no butterfly stage; an explicit identity would be
    // surprising here, so reject instead.
    throw std::invalid_argument("haar: dimension must be even");
  }

  // Apply each averaging/differencing stage to the rows of the running
  // analysis matrix. Stage t touches the first n/2^{t-1} rows: averages land
  // in the top half of that block, details in the bottom half.
  CMatrix a = CMatrix::Identity(n, n);
  const double s = 1.0 / std::sqrt(2.0);
  Index m = n;
  for (int level = 0; level < levels; ++level) {
    CMatrix block(m, n);
    for (Index i = 0; i < m / 2; ++i) {
      block.row(i) = s * (a.row(2 * i) + a.row(2 * i + 1));
      block.row(m / 2 + i) = s * (a.row(2 * i) - a.row(2 * i + 1));
    }
    a.topRows(m) = block;
    m /= 2;
  }
  // a is the analysis matrix; the synthesis matrix is its (conjugate)
  // transpose, which for real Haar is just the transpose.
  return PriorTransform(PriorKind::Haar, a.adjoint(), levels);
}

PriorTransform PriorTransform::custom(CMatrix d) {
  if (d.rows() < 1 || d.rows() != d.cols()) {
    throw std::invalid_argument("custom prior: matrix must be square and nonempty");
  }
  if (!all_finite(d)) throw std::invalid_argument("custom prior: non-finite entries");
  CMatrix gram = d.adjoint() * d;
  gram -= CMatrix::Identity(d.rows(), d.cols());
  if (gram.cwiseAbs().maxCoeff() > tol::kUnitary) {
    throw std::invalid_argument("custom prior: matrix is not unitary");
  }
  return PriorTransform(PriorKind::Custom, std::move(d), 0);
}

CVector PriorTransform::synthesize(const CVector& w) const {
  if (w.size() != dim()) throw std::invalid_argument("synthesize: dimension mismatch");
  return d_ * w;
}

CVector PriorTransform::analyze(const CVector& x) const {
  if (x.size() != dim()) throw std::invalid_argument("analyze: dimension mismatch");
  return d_.adjoint() * x;
}

}  // namespace hotcs
