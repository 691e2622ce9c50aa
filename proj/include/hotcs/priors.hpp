#pragma once

#include "hotcs/linalg.hpp"

#include <string>

namespace hotcs {

enum class PriorKind { Identity, Dft, Dct2, Haar, Custom };

std::string to_string(PriorKind kind);
PriorKind prior_kind_from_string(const std::string& name);

/// An orthonormal analysis/synthesis pair over C^N. The synthesis matrix D
/// is held densely (these run at desk scale, N ≤ ~1024); analyze is Dᴴx and
/// synthesize is Dw, so round trips are exact up to float error.
class PriorTransform {
 public:
  /// D = I.
  static PriorTransform identity(Index n);

  /// D(k, m) = (1/√N) e^{−i2πkm/N}, zero-based. Unitary, complex.
  static PriorTransform dft(Index n);

  /// Orthonormal DCT-II: analysis row k is c_k cos(π(2m+1)k/(2N)) with
  /// c_0 = √(1/N) and c_k = √(2/N); D is its transpose. Real orthogonal.
  static PriorTransform dct2(Index n);

  /// Orthonormal Haar wavelet, `levels` dyadic stages. Requires N divisible
  /// by 2^levels. levels == 0 picks the deepest level N admits. Coefficient
  /// order is [approximation, coarsest detail, ..., finest detail].
  static PriorTransform haar(Index n, int levels = 0);

  /// Arbitrary unitary synthesis matrix; rejected unless ‖DᴴD − I‖_max is
  /// within tol::kUnitary.
  static PriorTransform custom(CMatrix d);

  CVector synthesize(const CVector& w) const;  // D·w
  CVector analyze(const CVector& x) const;     // Dᴴ·x

  const CMatrix& matrix() const { return d_; }
  PriorKind kind() const { return kind_; }
  Index dim() const { return d_.rows(); }
  int levels() const { return levels_; }
  bool is_real() const { return real_; }

 private:
  PriorTransform(PriorKind kind, CMatrix d, int levels);

  PriorKind kind_;
  CMatrix d_;
  int levels_;  // meaningful for Haar only
  bool real_;
};

}  // namespace hotcs
