#pragma once

#include "hotcs/linalg.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>

namespace hotcs {

/// Deterministic random source built on splitmix64. The standard library's
/// distributions are implementation-defined, which would break byte-identical
/// outputs across toolchains; everything here is pinned arithmetic.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97f4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; pairs are cached.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = mag * std::sin(angle);
    have_spare_ = true;
    return mag * std::cos(angle);
  }

  /// Circularly symmetric complex normal, unit variance.
  Complex cgaussian() {
    const double re = gaussian();
    const double im = gaussian();
    return Complex(re, im) / std::sqrt(2.0);
  }

  Index uniform_index(Index n) { return static_cast<Index>(next_u64() % static_cast<std::uint64_t>(n)); }

  CVector gaussian_vector(Index n) {
    CVector v(n);
    for (Index i = 0; i < n; ++i) v[i] = Complex(gaussian(), 0.0);
    return v;
  }

  CVector cgaussian_vector(Index n) {
    CVector v(n);
    for (Index i = 0; i < n; ++i) v[i] = cgaussian();
    return v;
  }

  /// Real Gaussian sensing matrix with entries N(0, 1/M): unit expected
  /// column norm. Filled row-major so the stream layout is pinned.
  CMatrix gaussian_sensing(Index m, Index n) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    CMatrix phi(m, n);
    for (Index i = 0; i < m; ++i) {
      for (Index j = 0; j < n; ++j) phi(i, j) = Complex(scale * gaussian(), 0.0);
    }
    return phi;
  }

  /// Complex counterpart with entries CN(0, 1/M).
  CMatrix cgaussian_sensing(Index m, Index n) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    CMatrix phi(m, n);
    for (Index i = 0; i < m; ++i) {
      for (Index j = 0; j < n; ++j) phi(i, j) = scale * cgaussian();
    }
    return phi;
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Stable derived seed for a work item, so parallel schedules cannot change
/// any stream.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  Rng r(seed ^ (0x9E3779B97f4A7C15ULL * (a + 1)) ^ (0xC2B2AE3D27D4EB4FULL * (b + 1)));
  return r.next_u64();
}

}  // namespace hotcs
