#include "hotcs/datagen.hpp"

#include "hotcs/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hotcs {

CVector gen_audio(const AudioParams& params, std::uint64_t seed) {
  if (params.n < 2) throw std::invalid_argument("gen_audio: need at least two samples");
  if (params.num_modes < 1) throw std::invalid_argument("gen_audio: need at least one mode");
  if (params.amplitude == 0.0) throw std::invalid_argument("gen_audio: zero amplitude");
  if (params.amplitude < 0.0 || params.damping < 0.0 || params.amp_decay <= 0.0 ||
      params.phase_spread < 0.0) {
    throw std::invalid_argument("gen_audio: negative parameter");
  }

  Rng rng(seed);
  const Index n = params.n;
  const double nd = static_cast<double>(n);
  CVector x = CVector::Zero(n);
  double amp = params.amplitude;
  for (int mode = 0; mode < params.num_modes; ++mode) {
    // Bin index in the lower third of the spectrum, where damped modes keep
    // their energy compact.
    const Index bin = 2 + rng.uniform_index(std::max<Index>(n / 3, 1));
    const double a = amp * rng.uniform(0.5, 1.5);
    const double d = params.damping * rng.uniform(0.5, 1.0);
    const double phase = params.phase_spread == 0.0
                             ? 0.0
                             : rng.uniform(-params.phase_spread, params.phase_spread);
    for (Index t = 0; t < n; ++t) {
      const double td = static_cast<double>(t);
      const double angle = std::numbers::pi * (2.0 * td + 1.0) *
                               static_cast<double>(bin) / (2.0 * nd) +
                           phase;
      x[t] += Complex(a * std::exp(-d * td / nd) * std::cos(angle), 0.0);
    }
    amp *= params.amp_decay;
  }
  return x;
}

CVector steering_vector(Index n, double theta) {
  if (n < 1) throw std::invalid_argument("steering_vector: empty array");
  CVector a(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (Index m = 0; m < n; ++m) {
    a[m] = scale * std::polar(1.0, -std::numbers::pi * static_cast<double>(m) *
                                       std::sin(theta));
  }
  return a;
}

std::vector<CVector> gen_channel_trace(const ChannelParams& params, std::uint64_t seed) {
  if (params.n < 1 || params.t < 1) {
    throw std::invalid_argument("gen_channel_trace: empty dimensions");
  }
  if (params.paths < 1) throw std::invalid_argument("gen_channel_trace: need a path");
  if (params.ar_coeff < 0.0 || params.ar_coeff > 1.0) {
    throw std::invalid_argument("gen_channel_trace: AR coefficient outside [0,1]");
  }
  if (!params.angles.empty() &&
      static_cast<int>(params.angles.size()) != params.paths) {
    throw std::invalid_argument("gen_channel_trace: angle count != path count");
  }

  Rng rng(seed);
  const int p = params.paths;

  std::vector<CVector> steer(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) {
    const double theta = params.angles.empty()
                             ? rng.uniform(-0.5 * std::numbers::pi, 0.5 * std::numbers::pi)
                             : params.angles[static_cast<std::size_t>(i)];
    steer[static_cast<std::size_t>(i)] = steering_vector(params.n, theta);
  }

  // Unit total average power split across paths; gains start in the
  // stationary distribution so the trace has no warm-up transient.
  const double sigma = 1.0 / std::sqrt(static_cast<double>(p));
  std::vector<Complex> gain(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) gain[static_cast<std::size_t>(i)] = sigma * rng.cgaussian();

  const double rho = params.ar_coeff;
  const double innov = std::sqrt(1.0 - rho * rho);
  std::vector<CVector> trace;
  trace.reserve(static_cast<std::size_t>(params.t));
  for (Index t = 0; t < params.t; ++t) {
    if (t > 0) {
      for (int i = 0; i < p; ++i) {
        gain[static_cast<std::size_t>(i)] =
            rho * gain[static_cast<std::size_t>(i)] + innov * sigma * rng.cgaussian();
      }
    }
    CVector x = CVector::Zero(params.n);
    for (int i = 0; i < p; ++i) {
      x += gain[static_cast<std::size_t>(i)] * steer[static_cast<std::size_t>(i)];
    }
    trace.push_back(std::move(x));
  }
  return trace;
}

RMatrix gen_image(const ImageParams& params, std::uint64_t seed) {
  if (params.rows < 1 || params.cols < 1) {
    throw std::invalid_argument("gen_image: empty dimensions");
  }
  if (params.num_rects < 0) throw std::invalid_argument("gen_image: negative rectangle count");

  Rng rng(seed);
  RMatrix img = RMatrix::Constant(params.rows, params.cols, rng.uniform(0.25, 0.45));
  if (params.rows > 1 && params.gradient != 0.0) {
    // Smooth shading shared by every column.
    for (Index r = 0; r < params.rows; ++r) {
      const double shade =
          params.gradient * (static_cast<double>(r) / static_cast<double>(params.rows - 1) - 0.5);
      img.row(r).array() += shade;
    }
  }
  if (params.texture != 0.0) {
    // Row-wise fixed-pattern striping, identical in every column. Its Haar
    // spectrum is flat, so no wavelet budget compresses it, but any
    // column-shared reference absorbs it whole.
    for (Index r = 0; r < params.rows; ++r) {
      img.row(r).array() += params.texture * rng.gaussian();
    }
  }
  img = img.cwiseMax(0.0).cwiseMin(1.0);
  for (int rect = 0; rect < params.num_rects; ++rect) {
    const Index r0 = rng.uniform_index(params.rows);
    const Index c0 = rng.uniform_index(params.cols);
    const Index h = 1 + rng.uniform_index(std::max<Index>(params.rows / 2, 1));
    const Index w = 1 + rng.uniform_index(std::max<Index>(params.cols / 2, 1));
    const double delta = rng.uniform(-0.6, 0.6);
    const Index r1 = std::min(r0 + h, params.rows);
    const Index c1 = std::min(c0 + w, params.cols);
    for (Index c = c0; c < c1; ++c) {
      for (Index r = r0; r < r1; ++r) {
        img(r, c) = std::clamp(img(r, c) + delta, 0.0, 1.0);
      }
    }
  }
  return img;
}

}  // namespace hotcs
