#pragma once

#include "hotcs/linalg.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hotcs {

/// Damped-cosine mixture standing in for short audio clips. Frequencies sit
/// on cosine-transform bins, so a single undamped zero-phase mode is exactly
/// one DCT coefficient and realistic parameter ranges stay compressible.
struct AudioParams {
  Index n = 512;          // 500..700 is the intended working range
  int num_modes = 12;     // 8..16 typical
  double damping = 2.0;   // per-mode decay scale, in units of 1/N
  double amp_decay = 0.62;  // geometric amplitude falloff across modes
  double amplitude = 1.0;   // overall gain
  double phase_spread = 0.1;  // max |phase| jitter in radians
};

CVector gen_audio(const AudioParams& params, std::uint64_t seed);

/// Multipath antenna snapshot trace: fixed random arrival angles, complex
/// AR(1) path gains. ar_coeff = 1 freezes the channel.
struct ChannelParams {
  Index n = 64;   // antennas
  Index t = 200;  // time steps
  int paths = 23;
  double ar_coeff = 0.99;
  std::vector<double> angles;  // radians; empty draws them uniformly
};

/// Steering vector a(θ)_m = e^{−iπ·m·sinθ}/√N. sinθ = 2k/N lands exactly on
/// DFT column k.
CVector steering_vector(Index n, double theta);

std::vector<CVector> gen_channel_trace(const ChannelParams& params, std::uint64_t seed);

/// Grayscale test image in [0,1]: flat background, random overlapping
/// rectangles, a vertical shading ramp, and row-wise fixed-pattern striping.
/// The rectangles are Haar-friendly; the striping is not, but every column
/// shares it.
struct ImageParams {
  Index rows = 128;
  Index cols = 128;
  int num_rects = 12;
  double gradient = 0.4;   // vertical shading ramp, shared by every column
  double texture = 0.15;   // stddev of the shared row striping
};

RMatrix gen_image(const ImageParams& params, std::uint64_t seed);

/// What a pipeline draws its signals from.
struct SignalSource {
  enum class Kind { Audio, Channel, Image, File };
  Kind kind = Kind::Audio;
  AudioParams audio;
  ChannelParams channel;
  ImageParams image;
  std::string path;  // Kind::File: CSV vector
};

}  // namespace hotcs
