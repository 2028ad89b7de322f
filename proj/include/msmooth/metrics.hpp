#pragma once

// Evaluation metrics and seeded noise synthesis.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "msmooth/image.hpp"
#include "msmooth/parallel.hpp"

namespace msmooth {

/// PSNR in dB at peak 255, capped at 99.0 (the cap keeps the metric totally
/// ordered when the MSE vanishes).
inline double psnr(const Image8& a, const Image8& b) {
  if (a.width != b.width || a.height != b.height || a.channels != b.channels)
    throw shape_error("psnr: dimensions differ");
  double mse = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = double(a.data[i]) - double(b.data[i]);
    mse += d * d;
  }
  mse /= double(a.size());
  if (mse == 0.0) return 99.0;
  return std::min(99.0, 10.0 * std::log10(255.0 * 255.0 / mse));
}

/// Fraction of pixels whose absolute error exceeds the threshold (in 8-bit
/// levels, strictly greater).
inline double bad_pixel_rate(const Image8& est, const Image8& gt, double threshold = 1.0) {
  if (est.width != gt.width || est.height != gt.height || est.channels != gt.channels)
    throw shape_error("bad_pixel_rate: dimensions differ");
  std::size_t bad = 0;
  for (std::size_t i = 0; i < est.size(); ++i)
    if (std::fabs(double(est.data[i]) - double(gt.data[i])) > threshold) ++bad;
  return double(bad) / double(est.size());
}

struct NoiseSpec {
  double sigma = 0.0;  // std-dev on the normalized [0,1] scale
  std::uint64_t seed = 0;
};

namespace detail {

// SplitMix64 finalizer; out(k) = mix(seed + (k+1) * golden gamma) is a pure
// counter-based stream, so pixels can be generated in any order.
inline std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t k) {
  std::uint64_t z = seed + (k + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline double uniform_open(std::uint64_t bits) {  // (0,1]
  return ((bits >> 11) + 1) * 0x1p-53;
}

inline double uniform_halfopen(std::uint64_t bits) {  // [0,1)
  return (bits >> 11) * 0x1p-53;
}

// Standard normal via Box-Muller on the two counter-based uniforms of pixel i.
inline double normal_at(std::uint64_t seed, std::uint64_t i) {
  const double u1 = uniform_open(splitmix64_at(seed, 2 * i));
  const double u2 = uniform_halfopen(splitmix64_at(seed, 2 * i + 1));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace detail

/// Adds N(0, sigma^2) per pixel, clamped to [0,1]. The generator is
/// SplitMix64 keyed by (seed, pixel index) feeding Box-Muller, so identical
/// (seed, dimensions) give identical planes on every platform and thread
/// count.
inline ImagePlane add_gaussian_noise(const ImagePlane& src, const NoiseSpec& spec) {
  ImagePlane out(src.width, src.height);
  parallel_for(0, src.height, [&](int y) {
    const std::size_t lo = static_cast<std::size_t>(y) * src.width;
    for (std::size_t i = lo; i < lo + src.width; ++i) {
      const double z = detail::normal_at(spec.seed, i);
      out.data[i] = std::clamp(src.data[i] + spec.sigma * z, 0.0, 1.0);
    }
  });
  return out;
}

}  // namespace msmooth
