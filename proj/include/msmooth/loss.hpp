#pragma once

// Robust loss functions and their influence functions (derivatives), plus
// cost-image construction. The scale sigma equals the sigma_r of the paired
// filter (intensities are normalized, so the range factor is 1).

#include <cmath>
#include <stdexcept>

#include "msmooth/image.hpp"

namespace msmooth {

enum class LossKind { L1, TruncatedL1, NegativeGauss, TukeyBiweight, GemanReynolds };

struct LossSpec {
  LossKind kind = LossKind::TruncatedL1;
  double sigma = 0.1;  // (0,1]; ignored by L1
};

inline const char* loss_name(LossKind k) {
  switch (k) {
    case LossKind::L1: return "l1";
    case LossKind::TruncatedL1: return "tl1";
    case LossKind::NegativeGauss: return "ngauss";
    case LossKind::TukeyBiweight: return "tukey";
    case LossKind::GemanReynolds: return "gr";
  }
  return "?";
}

inline double loss(const LossSpec& spec, double x) {
  const double ax = std::fabs(x);
  switch (spec.kind) {
    case LossKind::L1:
      return ax;
    case LossKind::TruncatedL1:
      return ax <= spec.sigma ? ax : spec.sigma;
    case LossKind::NegativeGauss: {
      const double s = 0.64 * spec.sigma;
      return 1.0 - std::exp(-(x * x) / (s * s));
    }
    case LossKind::TukeyBiweight: {
      if (ax > spec.sigma) return 1.0 / 3.0;
      const double u = (x * x) / (spec.sigma * spec.sigma);
      return u - u * u + u * u * u / 3.0;
    }
    case LossKind::GemanReynolds:
      return -spec.sigma / (spec.sigma + ax);
  }
  throw std::logic_error("loss: unknown kind");
}

/// Analytic derivative of loss. Kinks (L1 and Geman-Reynolds at x=0, truncated
/// L1 at |x|=sigma) are the caller's responsibility; the value returned there
/// is the one-sided limit from inside the central branch.
inline double influence(const LossSpec& spec, double x) {
  const double ax = std::fabs(x);
  const double sgn = x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0);
  switch (spec.kind) {
    case LossKind::L1:
      return sgn;
    case LossKind::TruncatedL1:
      return ax <= spec.sigma ? sgn : 0.0;
    case LossKind::NegativeGauss: {
      const double s = 0.64 * spec.sigma;
      return (2.0 * x / (s * s)) * std::exp(-(x * x) / (s * s));
    }
    case LossKind::TukeyBiweight: {
      if (ax > spec.sigma) return 0.0;
      const double u = (x * x) / (spec.sigma * spec.sigma);
      return (2.0 * x / (spec.sigma * spec.sigma)) * (1.0 - u) * (1.0 - u);
    }
    case LossKind::GemanReynolds: {
      const double d = spec.sigma + ax;
      return sgn * spec.sigma / (d * d);
    }
  }
  throw std::logic_error("influence: unknown kind");
}

/// Cost image for candidate level theta: per pixel, loss(theta - src_p).
inline ImagePlane cost_image(const ImagePlane& src, double theta, const LossSpec& spec) {
  ImagePlane out(src.width, src.height);
  for (std::size_t i = 0; i < src.size(); ++i) out.data[i] = loss(spec, theta - src.data[i]);
  return out;
}

}  // namespace msmooth
