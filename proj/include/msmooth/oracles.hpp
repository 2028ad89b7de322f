#pragma once

// Brute-force references: sort-based median, local-histogram mode, explicit
// Table-style weighted sums, and direct per-pixel minimization over all 256
// levels. Single-threaded and slow on purpose; used by tests and by the CLI's
// `--engine oracle` escape hatch for cross-validation runs.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include "msmooth/filters.hpp"
#include "msmooth/image.hpp"
#include "msmooth/loss.hpp"
#include "msmooth/smoother.hpp"

namespace msmooth {

/// Lower median (index floor((k-1)/2) of the k sorted values) of each clipped
/// (2r+1)^2 window.
inline Image8 brute_median(const Image8& img, int r) {
  if (img.channels != 1) throw std::invalid_argument("brute_median: single channel only");
  if (r < 1) throw std::invalid_argument("brute_median: radius must be >= 1");
  Image8 out(img.width, img.height, 1);
  std::vector<std::uint8_t> window;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      window.clear();
      for (int dy = std::max(y - r, 0); dy <= std::min(y + r, img.height - 1); ++dy)
        for (int dx = std::max(x - r, 0); dx <= std::min(x + r, img.width - 1); ++dx)
          window.push_back(img.at(dx, dy));
      std::sort(window.begin(), window.end());
      out.at(x, y) = window[(window.size() - 1) / 2];
    }
  }
  return out;
}

/// Most frequent 8-bit value in each clipped window; frequency ties go to the
/// smallest value.
inline Image8 brute_mode(const Image8& img, int r) {
  if (img.channels != 1) throw std::invalid_argument("brute_mode: single channel only");
  if (r < 1) throw std::invalid_argument("brute_mode: radius must be >= 1");
  Image8 out(img.width, img.height, 1);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      std::array<int, 256> hist{};
      for (int dy = std::max(y - r, 0); dy <= std::min(y + r, img.height - 1); ++dy)
        for (int dx = std::max(x - r, 0); dx <= std::min(x + r, img.width - 1); ++dx)
          ++hist[img.at(dx, dy)];
      int best = 0;
      for (int v = 1; v < 256; ++v)
        if (hist[v] > hist[best]) best = v;  // ties keep the smaller value
      out.at(x, y) = static_cast<std::uint8_t>(best);
    }
  }
  return out;
}

namespace detail {

// Window statistics for the explicit guided-filter weight. The weight sum
// runs over fully in-bounds windows only, which matches the fast composition
// algorithm on interior pixels (>= 2r from every border) but not near borders.
struct GuidedOracleStats {
  int r;
  double eps;
  int width, height;
  std::vector<double> mean, var;  // per fully in-bounds window center
  std::vector<std::uint8_t> valid;

  GuidedOracleStats(const ImagePlane& guide, int r_, double eps_)
      : r(r_), eps(eps_), width(guide.width), height(guide.height),
        mean(guide.size(), 0.0), var(guide.size(), 0.0), valid(guide.size(), 0) {
    const double wsize = (2.0 * r + 1) * (2.0 * r + 1);
    for (int ky = r; ky < height - r; ++ky) {
      for (int kx = r; kx < width - r; ++kx) {
        double s = 0.0, s2 = 0.0;
        for (int dy = -r; dy <= r; ++dy)
          for (int dx = -r; dx <= r; ++dx) {
            const double v = guide.at(kx + dx, ky + dy);
            s += v;
            s2 += v * v;
          }
        const std::size_t i = static_cast<std::size_t>(ky) * width + kx;
        mean[i] = s / wsize;
        var[i] = std::max(s2 / wsize - mean[i] * mean[i], 0.0);
        valid[i] = 1;
      }
    }
  }

  double weight(const ImagePlane& guide, int px, int py, int qx, int qy) const {
    const double wsize = (2.0 * r + 1) * (2.0 * r + 1);
    double sum = 0.0;
    const int ky0 = std::max({py - r, qy - r, r});
    const int ky1 = std::min({py + r, qy + r, height - 1 - r});
    const int kx0 = std::max({px - r, qx - r, r});
    const int kx1 = std::min({px + r, qx + r, width - 1 - r});
    for (int ky = ky0; ky <= ky1; ++ky)
      for (int kx = kx0; kx <= kx1; ++kx) {
        const std::size_t i = static_cast<std::size_t>(ky) * width + kx;
        sum += 1.0 + (guide.at(px, py) - mean[i]) * (guide.at(qx, qy) - mean[i]) /
                         (var[i] + eps);
      }
    return sum / (wsize * wsize);
  }
};

}  // namespace detail

/// Literal evaluation of the selected weighting rule: per pixel, the weighted
/// sum over the neighborhood normalized by the explicit weight sum. Intended
/// for small images only.
inline ImagePlane brute_weighted_filter(const FilterSpec& spec, const ImagePlane& src,
                                        const ImagePlane& guide) {
  if (!src.same_shape(guide)) throw shape_error("brute_weighted_filter: dimensions differ");
  const int w = src.width, h = src.height;
  ImagePlane out(w, h);

  const int reach = (spec.kind == FilterKind::Box)      ? radius_from_sigma(spec.sigma_s)
                    : (spec.kind == FilterKind::Guided) ? 2 * radius_from_sigma(spec.sigma_s)
                                                        : gaussian_radius(spec.sigma_s);
  const double two_ss2 = 2.0 * spec.sigma_s * spec.sigma_s;
  const double two_sr2 = 2.0 * spec.sigma_r * spec.sigma_r;

  std::unique_ptr<detail::GuidedOracleStats> gstats;
  if (spec.kind == FilterKind::Guided)
    gstats = std::make_unique<detail::GuidedOracleStats>(
        guide, radius_from_sigma(spec.sigma_s), spec.sigma_r * spec.sigma_r);

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0, wsum = 0.0;
      for (int qy = std::max(y - reach, 0); qy <= std::min(y + reach, h - 1); ++qy) {
        for (int qx = std::max(x - reach, 0); qx <= std::min(x + reach, w - 1); ++qx) {
          double wgt = 0.0;
          switch (spec.kind) {
            case FilterKind::Box:
              wgt = 1.0;
              break;
            case FilterKind::Gaussian: {
              const double d2 = double(qx - x) * (qx - x) + double(qy - y) * (qy - y);
              wgt = std::exp(-d2 / two_ss2);
              break;
            }
            case FilterKind::Bilateral: {
              const double d2 = double(qx - x) * (qx - x) + double(qy - y) * (qy - y);
              const double dg = guide.at(x, y) - guide.at(qx, qy);
              wgt = std::exp(-d2 / two_ss2) * std::exp(-dg * dg / two_sr2);
              break;
            }
            case FilterKind::Guided:
              wgt = gstats->weight(guide, x, y, qx, qy);
              break;
          }
          acc += wgt * src.at(qx, qy);
          wsum += wgt;
        }
      }
      out.at(x, y) = acc / wsum;
    }
  }
  return out;
}

/// Direct generalized M-smoother: per pixel, minimize the explicitly weighted
/// loss sum over all 256 integer levels, normalized by the weight sum; ties
/// within kArgminTieEps go to the smallest level. Ground truth for
/// smooth_exact (on interior pixels for the guided rule).
inline ImagePlane brute_msmooth(const ImagePlane& src, const FilterSpec& spec,
                                const LossSpec& loss_spec, const ImagePlane& guide) {
  if (!src.same_shape(guide)) throw shape_error("brute_msmooth: dimensions differ");
  const int w = src.width, h = src.height;
  ImagePlane out(w, h);

  const int reach = (spec.kind == FilterKind::Box)      ? radius_from_sigma(spec.sigma_s)
                    : (spec.kind == FilterKind::Guided) ? 2 * radius_from_sigma(spec.sigma_s)
                                                        : gaussian_radius(spec.sigma_s);
  const double two_ss2 = 2.0 * spec.sigma_s * spec.sigma_s;
  const double two_sr2 = 2.0 * spec.sigma_r * spec.sigma_r;

  std::unique_ptr<detail::GuidedOracleStats> gstats;
  if (spec.kind == FilterKind::Guided)
    gstats = std::make_unique<detail::GuidedOracleStats>(
        guide, radius_from_sigma(spec.sigma_s), spec.sigma_r * spec.sigma_r);

  std::vector<double> wq;
  std::vector<double> vq;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      wq.clear();
      vq.clear();
      for (int qy = std::max(y - reach, 0); qy <= std::min(y + reach, h - 1); ++qy) {
        for (int qx = std::max(x - reach, 0); qx <= std::min(x + reach, w - 1); ++qx) {
          double wgt = 0.0;
          switch (spec.kind) {
            case FilterKind::Box:
              wgt = 1.0;
              break;
            case FilterKind::Gaussian: {
              const double d2 = double(qx - x) * (qx - x) + double(qy - y) * (qy - y);
              wgt = std::exp(-d2 / two_ss2);
              break;
            }
            case FilterKind::Bilateral: {
              const double d2 = double(qx - x) * (qx - x) + double(qy - y) * (qy - y);
              const double dg = guide.at(x, y) - guide.at(qx, qy);
              wgt = std::exp(-d2 / two_ss2) * std::exp(-dg * dg / two_sr2);
              break;
            }
            case FilterKind::Guided:
              wgt = gstats->weight(guide, x, y, qx, qy);
              break;
          }
          wq.push_back(wgt);
          vq.push_back(src.at(qx, qy));
        }
      }
      double wsum = 0.0;
      for (double v : wq) wsum += v;

      double best_f = std::numeric_limits<double>::infinity();
      int best_level = 0;
      for (int level = 0; level < 256; ++level) {
        const double theta = level / 255.0;
        double cost = 0.0;
        for (std::size_t i = 0; i < wq.size(); ++i)
          cost += wq[i] * loss(loss_spec, theta - vq[i]);
        cost /= wsum;
        if (cost < best_f - kArgminTieEps) {
          best_f = cost;
          best_level = level;
        }
      }
      out.at(x, y) = best_level / 255.0;
    }
  }
  return out;
}

}  // namespace msmooth
