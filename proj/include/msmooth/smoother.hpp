#pragma once

// Generalized M-smoother solved as cost-volume filtering: per candidate level
// theta, build the cost image, filter it with a weighted-average filter, and
// take the per-pixel argmin. The exact engine enumerates the 256 integer
// levels; the approximate engine filters n evenly spaced samples and refines
// the winner with a parabolic fit.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "msmooth/filters.hpp"
#include "msmooth/image.hpp"
#include "msmooth/loss.hpp"
#include "msmooth/parallel.hpp"

namespace msmooth {

/// Filtered costs closer than this are a tie; the smallest level wins. Large
/// enough to absorb summation-order rounding between engines and oracles,
/// small enough that any true cost gap on the 8-bit grid clears it.
inline constexpr double kArgminTieEps = 1e-9;

/// Candidate levels i/(n-1); n = 256 reproduces the 8-bit integer grid.
struct SampleSet {
  std::vector<double> levels;
  int count() const { return static_cast<int>(levels.size()); }
};

inline SampleSet sample_levels(int n) {
  if (n < 2) throw std::invalid_argument("sample_levels: need n >= 2");
  SampleSet s;
  s.levels.resize(n);
  for (int i = 0; i < n; ++i) s.levels[i] = i / (n - 1.0);
  return s;
}

/// Sample argmin with its equally spaced neighbors and their filtered costs.
struct RefinementTriple {
  double theta_minus, theta_zero, theta_plus;
  double f_minus, f_zero, f_plus;
};

/// Sub-sample minimum from the parabola through the three samples, clamped to
/// [theta_minus, theta_plus]; a near-zero denominator returns theta_zero.
inline double parabolic_refine(const RefinementTriple& t) {
  const double denom = 4.0 * (t.f_plus + t.f_minus - 2.0 * t.f_zero);
  if (std::fabs(denom) < 1e-12) return t.theta_zero;
  const double v =
      t.theta_zero - (t.theta_plus - t.theta_minus) * (t.f_plus - t.f_minus) / denom;
  return std::clamp(v, t.theta_minus, t.theta_plus);
}

struct SmootherConfig {
  FilterSpec filter;
  LossSpec loss;
  int samples = 16;  // approximate engine only
};

/// Builds a config honoring the loss.sigma == filter.sigma_r association.
inline SmootherConfig make_config(FilterKind fk, double sigma_s, double sigma_r, LossKind lk,
                                  int samples = 16) {
  SmootherConfig cfg;
  cfg.filter = FilterSpec{fk, sigma_s, sigma_r};
  cfg.loss = LossSpec{lk, sigma_r};
  cfg.samples = samples;
  return cfg;
}

namespace detail {

inline void check_config(const SmootherConfig& cfg, const ImagePlane& src,
                         const ImagePlane& guide) {
  if (!src.same_shape(guide)) throw shape_error("smooth: guide dimensions differ");
  if (cfg.loss.kind != LossKind::L1 && cfg.loss.sigma != cfg.filter.sigma_r)
    throw std::invalid_argument("smooth: loss.sigma must equal filter.sigma_r");
}

// Loss table over (source level, sample index) for grid-aligned sources;
// values are bit-identical to evaluating the loss per pixel.
inline std::vector<double> loss_table(const LossSpec& spec, const std::vector<double>& levels) {
  const int n = static_cast<int>(levels.size());
  std::vector<double> tab(static_cast<std::size_t>(256) * n);
  for (int l = 0; l < 256; ++l) {
    const double v = l / 255.0;
    double* row = &tab[static_cast<std::size_t>(l) * n];
    for (int k = 0; k < n; ++k) row[k] = loss(spec, levels[k] - v);
  }
  return tab;
}

// Streaming argmin state: the running best filtered cost, its sample index,
// and the costs at the two neighboring samples (for refinement).
struct ArgminState {
  std::vector<double> best_f, f_minus, f_plus, last_f;
  std::vector<int> best_idx;

  explicit ArgminState(std::size_t n)
      : best_f(n, std::numeric_limits<double>::infinity()),
        f_minus(n, std::numeric_limits<double>::quiet_NaN()),
        f_plus(n, std::numeric_limits<double>::quiet_NaN()),
        last_f(n, std::numeric_limits<double>::quiet_NaN()),
        best_idx(n, -1) {}
};

inline void argmin_update(ArgminState& st, ImagePlane&& f, int k, int width, int height) {
  parallel_for(0, height, [&](int y) {
    const std::size_t lo = static_cast<std::size_t>(y) * width;
    const std::size_t hi = lo + width;
    for (std::size_t i = lo; i < hi; ++i) {
      const double fv = f.data[i];
      if (fv < st.best_f[i] - kArgminTieEps) {
        st.f_minus[i] = st.last_f[i];
        st.best_f[i] = fv;
        st.best_idx[i] = k;
      } else if (st.best_idx[i] == k - 1) {
        st.f_plus[i] = fv;
      }
    }
  });
  st.last_f = std::move(f.data);
}

inline ImagePlane argmin_output(const ArgminState& st, const std::vector<double>& levels,
                                bool refine, int width, int height) {
  const int n = static_cast<int>(levels.size());
  ImagePlane out(width, height);
  parallel_for(0, height, [&](int y) {
    const std::size_t lo = static_cast<std::size_t>(y) * width;
    const std::size_t hi = lo + width;
    for (std::size_t i = lo; i < hi; ++i) {
      const int k = st.best_idx[i];
      if (!refine || k == 0 || k == n - 1) {
        out.data[i] = levels[k];
      } else {
        out.data[i] = parabolic_refine({levels[k - 1], levels[k], levels[k + 1], st.f_minus[i],
                                        st.best_f[i], st.f_plus[i]});
      }
    }
  });
  return out;
}

// Fused path for the bilateral filter on grid-aligned inputs: the window
// weights are shared across all cost images, so one window sweep per pixel
// accumulates every level's filtered cost. Summation order per (pixel, level)
// matches the plane-at-a-time path, keeping results identical.
inline ImagePlane smooth_bilateral_fused(const ImagePlane& src, const SmootherConfig& cfg,
                                         const ImagePlane& guide,
                                         const std::vector<double>& levels, bool refine,
                                         const GridIndex& gi_src, const GridIndex& gi_guide) {
  const int w = src.width, h = src.height;
  const int n = static_cast<int>(levels.size());
  const int R = gaussian_radius(cfg.filter.sigma_s);
  const std::vector<double> sp = bilateral_spatial_table(cfg.filter.sigma_s, R);
  const std::vector<double> range_lut = bilateral_range_table(cfg.filter.sigma_r);
  const std::vector<double> tab = loss_table(cfg.loss, levels);

  ImagePlane out(w, h);
  parallel_for(0, h, [&](int y) {
    std::vector<double> acc(n);
    for (int x = 0; x < w; ++x) {
      std::fill(acc.begin(), acc.end(), 0.0);
      double wsum = 0.0;
      const int dy0 = std::max(-R, -y), dy1 = std::min(R, h - 1 - y);
      const int dx0 = std::max(-R, -x), dx1 = std::min(R, w - 1 - x);
      const int gp = gi_guide.idx[static_cast<std::size_t>(y) * w + x];
      for (int dy = dy0; dy <= dy1; ++dy) {
        const std::size_t qrow = static_cast<std::size_t>(y + dy) * w + x;
        const double* sprow = &sp[static_cast<std::size_t>(dy + R) * (2 * R + 1) + R];
        for (int dx = dx0; dx <= dx1; ++dx) {
          const double wgt = sprow[dx] * range_lut[std::abs(gp - gi_guide.idx[qrow + dx])];
          wsum += wgt;
          const double* trow = &tab[static_cast<std::size_t>(gi_src.idx[qrow + dx]) * n];
          for (int k = 0; k < n; ++k) acc[k] += wgt * trow[k];
        }
      }
      // same tie discipline as the streaming path
      double best_f = std::numeric_limits<double>::infinity();
      double f_prev = std::numeric_limits<double>::quiet_NaN();
      double f_minus = f_prev, f_plus = f_prev;
      int best_k = -1;
      for (int k = 0; k < n; ++k) {
        const double fv = acc[k] / wsum;
        if (fv < best_f - kArgminTieEps) {
          f_minus = f_prev;
          best_f = fv;
          best_k = k;
        } else if (best_k == k - 1) {
          f_plus = fv;
        }
        f_prev = fv;
      }
      double result;
      if (!refine || best_k == 0 || best_k == n - 1) {
        result = levels[best_k];
      } else {
        result = parabolic_refine(
            {levels[best_k - 1], levels[best_k], levels[best_k + 1], f_minus, best_f, f_plus});
      }
      out.data[static_cast<std::size_t>(y) * w + x] = result;
    }
  });
  return out;
}

// Generic engine: one cost image live at a time, filtered and folded into the
// streaming argmin state.
inline ImagePlane smooth_plane_major(const ImagePlane& src, const SmootherConfig& cfg,
                                     const ImagePlane& guide,
                                     const std::vector<double>& levels, bool refine) {
  const int w = src.width, h = src.height;
  const int n = static_cast<int>(levels.size());

  const GridIndex gi_src = grid_index(src);
  const std::vector<double> tab =
      gi_src.aligned ? loss_table(cfg.loss, levels) : std::vector<double>{};

  ArgminState st(src.size());
  for (int k = 0; k < n; ++k) {
    ImagePlane cost(w, h);
    if (gi_src.aligned) {
      parallel_for(0, h, [&](int y) {
        const std::size_t lo = static_cast<std::size_t>(y) * w;
        for (std::size_t i = lo; i < lo + w; ++i)
          cost.data[i] = tab[static_cast<std::size_t>(gi_src.idx[i]) * n + k];
      });
    } else {
      const double theta = levels[k];
      parallel_for(0, h, [&](int y) {
        const std::size_t lo = static_cast<std::size_t>(y) * w;
        for (std::size_t i = lo; i < lo + w; ++i)
          cost.data[i] = loss(cfg.loss, theta - src.data[i]);
      });
    }
    ImagePlane filtered = apply(cfg.filter, cost, &guide);
    argmin_update(st, std::move(filtered), k, w, h);
  }
  return argmin_output(st, levels, refine, w, h);
}

inline ImagePlane smooth_with_levels(const ImagePlane& src, const SmootherConfig& cfg,
                                     const ImagePlane* guide_opt,
                                     const std::vector<double>& levels, bool refine) {
  const ImagePlane& guide = guide_opt ? *guide_opt : src;  // self-guiding default
  check_config(cfg, src, guide);

  if (cfg.filter.kind == FilterKind::Bilateral) {
    const GridIndex gi_src = grid_index(src);
    if (gi_src.aligned) {
      const GridIndex gi_guide = guide_opt ? grid_index(guide) : gi_src;
      if (gi_guide.aligned)
        return smooth_bilateral_fused(src, cfg, guide, levels, refine, gi_src, gi_guide);
    }
  }
  return smooth_plane_major(src, cfg, guide, levels, refine);
}

}  // namespace detail

/// Reference smoother: enumerates all 256 integer levels, no refinement.
/// Output values lie on the 8-bit grid; ties go to the smallest level.
inline ImagePlane smooth_exact(const ImagePlane& src, const SmootherConfig& cfg,
                               const ImagePlane* guide = nullptr) {
  return detail::smooth_with_levels(src, cfg, guide, sample_levels(256).levels, false);
}

/// Approximate smoother: filters cfg.samples evenly spaced levels, then
/// refines the per-pixel winner parabolically (endpoint winners are emitted
/// as-is). Output values are continuous in [0,1].
inline ImagePlane smooth_approx(const ImagePlane& src, const SmootherConfig& cfg,
                                const ImagePlane* guide = nullptr) {
  if (cfg.samples < 2) throw std::invalid_argument("smooth_approx: need samples >= 2");
  return detail::smooth_with_levels(src, cfg, guide, sample_levels(cfg.samples).levels, true);
}

enum class Engine { Approx, Exact };

/// Smooths each channel independently and quantizes. Guidance for the
/// edge-aware filters: the matching channel when the guide is RGB and the
/// input is RGB, the guide's luminance when the input is gray and the guide is
/// RGB, the guide's single channel otherwise, and the input itself when no
/// guide is given.
inline Image8 smooth_multichannel(const Image8& img, const SmootherConfig& cfg, Engine engine,
                                  const Image8* guide = nullptr) {
  if (guide && (guide->width != img.width || guide->height != img.height))
    throw shape_error("smooth_multichannel: guide dimensions differ");

  ImagePlane shared_guide;
  bool have_shared = false;
  if (guide && filter_needs_guide(cfg.filter.kind)) {
    if (img.channels == 1 && guide->channels == 3) {
      shared_guide = to_luminance(*guide);
      have_shared = true;
    } else if (guide->channels == 1) {
      shared_guide = normalize(*guide, 0);
      have_shared = true;
    }
  }

  Image8 out(img.width, img.height, img.channels);
  for (int c = 0; c < img.channels; ++c) {
    const ImagePlane plane = normalize(img, c);
    const ImagePlane* gp = nullptr;
    ImagePlane chan_guide;
    if (filter_needs_guide(cfg.filter.kind) && guide) {
      if (have_shared) {
        gp = &shared_guide;
      } else {
        chan_guide = normalize(*guide, c);
        gp = &chan_guide;
      }
    }
    const ImagePlane smoothed =
        engine == Engine::Exact ? smooth_exact(plane, cfg, gp) : smooth_approx(plane, cfg, gp);
    for (std::size_t i = 0; i < smoothed.size(); ++i)
      out.data[i * img.channels + c] = quantize_value(smoothed.data[i]);
  }
  return out;
}

}  // namespace msmooth
