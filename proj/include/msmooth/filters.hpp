#pragma once

// Weighted-average filters: box, Gaussian, bilateral (joint form), guided.
// Windows are clipped to the image and weights renormalized over in-bounds
// pixels; no padding content is invented.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "msmooth/image.hpp"
#include "msmooth/parallel.hpp"

namespace msmooth {

enum class FilterKind { Box, Gaussian, Bilateral, Guided };

/// Parameters under the sigma_s / sigma_r convention. Box and Guided derive
/// their window radius as r = max(1, floor(sqrt(2) * sigma_s)); Guided uses
/// eps = sigma_r^2. Bilateral and Guided require a guidance plane at apply
/// time; Box and Gaussian ignore it.
struct FilterSpec {
  FilterKind kind = FilterKind::Box;
  double sigma_s = 4.0;  // pixels
  double sigma_r = 0.1;  // fraction of the intensity range, (0,1]
};

inline const char* filter_name(FilterKind k) {
  switch (k) {
    case FilterKind::Box: return "box";
    case FilterKind::Gaussian: return "gaussian";
    case FilterKind::Bilateral: return "bilateral";
    case FilterKind::Guided: return "guided";
  }
  return "?";
}

inline bool filter_needs_guide(FilterKind k) {
  return k == FilterKind::Bilateral || k == FilterKind::Guided;
}

inline int radius_from_sigma(double sigma_s) {
  if (!(sigma_s > 0)) throw std::invalid_argument("radius_from_sigma: sigma_s must be > 0");
  return std::max(1, static_cast<int>(std::floor(std::sqrt(2.0) * sigma_s)));
}

/// Truncation radius of the FIR Gaussian (and the bilateral spatial kernel).
inline int gaussian_radius(double sigma_s) {
  return static_cast<int>(std::ceil(3.0 * sigma_s));
}

namespace detail {

// Quantized view of a plane whose values all sit on the k/255 grid. Lets the
// bilateral range kernel run from a 256-entry table instead of exp() per tap.
struct GridIndex {
  bool aligned = false;
  std::vector<std::uint8_t> idx;
};

inline GridIndex grid_index(const ImagePlane& p) {
  GridIndex g;
  g.idx.resize(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double s = p.data[i] * 255.0;
    const long q = std::lround(s);
    if (q < 0 || q > 255 || std::fabs(s - q) > 1e-9) return g;  // aligned stays false
    g.idx[i] = static_cast<std::uint8_t>(q);
  }
  g.aligned = true;
  return g;
}

}  // namespace detail

/// Mean over the clipped (2r+1)^2 window, O(1) per pixel independent of r
/// (prefix sums). Normalizer is the in-bounds pixel count.
inline ImagePlane box_filter(const ImagePlane& src, int r) {
  if (r < 1) throw std::invalid_argument("box_filter: radius must be >= 1");
  const int w = src.width, h = src.height;

  // Horizontal windowed sums via per-row prefix sums.
  std::vector<double> hsum(src.size());
  parallel_for(0, h, [&](int y) {
    const double* row = &src.data[static_cast<std::size_t>(y) * w];
    std::vector<double> prefix(w + 1, 0.0);
    for (int x = 0; x < w; ++x) prefix[x + 1] = prefix[x] + row[x];
    double* hrow = &hsum[static_cast<std::size_t>(y) * w];
    for (int x = 0; x < w; ++x) {
      const int x0 = std::max(x - r, 0), x1 = std::min(x + r, w - 1);
      hrow[x] = prefix[x1 + 1] - prefix[x0];
    }
  });

  // Vertical prefix over the horizontal sums (row sweep).
  std::vector<double> vpre(static_cast<std::size_t>(h + 1) * w, 0.0);
  for (int y = 0; y < h; ++y) {
    const double* cur = &hsum[static_cast<std::size_t>(y) * w];
    const double* above = &vpre[static_cast<std::size_t>(y) * w];
    double* below = &vpre[static_cast<std::size_t>(y + 1) * w];
    for (int x = 0; x < w; ++x) below[x] = above[x] + cur[x];
  }

  std::vector<int> cw(w);
  for (int x = 0; x < w; ++x) cw[x] = std::min(x + r, w - 1) - std::max(x - r, 0) + 1;

  ImagePlane out(w, h);
  parallel_for(0, h, [&](int y) {
    const int y0 = std::max(y - r, 0), y1 = std::min(y + r, h - 1);
    const int ch = y1 - y0 + 1;
    const double* top = &vpre[static_cast<std::size_t>(y0) * w];
    const double* bot = &vpre[static_cast<std::size_t>(y1 + 1) * w];
    double* orow = &out.data[static_cast<std::size_t>(y) * w];
    for (int x = 0; x < w; ++x) orow[x] = (bot[x] - top[x]) / (cw[x] * ch);
  });
  return out;
}

/// Separable FIR Gaussian truncated at radius ceil(3*sigma_s), renormalized
/// per pixel by the in-bounds kernel sum. Clipped windows are rectangles, so
/// the two renormalized 1-D passes equal the direct 2-D normalized sum.
inline ImagePlane gaussian_filter(const ImagePlane& src, double sigma_s) {
  if (!(sigma_s > 0)) throw std::invalid_argument("gaussian_filter: sigma_s must be > 0");
  const int w = src.width, h = src.height;
  const int R = gaussian_radius(sigma_s);
  std::vector<double> kern(R + 1);
  for (int d = 0; d <= R; ++d) kern[d] = std::exp(-(double(d) * d) / (2.0 * sigma_s * sigma_s));

  auto edge_norms = [&](int extent) {
    std::vector<double> norm(extent);
    for (int x = 0; x < extent; ++x) {
      const int dlo = std::max(-R, -x), dhi = std::min(R, extent - 1 - x);
      double s = 0.0;
      for (int d = dlo; d <= dhi; ++d) s += kern[std::abs(d)];
      norm[x] = s;
    }
    return norm;
  };
  const std::vector<double> norm_x = edge_norms(w);
  const std::vector<double> norm_y = edge_norms(h);

  ImagePlane tmp(w, h), out(w, h);
  parallel_for(0, h, [&](int y) {
    const double* row = &src.data[static_cast<std::size_t>(y) * w];
    double* trow = &tmp.data[static_cast<std::size_t>(y) * w];
    for (int x = 0; x < w; ++x) {
      const int dlo = std::max(-R, -x), dhi = std::min(R, w - 1 - x);
      double acc = 0.0;
      for (int d = dlo; d <= dhi; ++d) acc += kern[std::abs(d)] * row[x + d];
      trow[x] = acc / norm_x[x];
    }
  });
  parallel_for(0, h, [&](int y) {
    const int dlo = std::max(-R, -y), dhi = std::min(R, h - 1 - y);
    double* orow = &out.data[static_cast<std::size_t>(y) * w];
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int d = dlo; d <= dhi; ++d) acc += kern[std::abs(d)] * tmp.at(x, y + d);
      orow[x] = acc / norm_y[y];
    }
  });
  return out;
}

namespace detail {

// Spatial kernel table for the bilateral window, exp(-(dx^2+dy^2)/(2*sigma_s^2)).
inline std::vector<double> bilateral_spatial_table(double sigma_s, int R) {
  std::vector<double> sp(static_cast<std::size_t>(2 * R + 1) * (2 * R + 1));
  for (int dy = -R; dy <= R; ++dy)
    for (int dx = -R; dx <= R; ++dx)
      sp[static_cast<std::size_t>(dy + R) * (2 * R + 1) + (dx + R)] =
          std::exp(-(double(dx) * dx + double(dy) * dy) / (2.0 * sigma_s * sigma_s));
  return sp;
}

inline std::vector<double> bilateral_range_table(double sigma_r) {
  std::vector<double> lut(256);
  for (int d = 0; d < 256; ++d) {
    const double x = d / 255.0;
    lut[d] = std::exp(-(x * x) / (2.0 * sigma_r * sigma_r));
  }
  return lut;
}

}  // namespace detail

/// Joint bilateral filter: spatial Gaussian times range Gaussian on guide
/// values, direct sum over radius ceil(3*sigma_s), normalized by the in-bounds
/// weight sum. guide == src gives the classic bilateral filter.
inline ImagePlane bilateral_filter(const ImagePlane& src, const ImagePlane& guide,
                                   double sigma_s, double sigma_r) {
  if (!src.same_shape(guide)) throw shape_error("bilateral_filter: guide dimensions differ");
  if (!(sigma_s > 0) || !(sigma_r > 0))
    throw std::invalid_argument("bilateral_filter: sigmas must be > 0");
  const int w = src.width, h = src.height;
  const int R = gaussian_radius(sigma_s);
  const std::vector<double> sp = detail::bilateral_spatial_table(sigma_s, R);
  const detail::GridIndex gi = detail::grid_index(guide);
  const std::vector<double> range_lut =
      gi.aligned ? detail::bilateral_range_table(sigma_r) : std::vector<double>{};
  const double inv2sr2 = 1.0 / (2.0 * sigma_r * sigma_r);

  ImagePlane out(w, h);
  parallel_for(0, h, [&](int y) {
    for (int x = 0; x < w; ++x) {
      const int dy0 = std::max(-R, -y), dy1 = std::min(R, h - 1 - y);
      const int dx0 = std::max(-R, -x), dx1 = std::min(R, w - 1 - x);
      double acc = 0.0, wsum = 0.0;
      if (gi.aligned) {
        const int gp = gi.idx[static_cast<std::size_t>(y) * w + x];
        for (int dy = dy0; dy <= dy1; ++dy) {
          const std::size_t qrow = static_cast<std::size_t>(y + dy) * w + x;
          const double* sprow = &sp[static_cast<std::size_t>(dy + R) * (2 * R + 1) + R];
          for (int dx = dx0; dx <= dx1; ++dx) {
            const double wgt = sprow[dx] * range_lut[std::abs(gp - gi.idx[qrow + dx])];
            acc += wgt * src.data[qrow + dx];
            wsum += wgt;
          }
        }
      } else {
        const double gp = guide.data[static_cast<std::size_t>(y) * w + x];
        for (int dy = dy0; dy <= dy1; ++dy) {
          const std::size_t qrow = static_cast<std::size_t>(y + dy) * w + x;
          const double* sprow = &sp[static_cast<std::size_t>(dy + R) * (2 * R + 1) + R];
          for (int dx = dx0; dx <= dx1; ++dx) {
            const double dg = gp - guide.data[qrow + dx];
            const double wgt = sprow[dx] * std::exp(-dg * dg * inv2sr2);
            acc += wgt * src.data[qrow + dx];
            wsum += wgt;
          }
        }
      }
      out.data[static_cast<std::size_t>(y) * w + x] = acc / wsum;
    }
  });
  return out;
}

/// Window statistics and linear coefficients of the guided filter.
struct GuidedWindowStats {
  ImagePlane mean_t;  // window means of the guide
  ImagePlane var_t;   // window variances, clamped at 0
  ImagePlane a;
  ImagePlane b;  // b = mean_I - a * mean_T pixelwise
};

/// Computes the guided-filter coefficients from four box filterings.
inline GuidedWindowStats guided_window_stats(const ImagePlane& src, const ImagePlane& guide,
                                             int r, double eps) {
  GuidedWindowStats st;
  st.mean_t = box_filter(guide, r);
  const ImagePlane mean_i = box_filter(src, r);

  ImagePlane ti(src.width, src.height), tt(src.width, src.height);
  for (std::size_t i = 0; i < src.size(); ++i) {
    ti.data[i] = guide.data[i] * src.data[i];
    tt.data[i] = guide.data[i] * guide.data[i];
  }
  const ImagePlane corr_ti = box_filter(ti, r);
  const ImagePlane corr_tt = box_filter(tt, r);

  st.var_t = ImagePlane(src.width, src.height);
  st.a = ImagePlane(src.width, src.height);
  st.b = ImagePlane(src.width, src.height);
  for (std::size_t i = 0; i < src.size(); ++i) {
    // cancellation can leave a tiny negative variance
    const double var = std::max(corr_tt.data[i] - st.mean_t.data[i] * st.mean_t.data[i], 0.0);
    const double cov = corr_ti.data[i] - st.mean_t.data[i] * mean_i.data[i];
    st.var_t.data[i] = var;
    st.a.data[i] = cov / (var + eps);
    st.b.data[i] = mean_i.data[i] - st.a.data[i] * st.mean_t.data[i];
  }
  return st;
}

/// Standard single-channel guided filter built from exactly six box
/// filterings: mean_T, mean_I, corr_TI, corr_TT, box(a), box(b).
inline ImagePlane guided_filter(const ImagePlane& src, const ImagePlane& guide, int r,
                                double eps) {
  if (!src.same_shape(guide)) throw shape_error("guided_filter: guide dimensions differ");
  if (r < 1) throw std::invalid_argument("guided_filter: radius must be >= 1");
  if (!(eps > 0)) throw std::invalid_argument("guided_filter: eps must be > 0");
  const GuidedWindowStats st = guided_window_stats(src, guide, r, eps);
  const ImagePlane mean_a = box_filter(st.a, r);
  const ImagePlane mean_b = box_filter(st.b, r);
  ImagePlane out(src.width, src.height);
  for (std::size_t i = 0; i < src.size(); ++i)
    out.data[i] = mean_a.data[i] * guide.data[i] + mean_b.data[i];
  return out;
}

/// Dispatches to the filter selected by spec with its derived parameters.
inline ImagePlane apply(const FilterSpec& spec, const ImagePlane& src,
                        const ImagePlane* guide = nullptr) {
  switch (spec.kind) {
    case FilterKind::Box:
      return box_filter(src, radius_from_sigma(spec.sigma_s));
    case FilterKind::Gaussian:
      return gaussian_filter(src, spec.sigma_s);
    case FilterKind::Bilateral:
      if (!guide) throw std::invalid_argument("apply: bilateral filter needs a guidance plane");
      return bilateral_filter(src, *guide, spec.sigma_s, spec.sigma_r);
    case FilterKind::Guided:
      if (!guide) throw std::invalid_argument("apply: guided filter needs a guidance plane");
      return guided_filter(src, *guide, radius_from_sigma(spec.sigma_s),
                           spec.sigma_r * spec.sigma_r);
  }
  throw std::logic_error("apply: unknown filter kind");
}

}  // namespace msmooth
