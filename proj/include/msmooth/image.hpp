#pragma once

// 8-bit PNM images (binary P5/P6, maxval 255) and normalized intensity planes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace msmooth {

/// Thrown when two images that must agree in shape do not.
struct shape_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Thrown on malformed PNM input; the message names the byte offset.
struct parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Image8 {
  int width = 0;
  int height = 0;
  int channels = 1;  // 1 (gray) or 3 (RGB, interleaved)
  std::vector<std::uint8_t> data;

  Image8() = default;
  Image8(int w, int h, int c) : width(w), height(h), channels(c) {
    if (w < 1 || h < 1 || (c != 1 && c != 3))
      throw std::invalid_argument("Image8: bad dimensions");
    data.assign(static_cast<std::size_t>(w) * h * c, 0);
  }

  std::size_t size() const { return data.size(); }
  std::uint8_t& at(int x, int y, int c = 0) {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  std::uint8_t at(int x, int y, int c = 0) const {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  bool operator==(const Image8&) const = default;
};

/// Single-channel plane of real intensities. Intensity planes live in [0,1];
/// cost planes may hold any real values (some losses are negative).
struct ImagePlane {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  ImagePlane() = default;
  ImagePlane(int w, int h, double fill = 0.0) : width(w), height(h) {
    if (w < 1 || h < 1) throw std::invalid_argument("ImagePlane: bad dimensions");
    data.assign(static_cast<std::size_t>(w) * h, fill);
  }

  std::size_t size() const { return data.size(); }
  double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
  bool same_shape(const ImagePlane& o) const { return width == o.width && height == o.height; }
};

namespace detail {

struct PnmToken {
  long value;
  std::size_t at;  // byte offset of the first digit
};

inline PnmToken pnm_next_token(std::span<const std::uint8_t> bytes, std::size_t& pos) {
  for (;;) {
    while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    if (pos < bytes.size() && bytes[pos] == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      continue;
    }
    break;
  }
  if (pos >= bytes.size())
    throw parse_error("truncated header at byte " + std::to_string(pos));
  if (!std::isdigit(static_cast<unsigned char>(bytes[pos])))
    throw parse_error("malformed header (expected digits) at byte " + std::to_string(pos));
  PnmToken tok{0, pos};
  while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
    tok.value = tok.value * 10 + (bytes[pos] - '0');
    if (tok.value > 1000000000L)
      throw parse_error("header value out of range at byte " + std::to_string(tok.at));
    ++pos;
  }
  return tok;
}

}  // namespace detail

/// Parses a binary PGM (P5) or PPM (P6) with maxval 255. Header whitespace and
/// '#' comments are tolerated; errors name the offending byte offset.
inline Image8 read_pnm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6'))
    throw parse_error("not a binary PGM/PPM (magic must be P5 or P6) at byte 0");
  const int channels = bytes[1] == '5' ? 1 : 3;
  std::size_t pos = 2;

  const auto w = detail::pnm_next_token(bytes, pos);
  const auto h = detail::pnm_next_token(bytes, pos);
  const auto maxval = detail::pnm_next_token(bytes, pos);
  if (w.value < 1 || h.value < 1)
    throw parse_error("invalid image dimensions at byte " + std::to_string(w.at));
  if (maxval.value != 255)
    throw parse_error("unsupported maxval " + std::to_string(maxval.value) +
                      " (only 255) at byte " + std::to_string(maxval.at));
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos])))
    throw parse_error("missing whitespace before pixel data at byte " + std::to_string(pos));
  ++pos;

  Image8 img(static_cast<int>(w.value), static_cast<int>(h.value), channels);
  const std::size_t need = img.size();
  if (bytes.size() - pos < need)
    throw parse_error("truncated body: need " + std::to_string(need) + " bytes at byte " +
                      std::to_string(pos) + ", have " + std::to_string(bytes.size() - pos));
  std::copy_n(bytes.begin() + pos, need, img.data.begin());
  return img;
}

/// Serializes to the canonical binary form; read_pnm(write_pnm(img)) == img.
inline std::vector<std::uint8_t> write_pnm(const Image8& img) {
  std::string head = (img.channels == 1 ? "P5\n" : "P6\n") + std::to_string(img.width) + " " +
                     std::to_string(img.height) + "\n255\n";
  std::vector<std::uint8_t> out(head.begin(), head.end());
  out.insert(out.end(), img.data.begin(), img.data.end());
  return out;
}

/// Extracts one channel as a [0,1] plane (v / 255).
inline ImagePlane normalize(const Image8& img, int channel = 0) {
  if (channel < 0 || channel >= img.channels)
    throw std::invalid_argument("normalize: channel out of range");
  ImagePlane plane(img.width, img.height);
  const std::size_t n = plane.size();
  for (std::size_t i = 0; i < n; ++i)
    plane.data[i] = img.data[i * img.channels + channel] / 255.0;
  return plane;
}

/// Rounds half away from zero and clamps to [0,255].
inline std::uint8_t quantize_value(double v) {
  const long q = std::lround(v * 255.0);
  return static_cast<std::uint8_t>(std::clamp(q, 0L, 255L));
}

/// Quantizes a plane to a single-channel 8-bit image.
inline Image8 quantize(const ImagePlane& plane) {
  Image8 img(plane.width, plane.height, 1);
  for (std::size_t i = 0; i < plane.size(); ++i) img.data[i] = quantize_value(plane.data[i]);
  return img;
}

/// Rec.601 luminance of an RGB image, normalized to [0,1].
inline ImagePlane to_luminance(const Image8& img) {
  if (img.channels != 3) throw std::invalid_argument("to_luminance: needs 3 channels");
  ImagePlane plane(img.width, img.height);
  for (std::size_t i = 0; i < plane.size(); ++i) {
    const double r = img.data[3 * i + 0], g = img.data[3 * i + 1], b = img.data[3 * i + 2];
    plane.data[i] = (0.299 * r + 0.587 * g + 0.114 * b) / 255.0;
  }
  return plane;
}

}  // namespace msmooth
