#include <catch2/catch_amalgamated.hpp>

#include "msmooth/image.hpp"
#include "testutil.hpp"

using namespace msmooth;

namespace {
std::vector<std::uint8_t> bytes_of(const std::string& s) {
  return std::vector<std::uint8_t>(s.begin(), s.end());
}
}  // namespace

TEST_CASE("read_pnm parses the smallest legal files") {
  auto raw = bytes_of("P5\n2 1\n255\n");
  raw.push_back(0);
  raw.push_back(255);
  const Image8 img = read_pnm(raw);
  CHECK(img.width == 2);
  CHECK(img.height == 1);
  CHECK(img.channels == 1);
  CHECK(img.data == std::vector<std::uint8_t>{0, 255});

  auto rgb = bytes_of("P6\n1 1\n255\n");
  rgb.insert(rgb.end(), {10, 20, 30});
  const Image8 c = read_pnm(rgb);
  CHECK(c.channels == 3);
  CHECK(c.data == std::vector<std::uint8_t>{10, 20, 30});
}

TEST_CASE("read_pnm tolerates comments and odd whitespace") {
  auto raw = bytes_of("P5 # gray\n# a comment line\n  2\t1 # dims\n 255\n");
  raw.push_back(7);
  raw.push_back(9);
  const Image8 img = read_pnm(raw);
  CHECK(img.width == 2);
  CHECK(img.at(0, 0) == 7);
  CHECK(img.at(1, 0) == 9);
}

TEST_CASE("read_pnm rejects malformed input with byte offsets") {
  CHECK_THROWS_AS(read_pnm(bytes_of("P3\n1 1\n255\n")), parse_error);

  auto bad_maxval = bytes_of("P5\n2 1\n65535\n");
  bad_maxval.resize(bad_maxval.size() + 4, 0);
  CHECK_THROWS_WITH(read_pnm(bad_maxval),
                    Catch::Matchers::ContainsSubstring("unsupported maxval 65535") &&
                        Catch::Matchers::ContainsSubstring("at byte 7"));

  auto truncated = bytes_of("P5\n4 4\n255\n");
  truncated.resize(truncated.size() + 3, 0);  // body needs 16 bytes
  CHECK_THROWS_WITH(read_pnm(truncated), Catch::Matchers::ContainsSubstring("truncated body") &&
                                             Catch::Matchers::ContainsSubstring("at byte 11"));

  CHECK_THROWS_WITH(read_pnm(bytes_of("P5\nab\n")),
                    Catch::Matchers::ContainsSubstring("at byte 3"));
}

TEST_CASE("write_pnm emits the canonical byte form") {
  Image8 g(2, 1, 1);
  g.data = {0, 255};
  auto expect = bytes_of("P5\n2 1\n255\n");
  expect.push_back(0);
  expect.push_back(255);
  CHECK(write_pnm(g) == expect);

  Image8 c(1, 1, 3);
  c.data = {10, 20, 30};
  auto expect_c = bytes_of("P6\n1 1\n255\n");
  expect_c.insert(expect_c.end(), {10, 20, 30});
  CHECK(write_pnm(c) == expect_c);
}

TEST_CASE("pnm round-trip is bit-exact") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Image8 gray = testutil::random_image8(13, 7, 1, seed);
    CHECK(read_pnm(write_pnm(gray)) == gray);
    const Image8 rgb = testutil::random_image8(5, 11, 3, seed + 100);
    CHECK(read_pnm(write_pnm(rgb)) == rgb);
  }
}

TEST_CASE("normalize maps samples to v/255") {
  Image8 img(3, 1, 1);
  img.data = {255, 0, 128};
  const ImagePlane p = normalize(img);
  CHECK(p.data[0] == 1.0);
  CHECK(p.data[1] == 0.0);
  CHECK(p.data[2] == Catch::Approx(128.0 / 255.0).epsilon(1e-12));

  CHECK_THROWS_AS(normalize(img, 1), std::invalid_argument);
}

TEST_CASE("quantize rounds half away from zero and clamps") {
  ImagePlane p(3, 1);
  p.data = {0.5, -0.2, 1.7};
  const Image8 img = quantize(p);
  CHECK(img.data[0] == 128);  // 127.5 rounds away from zero
  CHECK(img.data[1] == 0);
  CHECK(img.data[2] == 255);
}

TEST_CASE("quantize(normalize(x)) is the identity on all 8-bit samples") {
  Image8 img(256, 1, 1);
  for (int i = 0; i < 256; ++i) img.data[i] = static_cast<std::uint8_t>(i);
  CHECK(quantize(normalize(img)) == img);
}

TEST_CASE("to_luminance uses Rec.601 weights") {
  Image8 img(3, 1, 3);
  img.data = {255, 255, 255, 255, 0, 0, 0, 0, 0};
  const ImagePlane p = to_luminance(img);
  CHECK(p.data[0] == Catch::Approx(1.0).margin(1e-12));
  CHECK(p.data[1] == Catch::Approx(0.299).margin(1e-12));
  CHECK(p.data[2] == 0.0);

  Image8 gray(1, 1, 1);
  CHECK_THROWS_AS(to_luminance(gray), std::invalid_argument);
}

TEST_CASE("to_luminance stays within the channel range") {
  const Image8 img = testutil::random_image8(16, 16, 3, 42);
  const ImagePlane p = to_luminance(img);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) {
      const double r = img.at(x, y, 0), g = img.at(x, y, 1), b = img.at(x, y, 2);
      const double lo = std::min({r, g, b}) / 255.0, hi = std::max({r, g, b}) / 255.0;
      CHECK(p.at(x, y) >= lo - 1e-12);
      CHECK(p.at(x, y) <= hi + 1e-12);
    }
}
