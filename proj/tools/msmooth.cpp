// Command-line front end: smoothing (approximate, exact, oracle engines),
// metrics, seeded noise synthesis, a timing harness, and the PSNR-vs-n
// experiment grid as CSV.

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "msmooth/msmooth.hpp"

namespace {

using namespace msmooth;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("short write to " + path);
}

Image8 load_image(const std::string& path) { return read_pnm(read_file(path)); }

Image8 load_gray(const std::string& path) {
  const Image8 img = load_image(path);
  return img.channels == 1 ? img : quantize(to_luminance(img));
}

double elapsed_ms(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

const std::map<std::string, FilterKind> kFilterNames{{"box", FilterKind::Box},
                                                     {"gaussian", FilterKind::Gaussian},
                                                     {"bilateral", FilterKind::Bilateral},
                                                     {"guided", FilterKind::Guided}};
const std::map<std::string, LossKind> kLossNames{{"l1", LossKind::L1},
                                                 {"tl1", LossKind::TruncatedL1},
                                                 {"ngauss", LossKind::NegativeGauss},
                                                 {"tukey", LossKind::TukeyBiweight},
                                                 {"gr", LossKind::GemanReynolds}};

struct SmoothArgs {
  std::string input, output, guide;
  bool self_guide = false;
  FilterKind filter = FilterKind::Box;
  LossKind loss = LossKind::TruncatedL1;
  double sigma_s = 4.0;
  double sigma_r = 0.1;
  int samples = 16;
  std::string engine = "approx";
};

// Per-channel brute-force engine; mirrors the guidance rules of
// smooth_multichannel so CLI cross-validation sees the same wiring.
Image8 oracle_multichannel(const Image8& img, const SmootherConfig& cfg, const Image8* guide) {
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
    ImagePlane chan_guide;
    const ImagePlane* gp = &plane;
    if (filter_needs_guide(cfg.filter.kind) && guide) {
      if (have_shared) {
        gp = &shared_guide;
      } else {
        chan_guide = normalize(*guide, c);
        gp = &chan_guide;
      }
    }
    const ImagePlane smoothed = brute_msmooth(plane, cfg.filter, cfg.loss, *gp);
    for (std::size_t i = 0; i < smoothed.size(); ++i)
      out.data[i * img.channels + c] = quantize_value(smoothed.data[i]);
  }
  return out;
}

int cmd_smooth(const SmoothArgs& a) {
  const Image8 img = load_image(a.input);
  Image8 guide_img;
  const Image8* guide = nullptr;
  if (filter_needs_guide(a.filter)) {
    if (!a.guide.empty()) {
      guide_img = load_image(a.guide);
      if (guide_img.width != img.width || guide_img.height != img.height)
        throw shape_error("guide dimensions differ from input");
      guide = &guide_img;
    } else if (!a.self_guide) {
      throw std::invalid_argument("--filter " + std::string(filter_name(a.filter)) +
                                  " needs --guide FILE or --self-guide");
    }
  }

  const SmootherConfig cfg = make_config(a.filter, a.sigma_s, a.sigma_r, a.loss, a.samples);
  const auto t0 = Clock::now();
  Image8 out;
  if (a.engine == "oracle") {
    out = oracle_multichannel(img, cfg, guide);
  } else {
    const Engine engine = a.engine == "exact" ? Engine::Exact : Engine::Approx;
    out = smooth_multichannel(img, cfg, engine, guide);
  }
  const double ms = elapsed_ms(t0);
  write_file(a.output, write_pnm(out));

  const double mp = img.width * double(img.height) / 1e6;
  std::printf("filter=%s loss=%s n=%d time_ms=%.1f ms_per_mp=%.1f\n", filter_name(a.filter),
              loss_name(a.loss), a.samples, ms, ms / mp);
  return 0;
}

int cmd_psnr(const std::string& a, const std::string& b) {
  std::printf("%.2f\n", psnr(load_image(a), load_image(b)));
  return 0;
}

int cmd_badpix(const std::string& est, const std::string& gt, double threshold) {
  std::printf("%.2f\n", 100.0 * bad_pixel_rate(load_image(est), load_image(gt), threshold));
  return 0;
}

int cmd_noise(const std::string& input, const std::string& output, double sigma,
              std::uint64_t seed) {
  const Image8 img = load_image(input);
  Image8 out(img.width, img.height, img.channels);
  for (int c = 0; c < img.channels; ++c) {
    const ImagePlane noisy = add_gaussian_noise(normalize(img, c), {sigma, seed + c});
    for (std::size_t i = 0; i < noisy.size(); ++i)
      out.data[i * img.channels + c] = quantize_value(noisy.data[i]);
  }
  write_file(output, write_pnm(out));
  return 0;
}

ImagePlane bench_image(std::uint64_t seed) {
  Image8 img(1024, 1024, 1);
  std::uint64_t state = seed;
  for (auto& v : img.data) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    v = static_cast<std::uint8_t>((z ^ (z >> 31)) & 0xFF);
  }
  return normalize(img);
}

template <class F>
double median_ms(int repeats, F&& fn) {
  std::vector<double> times;
  for (int i = 0; i < repeats; ++i) {
    const auto t0 = Clock::now();
    fn();
    times.push_back(elapsed_ms(t0));
  }
  std::sort(times.begin(), times.end());
  return times[times.size() / 2];
}

int cmd_bench(std::uint64_t seed) {
  const ImagePlane img = bench_image(seed);
  const double mp = img.width * double(img.height) / 1e6;
  std::printf("filter,loss,n,ms_per_mp\n");

  for (int r : {2, 8, 32}) {
    const double ms = median_ms(5, [&] { (void)box_filter(img, r); });
    std::printf("box_r%d,none,1,%.2f\n", r, ms / mp);
  }

  for (int n : {8, 16, 32}) {
    const SmootherConfig cfg = make_config(FilterKind::Box, 4.0, 0.1, LossKind::TruncatedL1, n);
    const double ms = median_ms(3, [&] { (void)smooth_approx(img, cfg); });
    std::printf("box,tl1,%d,%.2f\n", n, ms / mp);
  }

  for (FilterKind fk : {FilterKind::Gaussian, FilterKind::Bilateral, FilterKind::Guided}) {
    const SmootherConfig cfg = make_config(fk, 4.0, 0.1, LossKind::TruncatedL1, 16);
    const double ms = median_ms(3, [&] { (void)smooth_approx(img, cfg); });
    std::printf("%s,tl1,16,%.2f\n", filter_name(fk), ms / mp);
  }
  return 0;
}

struct CurveArgs {
  std::string dir;
  std::vector<std::string> filters{"box", "gaussian", "bilateral", "guided"};
  std::vector<std::string> losses{"l1", "tl1", "ngauss", "tukey", "gr"};
  std::vector<double> sigma_r{0.05, 0.1, 0.2, 0.4};
  std::vector<double> sigma_s{2, 4, 8, 16};
  std::vector<int> samples{8, 16, 32, 64, 128};
};

int cmd_curve(const CurveArgs& a) {
  std::vector<fs::path> paths;
  if (fs::is_directory(a.dir)) {
    for (const auto& entry : fs::directory_iterator(a.dir)) {
      const auto ext = entry.path().extension();
      if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") paths.push_back(entry.path());
    }
  }
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) throw std::runtime_error("no PNM images in " + a.dir);

  std::vector<ImagePlane> images;
  for (const auto& p : paths) images.push_back(normalize(load_gray(p.string())));

  std::printf("loss,filter,sigma_r,n,mean_psnr\n");
  for (const auto& loss_name_str : a.losses) {
    const LossKind lk = kLossNames.at(loss_name_str);
    for (const auto& filter_name_str : a.filters) {
      const FilterKind fk = kFilterNames.at(filter_name_str);
      for (double sr : a.sigma_r) {
        // exact references for every (image, sigma_s) cell of this row group
        std::vector<std::vector<Image8>> exact;  // [image][sigma_s]
        exact.resize(images.size());
        for (std::size_t i = 0; i < images.size(); ++i) {
          for (double ss : a.sigma_s) {
            const SmootherConfig cfg = make_config(fk, ss, sr, lk, 16);
            exact[i].push_back(quantize(smooth_exact(images[i], cfg)));
          }
        }
        for (int n : a.samples) {
          double sum = 0.0;
          int cells = 0;
          for (std::size_t i = 0; i < images.size(); ++i) {
            for (std::size_t s = 0; s < a.sigma_s.size(); ++s) {
              const SmootherConfig cfg = make_config(fk, a.sigma_s[s], sr, lk, n);
              const Image8 approx = quantize(smooth_approx(images[i], cfg));
              sum += psnr(approx, exact[i][s]);
              ++cells;
            }
          }
          std::printf("%s,%s,%g,%d,%.2f\n", loss_name_str.c_str(), filter_name_str.c_str(), sr,
                      n, sum / cells);
        }
      }
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized M-smoother: piecewise-constant smoothing via cost-volume filtering"};
  app.require_subcommand(1);
  app.fallthrough();  // accept --threads after the subcommand name too
  int threads = 0;
  app.add_option("--threads", threads, "cap worker threads (0 = hardware)");

  SmoothArgs sm;
  auto* smooth = app.add_subcommand("smooth", "smooth an image");
  smooth->add_option("-i,--input", sm.input, "input PGM/PPM")->required();
  smooth->add_option("-o,--output", sm.output, "output PGM/PPM")->required();
  smooth->add_option("--guide", sm.guide, "guidance image for bilateral/guided");
  smooth->add_flag("--self-guide", sm.self_guide, "use the input as its own guide");
  smooth->add_option("--filter", sm.filter, "weighting filter")
      ->transform(CLI::CheckedTransformer(kFilterNames, CLI::ignore_case));
  smooth->add_option("--loss", sm.loss, "loss function")
      ->transform(CLI::CheckedTransformer(kLossNames, CLI::ignore_case));
  smooth->add_option("--sigma-s", sm.sigma_s, "spatial scale in pixels");
  smooth->add_option("--sigma-r", sm.sigma_r, "range scale as a fraction of [0,1]");
  smooth->add_option("--samples", sm.samples, "sample count for the approximate engine");
  smooth->add_option("--engine", sm.engine, "approx | exact | oracle")
      ->check(CLI::IsMember({"approx", "exact", "oracle"}));

  std::string psnr_a, psnr_b;
  auto* psnr_cmd = app.add_subcommand("psnr", "PSNR between two images (dB)");
  psnr_cmd->add_option("a", psnr_a)->required();
  psnr_cmd->add_option("b", psnr_b)->required();

  std::string bp_est, bp_gt;
  double bp_threshold = 1.0;
  auto* badpix = app.add_subcommand("badpix", "percentage of pixels with error > threshold");
  badpix->add_option("est", bp_est)->required();
  badpix->add_option("gt", bp_gt)->required();
  badpix->add_option("--threshold", bp_threshold, "error threshold in 8-bit levels");

  std::string nz_in, nz_out;
  double nz_sigma = 0.1;
  std::uint64_t nz_seed = 0;
  auto* noise = app.add_subcommand("noise", "add seeded Gaussian noise");
  noise->add_option("-i,--input", nz_in)->required();
  noise->add_option("-o,--output", nz_out)->required();
  noise->add_option("--sigma", nz_sigma, "noise std-dev on the [0,1] scale");
  noise->add_option("--seed", nz_seed, "generator seed");

  std::uint64_t bench_seed = 1;
  auto* bench = app.add_subcommand("bench", "timing grid on a synthetic 1 Mp image (CSV)");
  bench->add_option("--seed", bench_seed);

  CurveArgs cv;
  auto* curve = app.add_subcommand("curve", "PSNR of approx vs exact over a parameter grid (CSV)");
  curve->add_option("-d,--dir", cv.dir, "directory of test images")->required();
  curve->add_option("--filters", cv.filters, "filters to sweep")->delimiter(',');
  curve->add_option("--losses", cv.losses, "losses to sweep")->delimiter(',');
  curve->add_option("--sigma-r", cv.sigma_r, "range scales")->delimiter(',');
  curve->add_option("--sigma-s", cv.sigma_s, "spatial scales")->delimiter(',');
  curve->add_option("--samples", cv.samples, "sample counts")->delimiter(',');

  try {
    app.parse(argc, argv);
    set_max_threads(threads);
    if (smooth->parsed()) return cmd_smooth(sm);
    if (psnr_cmd->parsed()) return cmd_psnr(psnr_a, psnr_b);
    if (badpix->parsed()) return cmd_badpix(bp_est, bp_gt, bp_threshold);
    if (noise->parsed()) return cmd_noise(nz_in, nz_out, nz_sigma, nz_seed);
    if (bench->parsed()) return cmd_bench(bench_seed);
    if (curve->parsed()) return cmd_curve(cv);
    return 1;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const shape_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
