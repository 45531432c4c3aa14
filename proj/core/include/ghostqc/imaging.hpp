#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ghostqc {

// 2-D transmission function, values in [0,1].
struct Image {
  int height = 0;
  int width = 0;
  std::vector<double> values;  // row-major

  static Image zeros(int height, int width);
  int pixels() const { return height * width; }
  double& at(int y, int x) { return values[static_cast<std::size_t>(y) * width + x]; }
  double at(int y, int x) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

// M binary illumination patterns over an h x w grid, one row per pattern.
struct PatternSet {
  int count = 0;   // M
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> values;  // count x (height*width)
  std::uint64_t seed = 0;

  int pixels() const { return height * width; }
  const std::uint8_t* row(int j) const { return &values[static_cast<std::size_t>(j) * pixels()]; }
};

struct BucketSignals {
  std::vector<double> values;
  double noise_sigma = 0.0;
  std::optional<double> dsnr_db;

  int count() const { return static_cast<int>(values.size()); }
};

struct TvCsConfig {
  double tv_weight = 1e-6;
  int iterations = 5000;
  double learning_rate = 1e-3;
};

// Bernoulli(1/2) binary patterns, deterministic per seed.
PatternSet generate_patterns(int count, int height, int width, std::uint64_t seed);

// I_j = sum_pixels H_j * T.
BucketSignals forward_buckets(const PatternSet& patterns, const Image& image);

// Inverts dSNR = 10 log10(<I>/sigma).
double sigma_from_dsnr(double mean_bucket, double dsnr_db);
double dsnr_from_sigma(double mean_bucket, double sigma);

BucketSignals add_detection_noise(const BucketSignals& buckets, double sigma, std::uint64_t seed);

// Correlation reconstruction O = (1/M) sum (I_j - <I>)(H_j - <H>); the raw
// variant keeps the arbitrary scale, the Image variant is min-max rescaled.
std::vector<double> correlation_gi_raw(const PatternSet& patterns, const BucketSignals& buckets);
Image correlation_gi(const PatternSet& patterns, const BucketSignals& buckets);

Image minmax_rescale(int height, int width, const std::vector<double>& raw);

// Anisotropic total variation with forward differences (no wrap-around
// boundary terms) and the sign(0) = 0 subgradient.
double tv_norm(int height, int width, const std::vector<double>& values);
double tv_norm(const Image& image);
std::vector<double> tv_gradient(int height, int width, const std::vector<double>& values);

// Gradient descent on 0.5||I - H O||^2 + mu ||O||_TV with [0,1] clipping;
// returns the best-loss iterate.
Image tvcs_reconstruct(const PatternSet& patterns, const BucketSignals& buckets,
                       const TvCsConfig& config);

// Peak signal-to-noise ratio with MAX = 1, capped at 100 dB.
double psnr(const Image& a, const Image& b);
// SSIM with an 11x11 Gaussian window (sigma 1.5), K1=0.01, K2=0.03, unit
// dynamic range, averaged over fully interior windows.
double ssim(const Image& a, const Image& b);

// Procedural test objects: "glyph" (a blocky digit-2 shape), "plane" (a
// sparse aircraft-like silhouette), "texture" (a smooth grayscale block).
// side must be at least 16.
Image make_fixture_object(const std::string& kind, int side);

// --- file formats -----------------------------------------------------------

void write_pgm(const std::string& path, const Image& image);
Image read_pgm(const std::string& path);

// Lossless float CSV, 17 significant digits, row-major rows.
void write_image_csv(const std::string& path, const Image& image);
Image read_image_csv(const std::string& path);

void write_patterns_csv(const std::string& path, const PatternSet& patterns);
PatternSet read_patterns_csv(const std::string& path, int height, int width);

void write_buckets_csv(const std::string& path, const BucketSignals& buckets);
BucketSignals read_buckets_csv(const std::string& path);

}  // namespace ghostqc
