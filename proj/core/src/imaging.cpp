#include "ghostqc/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "ghostqc/rng.hpp"

namespace ghostqc {

Image Image::zeros(int height, int width) {
  if (height < 1 || width < 1) throw std::invalid_argument("image dimensions must be positive");
  Image img;
  img.height = height;
  img.width = width;
  img.values.assign(static_cast<std::size_t>(height) * width, 0.0);
  return img;
}

PatternSet generate_patterns(int count, int height, int width, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("pattern count must be positive");
  if (height < 1 || width < 1) throw std::invalid_argument("pattern grid must be non-empty");
  PatternSet p;
  p.count = count;
  p.height = height;
  p.width = width;
  p.seed = seed;
  p.values.resize(static_cast<std::size_t>(count) * height * width);
  Rng rng(seed);
  for (auto& v : p.values) v = rng.uniform() < 0.5 ? 0 : 1;
  return p;
}

BucketSignals forward_buckets(const PatternSet& patterns, const Image& image) {
  if (patterns.pixels() != image.pixels()) {
    throw std::invalid_argument("pattern grid does not match image");
  }
  BucketSignals b;
  b.values.resize(patterns.count);
  const int n = patterns.pixels();
  for (int j = 0; j < patterns.count; ++j) {
    const std::uint8_t* row = patterns.row(j);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      if (row[i]) acc += image.values[i];
    }
    b.values[j] = acc;
  }
  return b;
}

double sigma_from_dsnr(double mean_bucket, double dsnr_db) {
  if (!(mean_bucket > 0.0)) throw std::invalid_argument("mean bucket must be positive");
  return mean_bucket / std::pow(10.0, dsnr_db / 10.0);
}

double dsnr_from_sigma(double mean_bucket, double sigma) {
  if (!(mean_bucket > 0.0) || !(sigma > 0.0)) {
    throw std::invalid_argument("mean bucket and sigma must be positive");
  }
  return 10.0 * std::log10(mean_bucket / sigma);
}

BucketSignals add_detection_noise(const BucketSignals& buckets, double sigma,
                                  std::uint64_t seed) {
  if (sigma < 0.0) throw std::invalid_argument("noise sigma must be nonnegative");
  BucketSignals out = buckets;
  out.noise_sigma = sigma;
  if (sigma == 0.0) return out;
  Rng rng(seed);
  for (auto& v : out.values) v += rng.normal(0.0, sigma);
  return out;
}

std::vector<double> correlation_gi_raw(const PatternSet& patterns,
                                       const BucketSignals& buckets) {
  const int m = patterns.count;
  if (buckets.count() != m) throw std::invalid_argument("bucket count does not match patterns");
  if (m < 2) throw std::invalid_argument("correlation needs at least two samplings");
  const int n = patterns.pixels();

  double mean_i = 0.0;
  for (double v : buckets.values) mean_i += v;
  mean_i /= m;

  std::vector<double> mean_h(n, 0.0);
  for (int j = 0; j < m; ++j) {
    const std::uint8_t* row = patterns.row(j);
    for (int i = 0; i < n; ++i) mean_h[i] += row[i];
  }
  for (auto& v : mean_h) v /= m;

  std::vector<double> out(n, 0.0);
  for (int j = 0; j < m; ++j) {
    const double di = buckets.values[j] - mean_i;
    const std::uint8_t* row = patterns.row(j);
    for (int i = 0; i < n; ++i) out[i] += di * (row[i] - mean_h[i]);
  }
  for (auto& v : out) v /= m;
  return out;
}

Image minmax_rescale(int height, int width, const std::vector<double>& raw) {
  if (static_cast<std::size_t>(height) * width != raw.size()) {
    throw std::invalid_argument("raw buffer does not match dimensions");
  }
  const auto [lo_it, hi_it] = std::minmax_element(raw.begin(), raw.end());
  const double lo = *lo_it, hi = *hi_it;
  Image img = Image::zeros(height, width);
  if (hi > lo) {
    for (std::size_t i = 0; i < raw.size(); ++i) img.values[i] = (raw[i] - lo) / (hi - lo);
  }
  return img;
}

Image correlation_gi(const PatternSet& patterns, const BucketSignals& buckets) {
  return minmax_rescale(patterns.height, patterns.width,
                        correlation_gi_raw(patterns, buckets));
}

double tv_norm(int height, int width, const std::vector<double>& values) {
  double tv = 0.0;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double v = values[static_cast<std::size_t>(y) * width + x];
      if (x + 1 < width) tv += std::abs(values[static_cast<std::size_t>(y) * width + x + 1] - v);
      if (y + 1 < height) tv += std::abs(values[static_cast<std::size_t>(y + 1) * width + x] - v);
    }
  }
  return tv;
}

double tv_norm(const Image& image) { return tv_norm(image.height, image.width, image.values); }

namespace {
double sign0(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }
}  // namespace

std::vector<double> tv_gradient(int height, int width, const std::vector<double>& values) {
  std::vector<double> g(values.size(), 0.0);
  auto idx = [width](int y, int x) { return static_cast<std::size_t>(y) * width + x; };
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (x + 1 < width) {
        const double s = sign0(values[idx(y, x + 1)] - values[idx(y, x)]);
        g[idx(y, x)] -= s;
        g[idx(y, x + 1)] += s;
      }
      if (y + 1 < height) {
        const double s = sign0(values[idx(y + 1, x)] - values[idx(y, x)]);
        g[idx(y, x)] -= s;
        g[idx(y + 1, x)] += s;
      }
    }
  }
  return g;
}

Image tvcs_reconstruct(const PatternSet& patterns, const BucketSignals& buckets,
                       const TvCsConfig& config) {
  if (buckets.count() != patterns.count) {
    throw std::invalid_argument("bucket count does not match patterns");
  }
  if (config.tv_weight < 0.0) throw std::invalid_argument("tv weight must be nonnegative");
  const int n = patterns.pixels();
  const int m = patterns.count;

  std::vector<double> o(n, 0.5);
  std::vector<double> best = o;
  double best_loss = std::numeric_limits<double>::infinity();
  std::vector<double> residual(m);

  for (int it = 0; it < config.iterations; ++it) {
    double data_term = 0.0;
    for (int j = 0; j < m; ++j) {
      const std::uint8_t* row = patterns.row(j);
      double est = 0.0;
      for (int i = 0; i < n; ++i) {
        if (row[i]) est += o[i];
      }
      residual[j] = est - buckets.values[j];
      data_term += residual[j] * residual[j];
    }
    const double loss = 0.5 * data_term +
                        config.tv_weight * tv_norm(patterns.height, patterns.width, o);
    if (loss < best_loss) {
      best_loss = loss;
      best = o;
    }

    std::vector<double> grad = tv_gradient(patterns.height, patterns.width, o);
    for (auto& g : grad) g *= config.tv_weight;
    for (int j = 0; j < m; ++j) {
      const std::uint8_t* row = patterns.row(j);
      const double r = residual[j];
      for (int i = 0; i < n; ++i) {
        if (row[i]) grad[i] += r;
      }
    }
    for (int i = 0; i < n; ++i) {
      o[i] = std::clamp(o[i] - config.learning_rate * grad[i], 0.0, 1.0);
    }
  }

  Image img = Image::zeros(patterns.height, patterns.width);
  img.values = best;
  return img;
}

double psnr(const Image& a, const Image& b) {
  if (a.height != b.height || a.width != b.width) {
    throw std::invalid_argument("image shapes differ");
  }
  double mse = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const double d = a.values[i] - b.values[i];
    mse += d * d;
  }
  mse /= static_cast<double>(a.values.size());
  if (mse <= 0.0) return 100.0;
  return std::min(100.0, 10.0 * std::log10(1.0 / mse));
}

double ssim(const Image& a, const Image& b) {
  if (a.height != b.height || a.width != b.width) {
    throw std::invalid_argument("image shapes differ");
  }
  constexpr int kWin = 11;
  constexpr double kSigma = 1.5;
  constexpr double kC1 = 0.01 * 0.01;
  constexpr double kC2 = 0.03 * 0.03;
  if (a.height < kWin || a.width < kWin) {
    throw std::invalid_argument("image smaller than the SSIM window");
  }

  double window[kWin][kWin];
  double wsum = 0.0;
  for (int y = 0; y < kWin; ++y) {
    for (int x = 0; x < kWin; ++x) {
      const double dy = y - kWin / 2, dx = x - kWin / 2;
      window[y][x] = std::exp(-(dx * dx + dy * dy) / (2.0 * kSigma * kSigma));
      wsum += window[y][x];
    }
  }
  for (auto& row : window) {
    for (auto& w : row) w /= wsum;
  }

  double total = 0.0;
  long count = 0;
  for (int oy = 0; oy + kWin <= a.height; ++oy) {
    for (int ox = 0; ox + kWin <= a.width; ++ox) {
      double mu_a = 0.0, mu_b = 0.0;
      for (int y = 0; y < kWin; ++y) {
        for (int x = 0; x < kWin; ++x) {
          mu_a += window[y][x] * a.at(oy + y, ox + x);
          mu_b += window[y][x] * b.at(oy + y, ox + x);
        }
      }
      double var_a = 0.0, var_b = 0.0, cov = 0.0;
      for (int y = 0; y < kWin; ++y) {
        for (int x = 0; x < kWin; ++x) {
          const double da = a.at(oy + y, ox + x) - mu_a;
          const double db = b.at(oy + y, ox + x) - mu_b;
          var_a += window[y][x] * da * da;
          var_b += window[y][x] * db * db;
          cov += window[y][x] * da * db;
        }
      }
      const double num = (2.0 * mu_a * mu_b + kC1) * (2.0 * cov + kC2);
      const double den = (mu_a * mu_a + mu_b * mu_b + kC1) * (var_a + var_b + kC2);
      total += num / den;
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

namespace {

// Rectangle fill in unit coordinates [0,1)^2.
void fill_rect(Image& img, double y0, double y1, double x0, double x1, double value) {
  const int h = img.height, w = img.width;
  for (int y = static_cast<int>(y0 * h); y < static_cast<int>(y1 * h); ++y) {
    for (int x = static_cast<int>(x0 * w); x < static_cast<int>(x1 * w); ++x) {
      if (y >= 0 && y < h && x >= 0 && x < w) img.at(y, x) = value;
    }
  }
}

}  // namespace

Image make_fixture_object(const std::string& kind, int side) {
  if (side < 16) throw std::invalid_argument("fixture objects need side >= 16");
  Image img = Image::zeros(side, side);
  if (kind == "glyph") {
    // Blocky digit "2".
    fill_rect(img, 0.15, 0.28, 0.25, 0.75, 1.0);  // top bar
    fill_rect(img, 0.28, 0.45, 0.62, 0.75, 1.0);  // upper right stroke
    fill_rect(img, 0.45, 0.58, 0.25, 0.75, 1.0);  // middle bar
    fill_rect(img, 0.58, 0.75, 0.25, 0.38, 1.0);  // lower left stroke
    fill_rect(img, 0.75, 0.88, 0.25, 0.75, 1.0);  // bottom bar
  } else if (kind == "plane") {
    fill_rect(img, 0.20, 0.80, 0.45, 0.55, 1.0);  // fuselage
    fill_rect(img, 0.40, 0.52, 0.12, 0.88, 1.0);  // wings
    fill_rect(img, 0.72, 0.80, 0.32, 0.68, 1.0);  // tail
    fill_rect(img, 0.12, 0.20, 0.42, 0.58, 1.0);  // nose
  } else if (kind == "texture") {
    for (int y = 0; y < side; ++y) {
      for (int x = 0; x < side; ++x) {
        const double u = static_cast<double>(x) / side;
        const double v = static_cast<double>(y) / side;
        const double wave = 0.25 * std::sin(2.0 * M_PI * 3.0 * u) * std::cos(2.0 * M_PI * 2.0 * v);
        img.at(y, x) = std::clamp(0.45 + 0.35 * u + wave, 0.0, 1.0);
      }
    }
  } else {
    throw std::invalid_argument("unknown fixture kind: " + kind);
  }
  return img;
}

// --- file formats ----------------------------------------------------------------

void write_pgm(const std::string& path, const Image& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "P5\n" << image.width << " " << image.height << "\n255\n";
  for (double v : image.values) {
    const int byte = static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
    out.put(static_cast<char>(byte));
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

Image read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string magic;
  in >> magic;
  if (magic != "P5") throw std::runtime_error("unsupported PGM (need binary P5): " + path);
  auto next_token = [&in, &path]() {
    std::string tok;
    for (;;) {
      if (!(in >> tok)) throw std::runtime_error("truncated PGM header: " + path);
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      return tok;
    }
  };
  const int width = std::stoi(next_token());
  const int height = std::stoi(next_token());
  const int maxval = std::stoi(next_token());
  if (maxval != 255) throw std::runtime_error("unsupported PGM maxval: " + path);
  in.get();  // single whitespace after header
  Image img = Image::zeros(height, width);
  for (auto& v : img.values) {
    const int c = in.get();
    if (c == EOF) throw std::runtime_error("truncated PGM data: " + path);
    v = static_cast<double>(c) / 255.0;
  }
  return img;
}

void write_image_csv(const std::string& path, const Image& image) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  char buf[64];
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      std::snprintf(buf, sizeof(buf), "%.17g", image.at(y, x));
      out << buf;
      out << (x + 1 < image.width ? ',' : '\n');
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

Image read_image_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && rows.front().size() != row.size()) {
      throw std::runtime_error("ragged image CSV: " + path);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("empty image CSV: " + path);
  Image img = Image::zeros(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const double v = rows[y][x];
      if (!(v >= 0.0 && v <= 1.0)) {
        throw std::runtime_error("image CSV value outside [0,1]: " + path);
      }
      img.at(y, x) = v;
    }
  }
  return img;
}

void write_patterns_csv(const std::string& path, const PatternSet& patterns) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  const int n = patterns.pixels();
  for (int j = 0; j < patterns.count; ++j) {
    const std::uint8_t* row = patterns.row(j);
    for (int i = 0; i < n; ++i) {
      out << static_cast<int>(row[i]);
      out << (i + 1 < n ? ',' : '\n');
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

PatternSet read_patterns_csv(const std::string& path, int height, int width) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  PatternSet p;
  p.height = height;
  p.width = width;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    int read = 0;
    while (std::getline(ss, cell, ',')) {
      const int v = std::stoi(cell);
      if (v != 0 && v != 1) throw std::runtime_error("non-binary pattern entry: " + path);
      p.values.push_back(static_cast<std::uint8_t>(v));
      ++read;
    }
    if (read != height * width) throw std::runtime_error("pattern row length mismatch: " + path);
    p.count += 1;
  }
  if (p.count == 0) throw std::runtime_error("empty patterns CSV: " + path);
  return p;
}

void write_buckets_csv(const std::string& path, const BucketSignals& buckets) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  char buf[64];
  for (double v : buckets.values) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

BucketSignals read_buckets_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  BucketSignals b;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    b.values.push_back(std::stod(line));
  }
  if (b.values.empty()) throw std::runtime_error("empty buckets CSV: " + path);
  return b;
}

}  // namespace ghostqc
