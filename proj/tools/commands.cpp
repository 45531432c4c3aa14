#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "fixtures.hpp"
#include "ghostqc/nn.hpp"
#include "ghostqc/parallel.hpp"

namespace fs = std::filesystem;

namespace ghostqc::cli {

const char* kToolVersion = "ghostqc 0.1.0";

namespace {

std::uint64_t fnv1a_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot hash missing file: " + path);
  std::uint64_t h = 1469598103934665603ULL;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ULL;
    }
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

class Manifest {
 public:
  Manifest(fs::path dir, std::string command, nlohmann::json config_echo)
      : dir_(std::move(dir)),
        start_(std::chrono::steady_clock::now()) {
    doc_["tool_version"] = kToolVersion;
    doc_["command"] = std::move(command);
    doc_["config"] = std::move(config_echo);
    doc_["artifacts"] = nlohmann::json::array();
  }

  void add(const fs::path& path) {
    doc_["artifacts"].push_back({
        {"path", fs::relative(path, dir_).string()},
        {"fnv1a64", hex64(fnv1a_file(path.string()))},
    });
  }

  void extra(const std::string& key, nlohmann::json value) { doc_[key] = std::move(value); }

  // Written last, atomically.
  void write() {
    doc_["timings"] = {
        {"wall_seconds",
         std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count()}};
    const fs::path tmp = dir_ / "manifest.json.tmp";
    const fs::path final_path = dir_ / "manifest.json";
    std::ofstream out(tmp);
    if (!out) throw InputError("cannot write manifest in " + dir_.string());
    out << doc_.dump(2) << '\n';
    out.close();
    fs::rename(tmp, final_path);
  }

 private:
  fs::path dir_;
  nlohmann::json doc_;
  std::chrono::steady_clock::time_point start_;
};

fs::path prepare_out_dir(const ExperimentConfig& cfg, const CommandOptions& opts) {
  const fs::path dir = opts.out_override.empty() ? fs::path(cfg.output_dir)
                                                 : fs::path(opts.out_override);
  fs::create_directories(dir);
  return dir;
}

ExperimentConfig apply_overrides(ExperimentConfig cfg, const CommandOptions& opts) {
  if (opts.seed_override) {
    cfg.model.seed = *opts.seed_override;
    cfg.echo["model"]["seed"] = *opts.seed_override;
  }
  if (!opts.out_override.empty()) {
    cfg.output_dir = opts.out_override;
    cfg.echo["output"]["dir"] = opts.out_override;
  }
  return cfg;
}

void write_json(const fs::path& path, const nlohmann::json& doc) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

int require_square_side(int pixels) {
  const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(pixels))));
  if (side * side != pixels) throw InputError("pattern rows are not square images");
  return side;
}

struct LoadedData {
  PatternSet patterns;
  BucketSignals buckets;
  int side = 0;
};

LoadedData load_simulated(const fs::path& dir) {
  const fs::path ppath = dir / "patterns.csv";
  const fs::path bpath = dir / "buckets.csv";
  if (!fs::exists(ppath) || !fs::exists(bpath)) {
    throw InputError("missing patterns.csv/buckets.csv in " + dir.string() +
                     " (run simulate first)");
  }
  // Peek the first row to size the grid.
  std::ifstream probe(ppath);
  std::string line;
  if (!std::getline(probe, line)) throw InputError("empty patterns file: " + ppath.string());
  const int pixels = static_cast<int>(std::count(line.begin(), line.end(), ',')) + 1;
  const int side = require_square_side(pixels);
  probe.close();

  LoadedData data;
  data.side = side;
  data.patterns = read_patterns_csv(ppath.string(), side, side);
  data.buckets = read_buckets_csv(bpath.string());
  if (data.buckets.count() != data.patterns.count) {
    throw InputError("bucket count does not match pattern count");
  }
  return data;
}

void write_image_artifacts(Manifest& manifest, const fs::path& dir, const std::string& stem,
                           const Image& image) {
  const fs::path pgm = dir / (stem + ".pgm");
  const fs::path csv = dir / (stem + ".csv");
  write_pgm(pgm.string(), image);
  write_image_csv(csv.string(), image);
  manifest.add(pgm);
  manifest.add(csv);
}

nlohmann::json metrics_json(const Image& rec, const Image* truth) {
  nlohmann::json j;
  if (truth != nullptr) {
    j["psnr_db"] = psnr(rec, *truth);
    j["ssim"] = ssim(rec, *truth);
  }
  return j;
}

std::optional<Image> maybe_truth(const ExperimentConfig& cfg, int side) {
  if (cfg.object_image.empty()) return std::nullopt;
  Image truth = load_object(cfg.object_image);
  if (truth.height != side || truth.width != side) {
    throw InputError("object image does not match the pattern grid");
  }
  return truth;
}

nlohmann::json model_counts_json(const HybridModel& model) {
  return {
      {"quantum", model.quantum_param_count()},
      {"observable_weights", model.trainable_weights ? model.obs_weights.size() : 0},
      {"front_substitute", model.classical.front_count()},
      {"projection", model.classical.proj_count()},
      {"trunk", model.classical.trunk_count()},
      {"classical_total", model.classical.total_count()},
  };
}

void save_model_checkpoint(Manifest& manifest, const fs::path& dir, const HybridModel& model,
                           const nlohmann::json& config_echo) {
  std::vector<nn::Tensor> theta_tensors;
  std::vector<const nn::Tensor*> blocks;
  for (const auto& theta : model.thetas) {
    nn::Tensor t = nn::Tensor::zeros({static_cast<int>(theta.values.size())});
    t.data = theta.values;
    theta_tensors.push_back(std::move(t));
  }
  for (const auto& t : theta_tensors) blocks.push_back(&t);
  for (const auto& t : model.classical.tensors) blocks.push_back(&t);
  nn::Tensor weights = nn::Tensor::zeros({std::max(1, static_cast<int>(model.obs_weights.size()))});
  if (model.trainable_weights) {
    weights.data = model.obs_weights;
    blocks.push_back(&weights);
  }
  nlohmann::json header{{"tool_version", kToolVersion},
                        {"model_seed", model.model_seed},
                        {"config", config_echo}};
  const fs::path path = dir / "model.ckpt";
  nn::checkpoint_save(path.string(), header, blocks);
  manifest.add(path);
}

// Writes patterns/buckets for the config into dir and returns the noise
// sigma actually applied.
double simulate_into(const ExperimentConfig& cfg, const fs::path& dir) {
  const Image truth = load_object(cfg.object_image);
  const PatternSet patterns =
      generate_patterns(cfg.patterns_count, truth.height, truth.width, cfg.patterns_seed);
  BucketSignals buckets = forward_buckets(patterns, truth);

  double sigma = 0.0;
  if (cfg.sigma) {
    sigma = *cfg.sigma;
  } else if (cfg.dsnr_db) {
    double mean = 0.0;
    for (double v : buckets.values) mean += v;
    mean /= buckets.count();
    sigma = sigma_from_dsnr(mean, *cfg.dsnr_db);
  }
  buckets = add_detection_noise(buckets, sigma, cfg.detection_seed);
  buckets.dsnr_db = cfg.dsnr_db;

  Manifest manifest(dir, "simulate", cfg.echo);
  const fs::path ppath = dir / "patterns.csv";
  const fs::path bpath = dir / "buckets.csv";
  write_patterns_csv(ppath.string(), patterns);
  write_buckets_csv(bpath.string(), buckets);
  manifest.add(ppath);
  manifest.add(bpath);
  manifest.extra("detection", {{"sigma", sigma},
                               {"dsnr_db", cfg.dsnr_db ? nlohmann::json(*cfg.dsnr_db)
                                                       : nlohmann::json()}});
  manifest.write();
  return sigma;
}

int reconstruct_into(const ExperimentConfig& cfg, const std::string& method, int threads,
                     const fs::path& dir, nlohmann::json* table_row) {
  const LoadedData data = load_simulated(dir);
  const auto truth = maybe_truth(cfg, data.side);

  Manifest manifest(dir, "reconstruct --method " + method, cfg.echo);
  manifest.add(dir / "patterns.csv");
  manifest.add(dir / "buckets.csv");
  nlohmann::json result{{"method", method}};

  if (method == "dgi") {
    std::cerr << "warning: method dgi ignores the train section of the config\n";
    const Image rec = correlation_gi(data.patterns, data.buckets);
    write_image_artifacts(manifest, dir, "image", rec);
    result["metrics"] = metrics_json(rec, truth ? &*truth : nullptr);
  } else if (method == "tvcs") {
    TvCsConfig tv;
    tv.tv_weight = cfg.train.tv_weight;
    tv.iterations = cfg.train.max_iterations;
    tv.learning_rate = cfg.train.learning_rate;
    const Image rec = tvcs_reconstruct(data.patterns, data.buckets, tv);
    write_image_artifacts(manifest, dir, "image", rec);
    result["metrics"] = metrics_json(rec, truth ? &*truth : nullptr);
  } else if (method == "qcsgi" || method == "cnn") {
    ModelConfig mc = cfg.model;
    mc.image_side = data.side;
    HybridModel model = method == "qcsgi"
                            ? build_model(mc, data.patterns.count)
                            : build_baseline_model(data.patterns.count, data.side, mc.seed);
    TrainConfig tc = cfg.train;
    tc.threads = threads;
    TrainReport report = train(model, data.buckets, data.patterns, tc,
                               truth ? &*truth : nullptr);

    write_image_artifacts(manifest, dir, "image", report.best_image);
    const fs::path report_path = dir / "report.json";
    nlohmann::json report_doc = report.to_json(cfg.echo);
    report_doc["seeds"] = {{"patterns", cfg.patterns_seed},
                           {"detection", cfg.detection_seed},
                           {"model", cfg.model.seed},
                           {"quantum_noise", cfg.quantum_noise_seed}};
    write_json(report_path, report_doc);
    manifest.add(report_path);
    save_model_checkpoint(manifest, dir, model, cfg.echo);

    result["parameter_counts"] = model_counts_json(model);
    result["stop_reason"] = to_string(report.stop_reason);
    result["iterations"] = report.iterations;
    result["best_loss"] = report.best_loss;
    if (report.metrics) {
      result["metrics"] = {{"psnr_db", report.metrics->psnr_db}, {"ssim", report.metrics->ssim}};
    }
    manifest.extra("timings_train", {{"wall_seconds", report.wall_seconds}});
    std::cout << "parameters: quantum=" << model.quantum_param_count()
              << " front_substitute=" << model.classical.front_count()
              << " projection=" << model.classical.proj_count()
              << " trunk=" << model.classical.trunk_count() << "\n";
  } else {
    throw ConfigError("unknown method: " + method + " (expected qcsgi, cnn, dgi or tvcs)");
  }

  const fs::path metrics_path = dir / "metrics.json";
  write_json(metrics_path, result);
  manifest.add(metrics_path);
  manifest.write();

  if (result.contains("metrics") && result["metrics"].contains("ssim")) {
    std::cout << "method=" << method << " ssim=" << result["metrics"]["ssim"]
              << " psnr_db=" << result["metrics"]["psnr_db"] << "\n";
  }
  if (table_row != nullptr) *table_row = result;
  return 0;
}

}  // namespace

int cmd_simulate(const ExperimentConfig& raw, const CommandOptions& opts) {
  const ExperimentConfig cfg = apply_overrides(raw, opts);
  const fs::path dir = prepare_out_dir(cfg, opts);
  const double sigma = simulate_into(cfg, dir);
  std::cout << "simulate: wrote " << cfg.patterns_count << " patterns/buckets (sigma=" << sigma
            << ") to " << dir.string() << "\n";
  return 0;
}

int cmd_reconstruct(const ExperimentConfig& raw, const std::string& method,
                    const CommandOptions& opts) {
  const ExperimentConfig cfg = apply_overrides(raw, opts);
  const fs::path dir = prepare_out_dir(cfg, opts);
  return reconstruct_into(cfg, method, resolve_threads(opts.threads), dir, nullptr);
}

int cmd_sweep(const ExperimentConfig& raw, const std::string& axis,
              const std::vector<double>& values, const std::string& method, int replicates,
              const CommandOptions& opts) {
  if (values.empty()) throw ConfigError("sweep needs a non-empty --values list");
  if (replicates < 1) throw ConfigError("sweep needs at least one seed replicate");
  if (axis != "measurements" && axis != "dsnr" && axis != "quantum_noise") {
    throw ConfigError("unknown sweep axis: " + axis);
  }
  const ExperimentConfig base = apply_overrides(raw, opts);
  if (axis == "quantum_noise" && !base.model.noise) {
    throw ConfigError("quantum_noise sweep needs a quantum_noise section with kind != none");
  }
  const fs::path dir = prepare_out_dir(base, opts);
  const int threads = resolve_threads(opts.threads);

  Manifest manifest(dir, "sweep --axis " + axis, base.echo);
  nlohmann::json rows = nlohmann::json::array();

  for (double value : values) {
    for (int rep = 0; rep < replicates; ++rep) {
      ExperimentConfig cell = base;
      cell.patterns_seed = mix_seed(base.patterns_seed, rep);
      cell.detection_seed = mix_seed(base.detection_seed, rep);
      cell.model.seed = mix_seed(base.model.seed, rep);
      cell.train.noise_seed = mix_seed(base.quantum_noise_seed, rep);

      std::string label;
      if (axis == "measurements") {
        cell.patterns_count = static_cast<int>(value);
        label = "m" + std::to_string(cell.patterns_count);
      } else if (axis == "dsnr") {
        cell.dsnr_db = value;
        cell.sigma.reset();
        label = "dsnr" + std::to_string(static_cast<int>(value));
      } else {
        cell.model.noise->rate = value;
        std::ostringstream os;
        os << "qn" << value;
        label = os.str();
      }

      const fs::path cell_dir = dir / (axis + "_" + label + "_rep" + std::to_string(rep));
      cell.output_dir = cell_dir.string();
      cell.echo["output"]["dir"] = cell.output_dir;
      fs::create_directories(cell_dir);

      const double sigma = simulate_into(cell, cell_dir);
      nlohmann::json row;
      reconstruct_into(cell, method, threads, cell_dir, &row);

      row["axis"] = axis;
      row["value"] = value;
      row["replicate"] = rep;
      row["sigma"] = sigma;
      row["seeds"] = {{"patterns", cell.patterns_seed},
                      {"detection", cell.detection_seed},
                      {"model", cell.model.seed}};
      rows.push_back(row);
    }
  }

  // Tidy CSV for external plotting.
  const fs::path csv_path = dir / "sweep.csv";
  {
    std::ofstream out(csv_path);
    out << "axis,value,replicate,method,sigma,psnr_db,ssim\n";
    for (const auto& row : rows) {
      out << axis << ',' << row["value"].get<double>() << ',' << row["replicate"].get<int>()
          << ',' << method << ',' << row["sigma"].get<double>() << ',';
      if (row.contains("metrics") && row["metrics"].contains("psnr_db")) {
        out << row["metrics"]["psnr_db"].get<double>() << ','
            << row["metrics"]["ssim"].get<double>();
      } else {
        out << ",";
      }
      out << '\n';
    }
  }
  const fs::path json_path = dir / "sweep.json";
  write_json(json_path, rows);
  manifest.add(csv_path);
  manifest.add(json_path);
  manifest.write();
  std::cout << "sweep: " << rows.size() << " cells -> " << csv_path.string() << "\n";
  return 0;
}

int cmd_bp_variance(const ExperimentConfig& raw, const std::vector<int>& qubits,
                    const std::vector<int>& layers, int trials, const CommandOptions& opts) {
  if (qubits.empty() || layers.empty()) throw ConfigError("bp-variance needs qubit and layer lists");
  if (trials < 1) throw ConfigError("bp-variance needs at least one trial");
  for (int q : qubits) {
    if (q < 1) throw ConfigError("qubit counts must be positive");
  }
  for (int l : layers) {
    if (l < 1) throw ConfigError("layer counts must be positive");
  }
  const ExperimentConfig cfg = apply_overrides(raw, opts);
  const fs::path dir = prepare_out_dir(cfg, opts);

  BpExperimentConfig bp;
  bp.object = load_object(cfg.object_image);
  bp.patterns_seed = cfg.patterns_seed;
  bp.encoding = cfg.model.encoding;
  bp.entangler = cfg.model.entangler;
  bp.topology = cfg.model.topology;
  bp.trials = trials;
  bp.seed = cfg.model.seed;
  bp.tv_weight = cfg.train.tv_weight;
  bp.gain_calibration = cfg.train.gain_calibration;
  bp.threads = resolve_threads(opts.threads);

  const BpVarianceTable table = bp_variance_experiment(bp, qubits, layers);

  Manifest manifest(dir, "bp-variance", cfg.echo);
  auto write_table = [&](const std::string& name, const std::vector<double>& cells) {
    const fs::path path = dir / name;
    std::ofstream out(path);
    out << "layers\\qubits";
    for (int q : qubits) out << ',' << q;
    out << '\n';
    char buf[64];
    for (std::size_t li = 0; li < layers.size(); ++li) {
      out << layers[li];
      for (std::size_t qi = 0; qi < qubits.size(); ++qi) {
        std::snprintf(buf, sizeof(buf), "%.17g", cells[li * qubits.size() + qi]);
        out << ',' << buf;
      }
      out << '\n';
    }
    out.close();
    manifest.add(path);
  };
  write_table("local_variance.csv", table.local_variance);
  if (!table.entanglement_variance.empty()) {
    write_table("entanglement_variance.csv", table.entanglement_variance);
  }

  nlohmann::json j{{"qubits", qubits}, {"layers", layers}, {"trials", trials},
                   {"local_variance", table.local_variance}};
  if (!table.entanglement_variance.empty()) {
    j["entanglement_variance"] = table.entanglement_variance;
  }
  const fs::path json_path = dir / "bp_variance.json";
  write_json(json_path, j);
  manifest.add(json_path);
  manifest.write();
  std::cout << "bp-variance: " << qubits.size() * layers.size() << " cells x " << trials
            << " trials -> " << dir.string() << "\n";
  return 0;
}

int cmd_metrics(const std::string& image_a, const std::string& image_b,
                const CommandOptions& opts) {
  const Image a = load_object(image_a);
  const Image b = load_object(image_b);
  if (a.height != b.height || a.width != b.width) {
    throw InputError("image shapes differ: " + std::to_string(a.height) + "x" +
                     std::to_string(a.width) + " vs " + std::to_string(b.height) + "x" +
                     std::to_string(b.width));
  }
  nlohmann::json j{{"psnr_db", psnr(a, b)}, {"ssim", ssim(a, b)}};
  std::cout << j.dump(2) << "\n";
  if (!opts.out_override.empty()) {
    fs::create_directories(opts.out_override);
    Manifest manifest(opts.out_override, "metrics",
                      {{"image_a", image_a}, {"image_b", image_b}});
    write_json(fs::path(opts.out_override) / "metrics.json", j);
    manifest.add(fs::path(opts.out_override) / "metrics.json");
    manifest.write();
  }
  return 0;
}

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace ghostqc::cli
