#include "config.hpp"

#include <fstream>
#include <set>

namespace ghostqc::cli {

namespace {

void reject_unknown(const nlohmann::json& obj, const std::string& where,
                    const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      throw ConfigError("unknown key \"" + key + "\" in " + where);
    }
  }
}

const nlohmann::json& need(const nlohmann::json& obj, const std::string& where,
                           const std::string& key) {
  if (!obj.contains(key)) throw ConfigError(where + " is missing required key \"" + key + "\"");
  return obj.at(key);
}

template <typename T>
T get_as(const nlohmann::json& obj, const std::string& where, const std::string& key) {
  try {
    return need(obj, where, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(where + "." + key + " has the wrong type: " + e.what());
  }
}

template <typename T>
T get_or(const nlohmann::json& obj, const std::string& where, const std::string& key,
         T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(where + "." + key + " has the wrong type: " + e.what());
  }
}

}  // namespace

ExperimentConfig parse_config(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("config document must be a JSON object");
  reject_unknown(doc, "config",
                 {"object", "patterns", "detection", "model", "quantum_noise", "train", "output"});

  ExperimentConfig cfg;
  cfg.echo = doc;

  const auto& object = need(doc, "config", "object");
  reject_unknown(object, "object", {"image"});
  cfg.object_image = get_as<std::string>(object, "object", "image");

  const auto& patterns = need(doc, "config", "patterns");
  reject_unknown(patterns, "patterns", {"count", "seed"});
  cfg.patterns_count = get_as<int>(patterns, "patterns", "count");
  cfg.patterns_seed = get_as<std::uint64_t>(patterns, "patterns", "seed");
  if (cfg.patterns_count < 1) throw ConfigError("patterns.count must be at least 1");

  const auto& detection = need(doc, "config", "detection");
  reject_unknown(detection, "detection", {"dsnr_db", "sigma", "seed"});
  cfg.detection_seed = get_as<std::uint64_t>(detection, "detection", "seed");
  if (detection.contains("dsnr_db") && detection.contains("sigma")) {
    throw ConfigError("detection takes either dsnr_db or sigma, not both");
  }
  if (detection.contains("dsnr_db")) cfg.dsnr_db = detection.at("dsnr_db").get<double>();
  if (detection.contains("sigma")) {
    cfg.sigma = detection.at("sigma").get<double>();
    if (*cfg.sigma < 0.0) throw ConfigError("detection.sigma must be nonnegative");
  }

  const auto& model = need(doc, "config", "model");
  reject_unknown(model, "model",
                 {"encoding", "qubits_per_patch", "layers", "entangler", "topology", "sharing",
                  "trainable_weights", "trotter_steps", "evolution_time", "init_scale", "seed"});
  try {
    cfg.model.encoding = encoding_from_string(get_as<std::string>(model, "model", "encoding"));
    cfg.model.entangler = entangler_from_string(get_as<std::string>(model, "model", "entangler"));
    cfg.model.topology = topology_from_string(get_as<std::string>(model, "model", "topology"));
    cfg.model.sharing = sharing_from_string(get_as<std::string>(model, "model", "sharing"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
  cfg.model.qubits_per_patch = get_as<int>(model, "model", "qubits_per_patch");
  cfg.model.layers = get_as<int>(model, "model", "layers");
  cfg.model.trainable_weights = get_or<bool>(model, "model", "trainable_weights", false);
  cfg.model.trotter_steps = get_or<int>(model, "model", "trotter_steps", 3);
  cfg.model.evolution_time = get_or<double>(model, "model", "evolution_time", -1.0);
  cfg.model.init_scale = get_or<double>(model, "model", "init_scale", 0.1);
  cfg.model.seed = get_as<std::uint64_t>(model, "model", "seed");
  if (cfg.model.qubits_per_patch < 1) throw ConfigError("model.qubits_per_patch must be positive");
  if (cfg.model.layers < 1) throw ConfigError("model.layers must be at least 1");

  if (doc.contains("quantum_noise")) {
    const auto& noise = doc.at("quantum_noise");
    reject_unknown(noise, "quantum_noise", {"kind", "rate", "seed"});
    const std::string kind = get_as<std::string>(noise, "quantum_noise", "kind");
    const double rate = get_or<double>(noise, "quantum_noise", "rate", 0.0);
    if (kind != "none") {
      NoiseSpec spec;
      try {
        spec.kind = channel_kind_from_string(kind);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("quantum_noise: ") + e.what());
      }
      spec.rate = rate;
      if (rate < 0.0 || rate > 1.0) throw ConfigError("quantum_noise.rate must be in [0,1]");
      if (rate > 0.0) {
        cfg.model.noise = spec;
        cfg.quantum_noise_seed = get_as<std::uint64_t>(noise, "quantum_noise", "seed");
      }
    }
  }

  const auto& train = need(doc, "config", "train");
  reject_unknown(train, "train",
                 {"iterations", "mse_threshold", "grad_threshold", "learning_rate", "tv_weight",
                  "gain", "backend"});
  cfg.train.max_iterations = get_as<int>(train, "train", "iterations");
  cfg.train.mse_threshold = get_or<double>(train, "train", "mse_threshold", 0.0);
  cfg.train.grad_threshold = get_or<double>(train, "train", "grad_threshold", 0.0);
  cfg.train.learning_rate = get_or<double>(train, "train", "learning_rate", 0.05);
  cfg.train.tv_weight = get_or<double>(train, "train", "tv_weight", 1e-6);
  cfg.train.gain_calibration = get_or<bool>(train, "train", "gain", true);
  try {
    cfg.train.backend =
        backend_from_string(get_or<std::string>(train, "train", "backend", "adjoint"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("train: ") + e.what());
  }
  cfg.train.noise_seed = cfg.quantum_noise_seed;
  try {
    cfg.train.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("train: ") + e.what());
  }
  if (cfg.model.noise && cfg.train.backend == GradBackend::Adjoint) {
    throw ConfigError("quantum noise requires train.backend = \"psr\"");
  }

  const auto& output = need(doc, "config", "output");
  reject_unknown(output, "output", {"dir"});
  cfg.output_dir = get_as<std::string>(output, "output", "dir");
  if (cfg.output_dir.empty()) throw ConfigError("output.dir must not be empty");

  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_config(doc);
}

}  // namespace ghostqc::cli
