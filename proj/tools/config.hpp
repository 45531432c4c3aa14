#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "ghostqc/qcsgi.hpp"

namespace ghostqc::cli {

// Exit codes: 0 success, 2 config error, 3 input error, 4 numerical failure.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string object_image;  // file path or builtin:<kind>:<side>

  int patterns_count = 0;
  std::uint64_t patterns_seed = 0;

  std::optional<double> dsnr_db;
  std::optional<double> sigma;
  std::uint64_t detection_seed = 0;

  ModelConfig model;  // image_side filled in from the object/patterns
  std::uint64_t quantum_noise_seed = 0;

  TrainConfig train;

  std::string output_dir;

  nlohmann::json echo;  // the document as parsed
};

ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config_file(const std::string& path);

}  // namespace ghostqc::cli
