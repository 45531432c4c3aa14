#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace ghostqc::cli {

struct CommandOptions {
  int threads = 0;  // 0: GHOSTQC_THREADS env or hardware
  std::string out_override;
  std::optional<std::uint64_t> seed_override;  // replaces model.seed
};

int cmd_simulate(const ExperimentConfig& cfg, const CommandOptions& opts);

int cmd_reconstruct(const ExperimentConfig& cfg, const std::string& method,
                    const CommandOptions& opts);

int cmd_sweep(const ExperimentConfig& cfg, const std::string& axis,
              const std::vector<double>& values, const std::string& method, int replicates,
              const CommandOptions& opts);

int cmd_bp_variance(const ExperimentConfig& cfg, const std::vector<int>& qubits,
                    const std::vector<int>& layers, int trials, const CommandOptions& opts);

int cmd_metrics(const std::string& image_a, const std::string& image_b,
                const CommandOptions& opts);

// Maps an exception to the documented exit code and prints the message.
int run_guarded(const std::function<int()>& body);

extern const char* kToolVersion;

}  // namespace ghostqc::cli
