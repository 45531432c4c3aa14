#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"

using namespace ghostqc::cli;

namespace {

std::vector<double> parse_value_list(const std::string& csv) {
  std::vector<double> values;
  std::stringstream ss(csv);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (cell.empty()) continue;
    try {
      values.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw ConfigError("bad numeric list entry: " + cell);
    }
  }
  return values;
}

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> values;
  for (double v : parse_value_list(csv)) values.push_back(static_cast<int>(v));
  return values;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Untrained hybrid quantum-classical reconstruction for computational "
               "ghost imaging"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  std::string config_path;
  CommandOptions opts;
  std::uint64_t seed_flag = 0;
  bool seed_given = false;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    if (needs_config) {
      sub->add_option("--config", config_path, "experiment config JSON")->required();
    }
    sub->add_option("--threads", opts.threads,
                    "worker threads (0: GHOSTQC_THREADS env or hardware)");
    sub->add_option("--out", opts.out_override, "override output.dir");
    sub->add_option("--seed", seed_flag, "override model.seed")
        ->each([&](const std::string&) { seed_given = true; });
  };

  auto* simulate = app.add_subcommand("simulate", "synthesize patterns and bucket signals");
  add_common(simulate, true);

  auto* reconstruct = app.add_subcommand("reconstruct", "reconstruct an image from buckets");
  std::string method = "qcsgi";
  reconstruct->add_option("--method", method, "qcsgi | cnn | dgi | tvcs");
  add_common(reconstruct, true);

  auto* sweep = app.add_subcommand("sweep", "run a reconstruction sweep over one axis");
  std::string axis, values_csv, sweep_method = "qcsgi";
  int replicates = 1;
  sweep->add_option("--axis", axis, "measurements | dsnr | quantum_noise")->required();
  sweep->add_option("--values", values_csv, "comma-separated axis values")->required();
  sweep->add_option("--method", sweep_method, "reconstruction method per cell");
  sweep->add_option("--seeds", replicates, "seed replicates per cell");
  add_common(sweep, true);

  auto* bp = app.add_subcommand("bp-variance", "gradient-variance table over a circuit grid");
  std::string qubits_csv = "4,8,12", layers_csv = "5,20,50";
  int trials = 100;
  bp->add_option("--qubits", qubits_csv, "comma-separated qubit counts");
  bp->add_option("--layers", layers_csv, "comma-separated layer counts");
  bp->add_option("--trials", trials, "random circuits per cell");
  add_common(bp, true);

  auto* metrics = app.add_subcommand("metrics", "PSNR/SSIM between two images");
  std::string image_a, image_b;
  metrics->add_option("image_a", image_a, "first image (.csv/.pgm/builtin:)")->required();
  metrics->add_option("image_b", image_b, "second image")->required();
  add_common(metrics, false);

  CLI11_PARSE(app, argc, argv);
  if (seed_given) opts.seed_override = seed_flag;

  return run_guarded([&]() -> int {
    if (simulate->parsed()) return cmd_simulate(load_config_file(config_path), opts);
    if (reconstruct->parsed()) {
      return cmd_reconstruct(load_config_file(config_path), method, opts);
    }
    if (sweep->parsed()) {
      return cmd_sweep(load_config_file(config_path), axis, parse_value_list(values_csv),
                       sweep_method, replicates, opts);
    }
    if (bp->parsed()) {
      return cmd_bp_variance(load_config_file(config_path), parse_int_list(qubits_csv),
                             parse_int_list(layers_csv), trials, opts);
    }
    if (metrics->parsed()) return cmd_metrics(image_a, image_b, opts);
    return 2;
  });
}
