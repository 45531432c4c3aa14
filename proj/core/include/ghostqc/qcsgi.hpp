#pragma once

#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ghostqc/imaging.hpp"
#include "ghostqc/nn.hpp"
#include "ghostqc/qcircuit.hpp"
#include "ghostqc/qgrad.hpp"

namespace ghostqc {

enum class Sharing { SharedParams, IndependentParams };
enum class GradBackend { Adjoint, Psr };

std::string to_string(Sharing s);
std::string to_string(GradBackend b);
Sharing sharing_from_string(const std::string& s);
GradBackend backend_from_string(const std::string& s);

// Splits the M-bucket vector into contiguous n-qubit chunks, zero-padding the
// tail.
struct PatchPlan {
  int qubits_per_patch = 16;
  int num_patches = 0;
  int padding = 0;
  Sharing sharing = Sharing::IndependentParams;

  static PatchPlan for_buckets(int num_buckets, int qubits_per_patch, Sharing sharing);
};

// The hybrid network: per-patch quantum circuits feeding the classical
// reconstruction trunk. num_patches == 0 selects the classical-baseline
// variant where a linear front layer replaces the quantum stage.
struct HybridModel {
  CircuitSpec circuit;
  PatchPlan plan;
  std::vector<ParamVector> thetas;  // one entry when parameters are shared
  Observable observable;
  std::vector<double> obs_weights;  // live per-term weights (all 1 by default)
  bool trainable_weights = false;
  nn::ClassicalParams classical;
  std::uint64_t model_seed = 0;

  bool has_quantum() const { return plan.num_patches > 0; }
  int features_per_patch() const { return observable.num_features(); }
  int total_features() const;
  long quantum_param_count() const;
};

struct ModelConfig {
  Encoding encoding = Encoding::AngleReupload;
  int qubits_per_patch = 16;
  int layers = 5;
  Entangler entangler = Entangler::CzFixed;
  Topology topology = Topology::Linear;
  Sharing sharing = Sharing::IndependentParams;
  bool trainable_weights = false;
  int trotter_steps = 3;
  double evolution_time = -1.0;
  std::optional<NoiseSpec> noise;
  int image_side = 64;
  double init_scale = 0.1;
  std::uint64_t seed = 0;
};

HybridModel build_model(const ModelConfig& config, int num_buckets);
// Classical baseline: linear M -> M front layer instead of the circuits.
HybridModel build_baseline_model(int num_buckets, int image_side, std::uint64_t seed);

// Min-max map of the bucket vector into the encoding's input range
// ([0,2pi] for angle re-uploading, [0,1] otherwise); constant input maps to
// all zeros.
std::vector<double> normalize_input(const std::vector<double>& buckets, Encoding encoding);
std::vector<double> normalize_input(const std::vector<double>& buckets, double lo, double hi);

std::vector<std::vector<double>> split_patches(const std::vector<double>& z,
                                               const PatchPlan& plan);

struct HybridForward {
  nn::Tensor image;                             // [S,S], values in [0,1]
  std::vector<double> features;                 // weighted, concatenated
  std::vector<std::vector<double>> raw_per_patch;
  nn::ForwardCache cache;
};

// noise_rng is required when the circuit spec carries noise; evaluation k of
// patch p draws from deterministic splits so results do not depend on thread
// count.
HybridForward hybrid_forward(const HybridModel& model, const std::vector<double>& buckets,
                             Rng* noise_rng = nullptr, RunStats* stats = nullptr,
                             int threads = 1);

struct LossResult {
  double value = 0.0;
  double data_term = 0.0;
  double tv_term = 0.0;
  double gain = 1.0;                      // beta*, held constant in gradients
  std::vector<double> estimated_buckets;  // I' before gain
  HybridForward forward;
};

// L = sum_j (I_j - beta I'_j)^2 + mu ||Y||_TV with I' = H Y and the optional
// closed-form least-squares gain beta = (I.I')/||I'||^2.
LossResult loss(const HybridModel& model, const BucketSignals& buckets,
                const PatternSet& patterns, double tv_weight, bool gain_calibration,
                Rng* noise_rng = nullptr, RunStats* stats = nullptr, int threads = 1);

struct Gradients {
  std::vector<std::vector<double>> theta_grads;  // aligned with model.thetas
  std::vector<nn::Tensor> classical_grads;       // aligned with classical.tensors
  std::vector<double> weight_grads;              // empty unless trainable
  double squared_norm = 0.0;
};

Gradients loss_gradients(const HybridModel& model, const LossResult& state,
                         const BucketSignals& buckets, const PatternSet& patterns,
                         double tv_weight, GradBackend backend, Rng* noise_rng = nullptr,
                         RunStats* stats = nullptr, int threads = 1);

struct TrainConfig {
  int max_iterations = 1000;
  double mse_threshold = 0.0;
  double grad_threshold = 0.0;  // on the squared gradient norm
  double learning_rate = 0.05;
  double tv_weight = 1e-6;
  bool gain_calibration = true;
  GradBackend backend = GradBackend::Adjoint;
  int threads = 1;
  std::uint64_t noise_seed = 0;

  void validate() const;
};

enum class StopReason { MseThreshold, GradThreshold, MaxIterations };
std::string to_string(StopReason r);

struct TrainMetrics {
  double psnr_db = 0.0;
  double ssim = 0.0;
};

struct TrainReport {
  std::vector<double> loss_trace;
  std::vector<double> grad_norm_trace;  // squared norms
  int iterations = 0;
  StopReason stop_reason = StopReason::MaxIterations;
  double best_loss = 0.0;
  Image best_image;
  double wall_seconds = 0.0;  // reported separately, not serialized
  std::optional<TrainMetrics> metrics;

  nlohmann::json to_json(const nlohmann::json& config_echo) const;
};

// Algorithm: Adam on (theta, nu[, w]) through the physics loss; loops while
// the loss and squared gradient norm stay above their thresholds and fewer
// than max_iterations steps ran. Returns the best-loss iterate.
TrainReport train(HybridModel& model, const BucketSignals& buckets,
                  const PatternSet& patterns, const TrainConfig& config,
                  const Image* ground_truth = nullptr);

// --- barren-plateau variance experiment ----------------------------------------

struct BpExperimentConfig {
  Image object;
  std::uint64_t patterns_seed = 1;
  Encoding encoding = Encoding::AngleReupload;
  Entangler entangler = Entangler::CzFixed;
  Topology topology = Topology::Linear;
  int trials = 100;
  std::uint64_t seed = 0;
  double tv_weight = 1e-6;
  bool gain_calibration = false;
  int threads = 1;
};

struct BpVarianceTable {
  std::vector<int> qubit_grid;
  std::vector<int> layer_grid;
  // Row-major (layers x qubits) sample variances of dL/dtheta over the
  // trials; entanglement table only for parameterized entanglers.
  std::vector<double> local_variance;
  std::vector<double> entanglement_variance;

  double local_at(int layer_idx, int qubit_idx) const;
  double entanglement_at(int layer_idx, int qubit_idx) const;
};

// For each (qubits, layers) cell: draw `trials` random circuits
// (theta ~ U[0,2pi], fresh Xavier classical weights) on a fixed simulated
// instance with M = qubits buckets, and record the variance of the gradient
// of the physics loss over the first local parameter of layer 1 (and the
// first entangling parameter when present).
BpVarianceTable bp_variance_experiment(const BpExperimentConfig& config,
                                       const std::vector<int>& qubits,
                                       const std::vector<int>& layers);

}  // namespace ghostqc
