#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ghostqc/rng.hpp"

namespace ghostqc::nn {

struct Tensor {
  std::vector<int> shape;
  std::vector<double> data;  // row-major

  static Tensor zeros(std::vector<int> shape);
  std::size_t numel() const { return data.size(); }
  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }
};

double leaky_relu(double x, double slope = 0.2);
// Derivative; taken as 1 at x == 0.
double leaky_relu_deriv(double x, double slope = 0.2);

// Geometry of the reconstruction network. The trunk downsamples the
// image_side x image_side plane to a bottleneck (4x4 at side 64, 2x2 below)
// through residual stride-2 blocks with channels 8 -> 16 -> 32 -> 32 -> ...,
// then mirrors back up and ends in a 1-channel sigmoid head.
struct NetConfig {
  int feature_len = 64;
  int image_side = 64;
  bool front_linear = false;  // classical-baseline substitute for the quantum stage

  int bottleneck_side() const { return image_side >= 64 ? 4 : 2; }
  int num_blocks() const;
  std::vector<int> channel_schedule() const;  // stem out + per-down-block out
  void validate() const;
};

// All trainable tensors in declaration order, plus the index bookkeeping the
// forward pass needs.
struct ClassicalParams {
  struct BlockIdx {
    int w1 = -1, b1 = -1, w2 = -1, b2 = -1, sw = -1, sb = -1;
    int in_ch = 0, out_ch = 0;
  };

  NetConfig config;
  std::vector<Tensor> tensors;
  std::vector<std::string> names;

  int front_w = -1, front_b = -1;
  int proj_w = -1, proj_b = -1;
  int stem_w = -1, stem_b = -1;
  std::vector<BlockIdx> down, up;
  int out_w = -1, out_b = -1;

  long total_count() const;
  long front_count() const;  // M^2 + M when the substitute layer is present
  long proj_count() const;
  long trunk_count() const;  // stem through output head
};

// Builds the tensor layout with zero-filled parameters.
ClassicalParams make_params(const NetConfig& config);
// Xavier-style init: weights ~ N(0, 2/(fan_in+fan_out)), biases zero.
ClassicalParams init_params(const NetConfig& config, Rng& rng);

// Quantum-angle init: N(0, n_q) draws scaled by `scale` (0.1 or 0.01).
std::vector<double> init_quantum_params(int count, int n_q, double scale, Rng& rng);

struct BlockCache {
  Tensor input;      // block input
  Tensor upsampled;  // up blocks only
  Tensor pre1, act1; // conv1 pre-activation and activation
  Tensor pre2;       // conv2 output
  Tensor skip_out;
  Tensor sum;        // pre final activation
};

struct ForwardCache {
  std::vector<double> features;
  std::vector<double> front_pre, front_act;
  std::vector<double> proj_pre;
  Tensor proj_act;   // [1,S,S]
  Tensor stem_pre, stem_act;
  std::vector<BlockCache> down, up;
  Tensor head_in;    // activation feeding the output conv
  Tensor out_pre;    // [1,S,S]
  Tensor output;     // [S,S] after sigmoid
};

// Maps the feature vector to an image in [0,1]; fills `cache` when non-null
// (required for backward).
Tensor forward(const ClassicalParams& params, const std::vector<double>& features,
               ForwardCache* cache = nullptr);

struct BackwardResult {
  std::vector<double> feature_grad;
  std::vector<Tensor> param_grads;  // aligned with ClassicalParams::tensors
};

BackwardResult backward(const ClassicalParams& params, const ForwardCache& cache,
                        const Tensor& output_grad);

// --- optimizer ---------------------------------------------------------------

struct AdamConfig {
  double learning_rate = 0.05;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  long step = 0;
  std::vector<std::size_t> sizes;
  std::vector<std::vector<double>> m, v;

  static AdamState for_sizes(const std::vector<std::size_t>& sizes);
};

// Standard bias-corrected Adam over parameter groups; params[i] and grads[i]
// must point at state.sizes[i] doubles.
void adam_step(AdamState& state, const AdamConfig& config,
               const std::vector<double*>& params, const std::vector<const double*>& grads);

// --- checkpoints ---------------------------------------------------------------

// Single-file format: one line of JSON (header), newline, then the blocks as
// little-endian IEEE-754 doubles in declaration order.
void checkpoint_save(const std::string& path, const nlohmann::json& header,
                     const std::vector<const Tensor*>& blocks);

struct Checkpoint {
  nlohmann::json header;
  std::vector<Tensor> blocks;
};
Checkpoint checkpoint_load(const std::string& path);

}  // namespace ghostqc::nn
