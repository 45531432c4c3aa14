#include "ghostqc/qcsgi.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "ghostqc/parallel.hpp"

namespace ghostqc {

std::string to_string(Sharing s) {
  return s == Sharing::SharedParams ? "shared_params" : "independent_params";
}
std::string to_string(GradBackend b) { return b == GradBackend::Adjoint ? "adjoint" : "psr"; }

Sharing sharing_from_string(const std::string& s) {
  if (s == "shared_params") return Sharing::SharedParams;
  if (s == "independent_params") return Sharing::IndependentParams;
  throw std::invalid_argument("unknown sharing: " + s);
}
GradBackend backend_from_string(const std::string& s) {
  if (s == "adjoint") return GradBackend::Adjoint;
  if (s == "psr") return GradBackend::Psr;
  throw std::invalid_argument("unknown gradient backend: " + s);
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::MseThreshold: return "mse_threshold";
    case StopReason::GradThreshold: return "grad_threshold";
    case StopReason::MaxIterations: return "max_iterations";
  }
  return "?";
}

PatchPlan PatchPlan::for_buckets(int num_buckets, int qubits_per_patch, Sharing sharing) {
  if (num_buckets < 1) throw std::invalid_argument("need at least one bucket");
  if (qubits_per_patch < 1) throw std::invalid_argument("patch width must be positive");
  PatchPlan plan;
  plan.qubits_per_patch = qubits_per_patch;
  plan.num_patches = (num_buckets + qubits_per_patch - 1) / qubits_per_patch;
  plan.padding = plan.num_patches * qubits_per_patch - num_buckets;
  plan.sharing = sharing;
  return plan;
}

int HybridModel::total_features() const {
  return has_quantum() ? plan.num_patches * features_per_patch() : classical.config.feature_len;
}

long HybridModel::quantum_param_count() const {
  long n = 0;
  for (const auto& t : thetas) n += static_cast<long>(t.values.size());
  return n;
}

HybridModel build_model(const ModelConfig& config, int num_buckets) {
  HybridModel m;
  m.model_seed = config.seed;
  m.circuit.encoding = config.encoding;
  m.circuit.num_qubits = config.qubits_per_patch;
  m.circuit.layers = config.layers;
  m.circuit.entangler = config.entangler;
  m.circuit.topology = config.topology;
  m.circuit.trotter_steps = config.trotter_steps;
  m.circuit.evolution_time = config.evolution_time;
  m.circuit.noise = config.noise;
  m.circuit.validate();

  Rng rng(config.seed);
  if (config.encoding == Encoding::Heisenberg) {
    // Haar initial states are drawn once per model and fixed.
    m.circuit.haar_seed = rng.split(0xaa).next_u64();
  }

  m.plan = PatchPlan::for_buckets(num_buckets, config.qubits_per_patch, config.sharing);
  m.observable = Observable::default_z(m.circuit.sim_qubits());
  m.observable.trainable_weights = config.trainable_weights;
  m.trainable_weights = config.trainable_weights;
  m.obs_weights.assign(m.observable.terms.size(), 1.0);

  const int theta_count = m.plan.sharing == Sharing::SharedParams ? 1 : m.plan.num_patches;
  const int n_q = m.circuit.sim_qubits();
  for (int p = 0; p < theta_count; ++p) {
    Rng prng = rng.split(0x100 + static_cast<std::uint64_t>(p));
    ParamVector theta;
    theta.values =
        nn::init_quantum_params(m.circuit.num_params(), n_q, config.init_scale, prng);
    m.thetas.push_back(std::move(theta));
  }

  nn::NetConfig net;
  net.feature_len = m.plan.num_patches * m.observable.num_features();
  net.image_side = config.image_side;
  net.front_linear = false;
  Rng crng = rng.split(0x200);
  m.classical = nn::init_params(net, crng);
  return m;
}

HybridModel build_baseline_model(int num_buckets, int image_side, std::uint64_t seed) {
  HybridModel m;
  m.model_seed = seed;
  m.plan.num_patches = 0;
  m.plan.qubits_per_patch = 0;
  nn::NetConfig net;
  net.feature_len = num_buckets;
  net.image_side = image_side;
  net.front_linear = true;
  Rng rng(seed);
  Rng crng = rng.split(0x200);
  m.classical = nn::init_params(net, crng);
  return m;
}

std::vector<double> normalize_input(const std::vector<double>& buckets, double lo, double hi) {
  if (buckets.empty()) throw std::invalid_argument("empty bucket vector");
  const auto [min_it, max_it] = std::minmax_element(buckets.begin(), buckets.end());
  std::vector<double> z(buckets.size(), 0.0);
  const double span = *max_it - *min_it;
  if (span > 0.0) {
    for (std::size_t i = 0; i < buckets.size(); ++i) {
      z[i] = lo + (hi - lo) * (buckets[i] - *min_it) / span;
    }
  }
  return z;
}

std::vector<double> normalize_input(const std::vector<double>& buckets, Encoding encoding) {
  const double hi = encoding == Encoding::AngleReupload ? 2.0 * M_PI : 1.0;
  return normalize_input(buckets, 0.0, hi);
}

std::vector<std::vector<double>> split_patches(const std::vector<double>& z,
                                               const PatchPlan& plan) {
  if (static_cast<int>(z.size()) + plan.padding !=
      plan.num_patches * plan.qubits_per_patch) {
    throw std::invalid_argument("patch plan does not match input length");
  }
  std::vector<std::vector<double>> patches(plan.num_patches);
  for (int p = 0; p < plan.num_patches; ++p) {
    std::vector<double> chunk(plan.qubits_per_patch, 0.0);
    const int start = p * plan.qubits_per_patch;
    for (int i = 0; i < plan.qubits_per_patch; ++i) {
      const int src = start + i;
      if (src < static_cast<int>(z.size())) chunk[i] = z[src];
    }
    patches[p] = std::move(chunk);
  }
  return patches;
}

namespace {

const ParamVector& theta_for_patch(const HybridModel& m, int patch) {
  return m.plan.sharing == Sharing::SharedParams ? m.thetas[0] : m.thetas[patch];
}

bool noisy(const HybridModel& m) {
  return m.has_quantum() && m.circuit.noise && m.circuit.noise->rate > 0.0;
}

}  // namespace

HybridForward hybrid_forward(const HybridModel& model, const std::vector<double>& buckets,
                             Rng* noise_rng, RunStats* stats, int threads) {
  HybridForward fwd;
  if (model.has_quantum()) {
    if (noisy(model) && noise_rng == nullptr) {
      throw std::invalid_argument("noisy model evaluation requires a generator");
    }
    const auto z = normalize_input(buckets, model.circuit.encoding);
    const auto patches = split_patches(z, model.plan);
    const int f = model.features_per_patch();
    fwd.features.assign(static_cast<std::size_t>(model.plan.num_patches) * f, 0.0);
    fwd.raw_per_patch.resize(model.plan.num_patches);
    parallel_for(patches.size(), threads, [&](std::size_t p) {
      Rng patch_rng = noise_rng ? noise_rng->split(p) : Rng(0);
      const FeatureResult feats =
          run_features(model.circuit, patches[p], theta_for_patch(model, static_cast<int>(p)),
                       model.observable, noisy(model) ? &patch_rng : nullptr, stats);
      fwd.raw_per_patch[p] = feats.raw;
      for (int i = 0; i < f; ++i) {
        fwd.features[p * f + i] = model.obs_weights[i] * feats.raw[i];
      }
    });
  } else {
    fwd.features = normalize_input(buckets, 0.0, 1.0);
  }
  fwd.image = nn::forward(model.classical, fwd.features, &fwd.cache);
  return fwd;
}

LossResult loss(const HybridModel& model, const BucketSignals& buckets,
                const PatternSet& patterns, double tv_weight, bool gain_calibration,
                Rng* noise_rng, RunStats* stats, int threads) {
  if (buckets.count() != patterns.count) {
    throw std::invalid_argument("bucket count does not match patterns");
  }
  LossResult r;
  r.forward = hybrid_forward(model, buckets.values, noise_rng, stats, threads);

  const int side = model.classical.config.image_side;
  if (patterns.pixels() != side * side) {
    throw std::invalid_argument("pattern grid does not match model image side");
  }
  Image est = Image::zeros(side, side);
  est.values = r.forward.image.data;
  r.estimated_buckets = forward_buckets(patterns, est).values;

  if (gain_calibration) {
    double num = 0.0, den = 0.0;
    for (int j = 0; j < buckets.count(); ++j) {
      num += buckets.values[j] * r.estimated_buckets[j];
      den += r.estimated_buckets[j] * r.estimated_buckets[j];
    }
    r.gain = den > 0.0 ? num / den : 1.0;
  }

  for (int j = 0; j < buckets.count(); ++j) {
    const double res = buckets.values[j] - r.gain * r.estimated_buckets[j];
    r.data_term += res * res;
  }
  r.tv_term = tv_weight * tv_norm(side, side, r.forward.image.data);
  r.value = r.data_term + r.tv_term;
  return r;
}

Gradients loss_gradients(const HybridModel& model, const LossResult& state,
                         const BucketSignals& buckets, const PatternSet& patterns,
                         double tv_weight, GradBackend backend, Rng* noise_rng,
                         RunStats* stats, int threads) {
  if (state.forward.cache.output.data.empty()) {
    throw std::invalid_argument("loss_gradients needs a completed forward pass");
  }
  if (noisy(model) && backend == GradBackend::Adjoint) {
    throw std::invalid_argument("adjoint backend does not support noisy circuits");
  }
  const int side = model.classical.config.image_side;
  const int m = buckets.count();

  // dL/dY = -2 beta sum_j (I_j - beta I'_j) H_j + mu * dTV(Y).
  nn::Tensor output_grad = nn::Tensor::zeros({side, side});
  {
    const auto tvg = tv_gradient(side, side, state.forward.image.data);
    for (std::size_t i = 0; i < output_grad.data.size(); ++i) {
      output_grad.data[i] = tv_weight * tvg[i];
    }
    for (int j = 0; j < m; ++j) {
      const double res = buckets.values[j] - state.gain * state.estimated_buckets[j];
      const double coeff = -2.0 * state.gain * res;
      if (coeff == 0.0) continue;
      const std::uint8_t* row = patterns.row(j);
      for (int i = 0; i < side * side; ++i) {
        if (row[i]) output_grad.data[i] += coeff;
      }
    }
  }

  nn::BackwardResult back = nn::backward(model.classical, state.forward.cache, output_grad);

  Gradients g;
  g.classical_grads = std::move(back.param_grads);
  g.theta_grads.resize(model.thetas.size());
  for (std::size_t t = 0; t < model.thetas.size(); ++t) {
    g.theta_grads[t].assign(model.thetas[t].values.size(), 0.0);
  }
  if (model.trainable_weights) g.weight_grads.assign(model.obs_weights.size(), 0.0);

  if (model.has_quantum()) {
    const auto z = normalize_input(buckets.values, model.circuit.encoding);
    const auto patches = split_patches(z, model.plan);
    const int f = model.features_per_patch();

    std::vector<std::vector<double>> per_patch_theta(patches.size());
    parallel_for(patches.size(), threads, [&](std::size_t p) {
      const ParamVector& theta = theta_for_patch(model, static_cast<int>(p));
      FeatureJacobian jac;
      if (backend == GradBackend::Adjoint) {
        jac = adjoint_jacobian(model.circuit, patches[p], theta, model.observable);
      } else {
        Rng patch_rng = noise_rng ? noise_rng->split(0x1000 + p) : Rng(0);
        jac = psr_jacobian(model.circuit, patches[p], theta, model.observable,
                           noisy(model) ? &patch_rng : nullptr, stats);
      }
      std::vector<double> tg(theta.values.size(), 0.0);
      for (int i = 0; i < f; ++i) {
        const double chain = back.feature_grad[p * f + i] * model.obs_weights[i];
        if (chain == 0.0) continue;
        for (std::size_t k = 0; k < tg.size(); ++k) {
          tg[k] += chain * jac.at(i, static_cast<int>(k));
        }
      }
      per_patch_theta[p] = std::move(tg);
    });

    for (std::size_t p = 0; p < patches.size(); ++p) {
      auto& dst = g.theta_grads[model.plan.sharing == Sharing::SharedParams ? 0 : p];
      for (std::size_t k = 0; k < per_patch_theta[p].size(); ++k) {
        dst[k] += per_patch_theta[p][k];
      }
      if (model.trainable_weights) {
        for (int i = 0; i < f; ++i) {
          g.weight_grads[i] +=
              back.feature_grad[p * f + i] * state.forward.raw_per_patch[p][i];
        }
      }
    }
  }

  double sq = 0.0;
  for (const auto& tv : g.theta_grads) {
    for (double v : tv) sq += v * v;
  }
  for (const auto& t : g.classical_grads) {
    for (double v : t.data) sq += v * v;
  }
  for (double v : g.weight_grads) sq += v * v;
  g.squared_norm = sq;
  return g;
}

void TrainConfig::validate() const {
  if (max_iterations < 0) throw std::invalid_argument("iteration budget must be nonnegative");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (mse_threshold < 0.0 || grad_threshold < 0.0) {
    throw std::invalid_argument("stop thresholds must be nonnegative");
  }
  if (tv_weight < 0.0) throw std::invalid_argument("tv weight must be nonnegative");
}

nlohmann::json TrainReport::to_json(const nlohmann::json& config_echo) const {
  nlohmann::json j{
      {"loss_trace", loss_trace},
      {"grad_norm_trace", grad_norm_trace},
      {"iterations", iterations},
      {"stop_reason", to_string(stop_reason)},
      {"best_loss", best_loss},
      {"config", config_echo},
  };
  if (metrics) {
    j["metrics"] = {{"psnr_db", metrics->psnr_db}, {"ssim", metrics->ssim}};
  }
  return j;
}

TrainReport train(HybridModel& model, const BucketSignals& buckets,
                  const PatternSet& patterns, const TrainConfig& config,
                  const Image* ground_truth) {
  config.validate();
  const auto t_start = std::chrono::steady_clock::now();

  // Adam groups: thetas, classical tensors, then observable weights.
  std::vector<std::size_t> sizes;
  std::vector<double*> params;
  for (auto& theta : model.thetas) {
    sizes.push_back(theta.values.size());
    params.push_back(theta.values.data());
  }
  for (auto& t : model.classical.tensors) {
    sizes.push_back(t.data.size());
    params.push_back(t.data.data());
  }
  if (model.trainable_weights) {
    sizes.push_back(model.obs_weights.size());
    params.push_back(model.obs_weights.data());
  }
  nn::AdamState adam = nn::AdamState::for_sizes(sizes);
  nn::AdamConfig adam_cfg;
  adam_cfg.learning_rate = config.learning_rate;

  Rng noise_root(config.noise_seed);

  TrainReport report;
  report.best_loss = std::numeric_limits<double>::infinity();

  double last_loss = std::numeric_limits<double>::infinity();
  double last_sqnorm = std::numeric_limits<double>::infinity();
  int t = 0;
  for (;;) {
    if (!(last_loss > config.mse_threshold)) {
      report.stop_reason = StopReason::MseThreshold;
      break;
    }
    if (!(last_sqnorm > config.grad_threshold)) {
      report.stop_reason = StopReason::GradThreshold;
      break;
    }
    if (!(t < config.max_iterations)) {
      report.stop_reason = StopReason::MaxIterations;
      break;
    }

    Rng iter_rng = noise_root.split(static_cast<std::uint64_t>(t));
    LossResult ls = loss(model, buckets, patterns, config.tv_weight, config.gain_calibration,
                         &iter_rng, nullptr, config.threads);
    if (!std::isfinite(ls.value)) {
      throw std::runtime_error("non-finite loss at iteration " + std::to_string(t));
    }
    report.loss_trace.push_back(ls.value);
    if (ls.value < report.best_loss) {
      report.best_loss = ls.value;
      report.best_image = Image::zeros(model.classical.config.image_side,
                                       model.classical.config.image_side);
      report.best_image.values = ls.forward.image.data;
    }

    Rng grad_rng = iter_rng.split(0xfeed);
    Gradients g = loss_gradients(model, ls, buckets, patterns, config.tv_weight,
                                 config.backend, &grad_rng, nullptr, config.threads);
    report.grad_norm_trace.push_back(g.squared_norm);

    std::vector<const double*> grads;
    for (auto& tv : g.theta_grads) grads.push_back(tv.data());
    for (auto& gt : g.classical_grads) grads.push_back(gt.data.data());
    if (model.trainable_weights) grads.push_back(g.weight_grads.data());
    nn::adam_step(adam, adam_cfg, params, grads);

    last_loss = ls.value;
    last_sqnorm = g.squared_norm;
    ++t;
  }
  report.iterations = t;

  if (report.loss_trace.empty()) {
    // Zero executed iterations: report the initialization.
    Rng iter_rng = noise_root.split(0);
    LossResult ls = loss(model, buckets, patterns, config.tv_weight, config.gain_calibration,
                         &iter_rng, nullptr, config.threads);
    report.best_loss = ls.value;
    report.best_image =
        Image::zeros(model.classical.config.image_side, model.classical.config.image_side);
    report.best_image.values = ls.forward.image.data;
  }

  if (ground_truth != nullptr) {
    TrainMetrics m;
    m.psnr_db = psnr(report.best_image, *ground_truth);
    m.ssim = ssim(report.best_image, *ground_truth);
    report.metrics = m;
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return report;
}

// --- barren-plateau experiment ---------------------------------------------------

double BpVarianceTable::local_at(int layer_idx, int qubit_idx) const {
  return local_variance[static_cast<std::size_t>(layer_idx) * qubit_grid.size() + qubit_idx];
}
double BpVarianceTable::entanglement_at(int layer_idx, int qubit_idx) const {
  return entanglement_variance[static_cast<std::size_t>(layer_idx) * qubit_grid.size() +
                               qubit_idx];
}

namespace {

double population_variance(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  return var / static_cast<double>(xs.size());
}

}  // namespace

BpVarianceTable bp_variance_experiment(const BpExperimentConfig& config,
                                       const std::vector<int>& qubits,
                                       const std::vector<int>& layers) {
  if (config.trials < 1) throw std::invalid_argument("need at least one trial");
  BpVarianceTable table;
  table.qubit_grid = qubits;
  table.layer_grid = layers;
  const bool with_ent = config.entangler == Entangler::RzzParameterized;
  table.local_variance.assign(qubits.size() * layers.size(), 0.0);
  if (with_ent) table.entanglement_variance.assign(qubits.size() * layers.size(), 0.0);

  const int side = config.object.height;
  if (config.object.width != side) throw std::invalid_argument("object must be square");

  for (std::size_t li = 0; li < layers.size(); ++li) {
    for (std::size_t qi = 0; qi < qubits.size(); ++qi) {
      const int n = qubits[qi];
      const int depth = layers[li];

      // Fixed instance per qubit count: M = n buckets of the same object.
      const PatternSet patterns =
          generate_patterns(n, side, side, mix_seed(config.patterns_seed, n));
      const BucketSignals buckets = forward_buckets(patterns, config.object);

      CircuitSpec spec;
      spec.encoding = config.encoding;
      spec.num_qubits = n;
      spec.layers = depth;
      spec.entangler = config.entangler;
      spec.topology = config.topology;

      const Observable obs = Observable::default_z(spec.sim_qubits());
      const auto z = normalize_input(buckets.values, config.encoding);

      nn::NetConfig net;
      net.feature_len = obs.num_features();
      net.image_side = side;

      const std::size_t cell = li * qubits.size() + qi;
      std::vector<double> local_grads(config.trials, 0.0);
      std::vector<double> ent_grads(config.trials, 0.0);

      parallel_for(static_cast<std::size_t>(config.trials), config.threads,
                   [&](std::size_t trial) {
        Rng rng = Rng(config.seed).split(cell * 1000003 + trial);
        ParamVector theta;
        theta.values.resize(spec.num_params());
        for (auto& v : theta.values) v = rng.uniform(0.0, 2.0 * M_PI);
        Rng crng = rng.split(1);
        const nn::ClassicalParams classical = nn::init_params(net, crng);

        // Physics loss gradient dL/dh via the classical backward pass.
        const FeatureResult feats = run_features(spec, z, theta, obs);
        nn::ForwardCache cache;
        const nn::Tensor image = nn::forward(classical, feats.raw, &cache);

        Image est = Image::zeros(side, side);
        est.values = image.data;
        const auto est_buckets = forward_buckets(patterns, est).values;
        double gain = 1.0;
        if (config.gain_calibration) {
          double num = 0.0, den = 0.0;
          for (int j = 0; j < n; ++j) {
            num += buckets.values[j] * est_buckets[j];
            den += est_buckets[j] * est_buckets[j];
          }
          gain = den > 0.0 ? num / den : 1.0;
        }
        nn::Tensor output_grad = nn::Tensor::zeros({side, side});
        const auto tvg = tv_gradient(side, side, image.data);
        for (std::size_t i = 0; i < output_grad.data.size(); ++i) {
          output_grad.data[i] = config.tv_weight * tvg[i];
        }
        for (int j = 0; j < n; ++j) {
          const double res = buckets.values[j] - gain * est_buckets[j];
          const double coeff = -2.0 * gain * res;
          const std::uint8_t* row = patterns.row(j);
          for (int i = 0; i < side * side; ++i) {
            if (row[i]) output_grad.data[i] += coeff;
          }
        }
        const nn::BackwardResult back = nn::backward(classical, cache, output_grad);

        const auto chain = [&](int param_index) {
          const auto col = psr_column(spec, z, theta, obs, param_index);
          double g = 0.0;
          for (int i = 0; i < obs.num_features(); ++i) g += back.feature_grad[i] * col[i];
          return g;
        };
        local_grads[trial] = chain(spec.local_param_index(0, 0, 0));
        if (with_ent) ent_grads[trial] = chain(spec.entangling_param_index(0, 0));
      });

      table.local_variance[cell] = population_variance(local_grads);
      if (with_ent) table.entanglement_variance[cell] = population_variance(ent_grads);
    }
  }
  return table;
}

}  // namespace ghostqc
