// Acceptance suite: one independently runnable criterion per number, each
// printing a single pass/fail line. Run all with no arguments or a single one
// with --criterion N.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "ghostqc/qcsgi.hpp"

using namespace ghostqc;

namespace {

// --- small shared helpers -----------------------------------------------------

ParamVector random_theta(const CircuitSpec& spec, Rng& rng) {
  ParamVector t;
  t.values.resize(spec.num_params());
  for (auto& v : t.values) v = rng.uniform(0.0, 2.0 * M_PI);
  return t;
}

std::vector<double> random_input(const CircuitSpec& spec, Rng& rng) {
  std::vector<double> z(spec.num_qubits);
  const double hi = spec.encoding == Encoding::AngleReupload ? 2.0 * M_PI : 1.0;
  for (auto& v : z) v = rng.uniform(0.0, hi);
  return z;
}

CircuitSpec random_spec(Rng& rng, int max_qubits, int max_layers) {
  CircuitSpec spec;
  spec.encoding = static_cast<Encoding>(rng.next_u64() % 3);
  spec.num_qubits = 1 + static_cast<int>(rng.next_u64() % max_qubits);
  spec.layers = 1 + static_cast<int>(rng.next_u64() % max_layers);
  spec.entangler = (rng.next_u64() % 2) ? Entangler::RzzParameterized : Entangler::CzFixed;
  spec.topology = (rng.next_u64() % 2) ? Topology::Circular : Topology::Linear;
  spec.haar_seed = rng.next_u64();
  if (spec.encoding == Encoding::Heisenberg) {
    spec.num_qubits = std::min(spec.num_qubits, max_qubits - 1);
    spec.num_qubits = std::max(spec.num_qubits, 1);
  }
  return spec;
}

double max_jac_diff(const FeatureJacobian& a, const FeatureJacobian& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
  }
  return worst;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

struct TrainOutcome {
  double ssim = 0.0;
  double dgi_ssim = 0.0;
};

// The desk-scale reconstruction protocol shared by criteria 5-8.
TrainOutcome run_reconstruction(int side, int m, int qubits, int layers, int iterations,
                                std::uint64_t seed, std::optional<double> dsnr,
                                std::optional<NoiseSpec> qnoise, std::uint64_t qnoise_seed) {
  const Image truth = make_fixture_object("glyph", side);
  const PatternSet patterns = generate_patterns(m, side, side, 100 + seed);
  BucketSignals buckets = forward_buckets(patterns, truth);
  if (dsnr) {
    double mean = 0.0;
    for (double v : buckets.values) mean += v;
    mean /= m;
    buckets = add_detection_noise(buckets, sigma_from_dsnr(mean, *dsnr), 500 + seed);
  }

  ModelConfig mc;
  mc.qubits_per_patch = qubits;
  mc.layers = layers;
  mc.image_side = side;
  mc.seed = seed;
  mc.noise = qnoise;
  HybridModel model = build_model(mc, m);

  TrainConfig tc;
  tc.max_iterations = iterations;
  tc.learning_rate = 0.002;
  tc.gain_calibration = true;
  tc.threads = 2;
  if (qnoise) {
    tc.backend = GradBackend::Psr;
    tc.noise_seed = qnoise_seed;
  }
  const TrainReport rep = train(model, buckets, patterns, tc, &truth);

  TrainOutcome out;
  out.ssim = rep.metrics->ssim;
  out.dgi_ssim = ssim(correlation_gi(patterns, buckets), truth);
  return out;
}

bool report(int criterion, bool pass, const std::string& detail) {
  std::printf("criterion %2d %s: %s\n", criterion, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  return pass;
}

char buf[512];

// --- criteria -------------------------------------------------------------------

// Parameter-shift vs finite differences (1e-5) and vs adjoint (1e-9) on 50
// random circuits with n <= 6, L <= 3.
bool criterion_1() {
  Rng rng(1001);
  double worst_fd = 0.0, worst_adj = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const CircuitSpec spec = random_spec(rng, 6, 3);
    const ParamVector theta = random_theta(spec, rng);
    const auto z = random_input(spec, rng);
    const Observable obs = Observable::default_z(spec.sim_qubits());
    const FeatureJacobian psr = psr_jacobian(spec, z, theta, obs, nullptr, nullptr, 2);
    const FeatureJacobian fd = finite_diff_jacobian(spec, z, theta, obs, 1e-4);
    const FeatureJacobian adj = adjoint_jacobian(spec, z, theta, obs);
    worst_fd = std::max(worst_fd, max_jac_diff(psr, fd));
    worst_adj = std::max(worst_adj, max_jac_diff(psr, adj));
  }
  std::snprintf(buf, sizeof(buf),
                "gradient correctness: max |psr-fd| = %.3g (< 1e-5), max |psr-adjoint| = %.3g "
                "(< 1e-9) over 50 random circuits",
                worst_fd, worst_adj);
  return report(1, worst_fd < 1e-5 && worst_adj < 1e-9, buf);
}

// Kraus completeness, full depolarization, and trajectory/density agreement.
bool criterion_2() {
  Rng rng(1002);
  double worst_completeness = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double rate = rng.uniform();
    for (const auto& ch : {KrausChannel::depolarizing(rate),
                           KrausChannel::amplitude_damping(rate),
                           KrausChannel::phase_damping(rate)}) {
      for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
          cdouble acc{0, 0};
          for (const auto& k : ch.operators) {
            for (int j = 0; j < 2; ++j) acc += std::conj(k[j * 2 + r]) * k[j * 2 + c];
          }
          const cdouble want = r == c ? cdouble{1, 0} : cdouble{0, 0};
          worst_completeness = std::max(worst_completeness, std::abs(acc - want));
        }
      }
    }
  }

  // lambda = 1 depolarizing on both qubits of random pure states: every
  // nontrivial Pauli expectation collapses to zero.
  double worst_pauli = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    StateVector psi = StateVector::zero_state(2);
    for (auto& a : psi.amplitudes) a = {rng.normal(), rng.normal()};
    psi.normalize();
    DensityMatrix rho = DensityMatrix::from_state(psi);
    rho = apply_channel_density(rho, KrausChannel::depolarizing(1.0), 0);
    rho = apply_channel_density(rho, KrausChannel::depolarizing(1.0), 1);
    for (int p = 1; p < 16; ++p) {
      const std::vector<Pauli> labels{static_cast<Pauli>(p / 4), static_cast<Pauli>(p % 4)};
      worst_pauli = std::max(worst_pauli, std::abs(pauli_expectation_density(rho, labels)));
    }
  }

  // Trajectory average vs the exact channel on a 2-qubit circuit.
  Rng traj_rng(2000);
  CircuitSpec spec;
  spec.num_qubits = 2;
  spec.layers = 2;
  spec.noise = NoiseSpec{ChannelKind::Depolarizing, 0.1};
  const ParamVector theta = random_theta(spec, traj_rng);
  const std::vector<double> z{1.0, 4.0};
  const Observable obs = Observable::default_z(2);
  const FeatureResult exact = run_features_density(spec, z, theta, obs);
  const int shots = 50000;
  std::vector<double> mean(2, 0.0), sq(2, 0.0);
  for (int s = 0; s < shots; ++s) {
    Rng shot = traj_rng.split(s);
    const FeatureResult f = run_features(spec, z, theta, obs, &shot);
    for (int i = 0; i < 2; ++i) {
      mean[i] += f.raw[i];
      sq[i] += f.raw[i] * f.raw[i];
    }
  }
  bool traj_ok = true;
  double worst_sigma = 0.0;
  for (int i = 0; i < 2; ++i) {
    mean[i] /= shots;
    const double var = std::max(sq[i] / shots - mean[i] * mean[i], 0.0);
    const double se = std::sqrt(var / shots);
    const double pull = std::abs(mean[i] - exact.raw[i]) / std::max(se, 1e-12);
    worst_sigma = std::max(worst_sigma, pull);
    if (std::abs(mean[i] - exact.raw[i]) > 3.0 * se + 1e-12) traj_ok = false;
  }

  std::snprintf(buf, sizeof(buf),
                "channel correctness: completeness defect %.3g (< 1e-12), max |<P>| at full "
                "depolarization %.3g (< 1e-12), trajectory pull %.2f sigma (< 3) at 50000 shots",
                worst_completeness, worst_pauli, worst_sigma);
  return report(2, worst_completeness < 1e-12 && worst_pauli < 1e-12 && traj_ok, buf);
}

// Two-qubit rotation decompositions vs an independent Taylor-series
// exponential, up to global phase.
bool criterion_3() {
  auto taylor_expm4 = [](std::array<cdouble, 16> a) {
    std::array<cdouble, 16> result{}, term{};
    for (int i = 0; i < 4; ++i) result[i * 4 + i] = term[i * 4 + i] = 1.0;
    for (int k = 1; k < 60; ++k) {
      std::array<cdouble, 16> next{};
      for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
          cdouble acc{0, 0};
          for (int j = 0; j < 4; ++j) acc += term[r * 4 + j] * a[j * 4 + c];
          next[r * 4 + c] = acc / static_cast<double>(k);
        }
      }
      term = next;
      for (int i = 0; i < 16; ++i) result[i] += term[i];
    }
    return result;
  };
  auto pauli_single = [](Pauli q) -> std::array<cdouble, 4> {
    switch (q) {
      case Pauli::X: return {cdouble{0, 0}, {1, 0}, {1, 0}, {0, 0}};
      case Pauli::Y: return {cdouble{0, 0}, {0, -1}, {0, 1}, {0, 0}};
      default: return {cdouble{1, 0}, {0, 0}, {0, 0}, {-1, 0}};
    }
  };

  Rng rng(1003);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double angle = rng.uniform(-2.0 * M_PI, 2.0 * M_PI);
    for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) {
      const auto s = pauli_single(p);
      std::array<cdouble, 16> gen{};
      for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
          gen[r * 4 + c] = cdouble{0, -angle / 2} * s[(r >> 1) * 2 + (c >> 1)] *
                           s[(r & 1) * 2 + (c & 1)];
        }
      }
      const auto expect = taylor_expm4(gen);
      const auto got = compose_two_qubit_sequence(two_qubit_rotation_decomposed(p, angle));
      worst = std::max(worst,
                       phase_aligned_distance(
                           std::vector<cdouble>(expect.begin(), expect.end()),
                           std::vector<cdouble>(got.begin(), got.end())));
    }
  }
  std::snprintf(buf, sizeof(buf),
                "decomposition equivalence: max phase-aligned deviation %.3g (< 1e-12) over 100 "
                "random angles x {XX, YY, ZZ}",
                worst);
  return report(3, worst < 1e-12, buf);
}

// Full-pipeline gradients vs central differences on the reduced model
// (16x16 image, 2-qubit patches, 2 layers).
bool criterion_4() {
  const Image truth = make_fixture_object("glyph", 16);
  const PatternSet patterns = generate_patterns(8, 16, 16, 1004);
  const BucketSignals buckets = forward_buckets(patterns, truth);
  ModelConfig mc;
  mc.qubits_per_patch = 2;
  mc.layers = 2;
  mc.image_side = 16;
  mc.seed = 1005;
  HybridModel model = build_model(mc, 8);

  const double mu = 1e-6;
  const double h = 1e-5;
  const LossResult base = loss(model, buckets, patterns, mu, true);
  const Gradients g = loss_gradients(model, base, buckets, patterns, mu, GradBackend::Psr);

  auto eval = [&]() { return loss(model, buckets, patterns, mu, true); };
  auto lrelu_signature = [](const nn::ForwardCache& c) {
    std::vector<bool> s;
    auto push = [&s](const std::vector<double>& v) {
      for (double x : v) s.push_back(x >= 0.0);
    };
    push(c.proj_pre);
    for (double x : c.stem_pre.data) s.push_back(x >= 0.0);
    for (const auto& b : c.down) {
      for (double x : b.pre1.data) s.push_back(x >= 0.0);
      for (double x : b.sum.data) s.push_back(x >= 0.0);
    }
    for (const auto& b : c.up) {
      for (double x : b.pre1.data) s.push_back(x >= 0.0);
      for (double x : b.sum.data) s.push_back(x >= 0.0);
    }
    return s;
  };

  double worst = 0.0;
  // Every quantum parameter.
  for (std::size_t p = 0; p < model.thetas.size(); ++p) {
    for (std::size_t k = 0; k < model.thetas[p].values.size(); ++k) {
      const double saved = model.thetas[p].values[k];
      model.thetas[p].values[k] = saved + h;
      const LossResult up = eval();
      model.thetas[p].values[k] = saved - h;
      const LossResult dn = eval();
      model.thetas[p].values[k] = saved;
      if (lrelu_signature(up.forward.cache) != lrelu_signature(dn.forward.cache)) continue;
      const double fd = (up.value - dn.value) / (2.0 * h);
      const double an = g.theta_grads[p][k];
      worst = std::max(worst, std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-3}));
    }
  }
  // Sampled classical parameters from every tensor.
  Rng pick(1006);
  int checked = 0;
  for (std::size_t t = 0; t < model.classical.tensors.size(); ++t) {
    auto& tensor = model.classical.tensors[t];
    for (int rep = 0; rep < 5; ++rep) {
      const std::size_t idx = pick.next_u64() % tensor.numel();
      const double saved = tensor.data[idx];
      tensor.data[idx] = saved + h;
      const LossResult up = eval();
      tensor.data[idx] = saved - h;
      const LossResult dn = eval();
      tensor.data[idx] = saved;
      if (lrelu_signature(up.forward.cache) != lrelu_signature(dn.forward.cache)) continue;
      const double fd = (up.value - dn.value) / (2.0 * h);
      const double an = g.classical_grads[t].data[idx];
      worst = std::max(worst, std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-3}));
      ++checked;
    }
  }
  std::snprintf(buf, sizeof(buf),
                "end-to-end gradient: max relative error %.3g (< 1e-4) over all quantum and %d "
                "sampled classical parameters",
                worst, checked);
  return report(4, worst < 1e-4 && checked > 40, buf);
}

// Reconstruction quality on the 32x32 glyph at M = 256.
bool criterion_5() {
  std::vector<double> qc, dgi;
  for (std::uint64_t seed : {1, 2, 3}) {
    const TrainOutcome out =
        run_reconstruction(32, 256, 8, 3, 500, seed, std::nullopt, std::nullopt, 0);
    qc.push_back(out.ssim);
    dgi.push_back(out.dgi_ssim);
  }
  const double med = median(qc), med_dgi = median(dgi);
  std::snprintf(buf, sizeof(buf),
                "reconstruction quality: median ssim %.4f (>= 0.8), baseline median %.4f, "
                "margin %.4f (>= 0.2)",
                med, med_dgi, med - med_dgi);
  return report(5, med >= 0.8 && med - med_dgi >= 0.2, buf);
}

// Median ssim nondecreasing in the sampling count.
bool criterion_6() {
  std::vector<double> medians;
  for (int m : {64, 128, 256}) {
    std::vector<double> vals;
    for (std::uint64_t seed : {1, 2, 3}) {
      vals.push_back(
          run_reconstruction(32, m, 8, 3, 500, seed, std::nullopt, std::nullopt, 0).ssim);
    }
    medians.push_back(median(vals));
  }
  const bool pass = medians[1] >= medians[0] - 0.05 && medians[2] >= medians[1] - 0.05;
  std::snprintf(buf, sizeof(buf),
                "sampling trend: median ssim %.4f (M=64) -> %.4f (M=128) -> %.4f (M=256), "
                "nondecreasing with slack 0.05",
                medians[0], medians[1], medians[2]);
  return report(6, pass, buf);
}

// Median ssim at dSNR 20 at least that at dSNR 12 (M = 256).
bool criterion_7() {
  std::vector<double> low, high;
  for (std::uint64_t seed : {1, 2, 3}) {
    low.push_back(run_reconstruction(32, 256, 8, 3, 500, seed, 12.0, std::nullopt, 0).ssim);
    high.push_back(run_reconstruction(32, 256, 8, 3, 500, seed, 20.0, std::nullopt, 0).ssim);
  }
  const double med_low = median(low), med_high = median(high);
  std::snprintf(buf, sizeof(buf),
                "dsnr trend: median ssim %.4f at 20 dB >= %.4f at 12 dB (M=256)", med_high,
                med_low);
  return report(7, med_high >= med_low, buf);
}

// Depolarizing rate 0.01 after each entangler vs the noiseless same-seed run.
bool criterion_8() {
  const TrainOutcome clean =
      run_reconstruction(32, 128, 8, 3, 500, 1, std::nullopt, std::nullopt, 0);
  const TrainOutcome noisy = run_reconstruction(
      32, 128, 8, 3, 500, 1, std::nullopt, NoiseSpec{ChannelKind::Depolarizing, 0.01}, 901);
  const double diff = std::abs(clean.ssim - noisy.ssim);
  std::snprintf(buf, sizeof(buf),
                "quantum-noise resilience: noiseless ssim %.4f vs depolarizing-0.01 ssim %.4f, "
                "|difference| %.4f (<= 0.1)",
                clean.ssim, noisy.ssim, diff);
  return report(8, diff <= 0.1, buf);
}

// Gradient variance of the first local parameter stays above 1e-4 across the
// qubit/layer grid under the physics loss.
bool criterion_9() {
  BpExperimentConfig cfg;
  cfg.object = make_fixture_object("glyph", 32);
  cfg.patterns_seed = 20;
  cfg.trials = 100;
  cfg.seed = 21;
  cfg.threads = 2;
  const std::vector<int> qubits{4, 8, 12};
  const std::vector<int> layers{5, 20, 50};
  const BpVarianceTable t = bp_variance_experiment(cfg, qubits, layers);
  double lowest = 1e300;
  for (double v : t.local_variance) lowest = std::min(lowest, v);
  std::snprintf(buf, sizeof(buf),
                "barren-plateau proxy: min gradient variance %.3g (>= 1e-4) over qubits "
                "{4,8,12} x layers {5,20,50}, 100 trials each",
                lowest);
  return report(9, lowest >= 1e-4, buf);
}

// Substitute linear layer parameter counts match the published table.
bool criterion_10() {
  const std::vector<std::pair<int, long>> table{
      {64, 4160}, {128, 16512}, {256, 65792}, {512, 262656}, {1024, 1049600}};
  bool pass = true;
  for (const auto& [m, expect] : table) {
    nn::NetConfig cfg;
    cfg.feature_len = m;
    cfg.image_side = 64;
    cfg.front_linear = true;
    const nn::ClassicalParams p = nn::make_params(cfg);
    if (p.front_count() != expect || p.front_count() != static_cast<long>(m) * m + m) {
      pass = false;
    }
  }
  std::snprintf(buf, sizeof(buf),
                "parameter counts: substitute layer equals M^2+M = {4160, 16512, 65792, 262656, "
                "1049600} for M in {64,...,1024}");
  return report(10, pass, buf);
}

// Metric fixtures vs independent direct-formula evaluations.
bool criterion_11() {
  Rng rng(1011);
  Image a = Image::zeros(16, 16);
  for (auto& v : a.values) v = rng.uniform();
  Image b = a;
  for (auto& v : b.values) v = std::clamp(v + rng.normal(0.0, 0.1), 0.0, 1.0);

  // Independent direct-formula SSIM.
  const int win = 11;
  const double sigma = 1.5, c1 = 1e-4, c2 = 9e-4;
  std::vector<double> w(win * win);
  double norm = 0.0;
  for (int y = 0; y < win; ++y) {
    for (int x = 0; x < win; ++x) {
      const double dy = y - 5.0, dx = x - 5.0;
      w[y * win + x] = std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma));
      norm += w[y * win + x];
    }
  }
  for (auto& v : w) v /= norm;
  double acc = 0.0;
  int count = 0;
  for (int oy = 0; oy + win <= 16; ++oy) {
    for (int ox = 0; ox + win <= 16; ++ox) {
      double ex = 0, ey = 0, exx = 0, eyy = 0, exy = 0;
      for (int y = 0; y < win; ++y) {
        for (int x = 0; x < win; ++x) {
          const double va = a.at(oy + y, ox + x), vb = b.at(oy + y, ox + x);
          const double ww = w[y * win + x];
          ex += ww * va;
          ey += ww * vb;
          exx += ww * va * va;
          eyy += ww * vb * vb;
          exy += ww * va * vb;
        }
      }
      acc += ((2 * ex * ey + c1) * (2 * (exy - ex * ey) + c2)) /
             ((ex * ex + ey * ey + c1) * ((exx - ex * ex) + (eyy - ey * ey) + c2));
      ++count;
    }
  }
  const double oracle_ssim = acc / count;

  double mse = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    mse += (a.values[i] - b.values[i]) * (a.values[i] - b.values[i]);
  }
  mse /= a.values.size();
  const double oracle_psnr = 10.0 * std::log10(1.0 / mse);

  const double dssim = std::abs(ssim(a, b) - oracle_ssim);
  const double dpsnr = std::abs(psnr(a, b) - oracle_psnr);
  const bool caps = ssim(a, a) == 1.0 && psnr(a, a) == 100.0;
  std::snprintf(buf, sizeof(buf),
                "metric correctness: |ssim - oracle| = %.3g, |psnr - oracle| = %.3g (< 1e-9); "
                "identical images give ssim 1 and the 100 dB cap",
                dssim, dpsnr);
  return report(11, dssim < 1e-9 && dpsnr < 1e-9 && caps, buf);
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[i + 1]);
    }
  }
  const std::vector<std::function<bool()>> criteria{
      criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
      criterion_7, criterion_8, criterion_9, criterion_10, criterion_11};
  bool all_pass = true;
  for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) {
    if (only != 0 && i != only) continue;
    all_pass = criteria[i - 1]() && all_pass;
  }
  return all_pass ? 0 : 1;
}
