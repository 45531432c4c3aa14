#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ghostqc/qgrad.hpp"

using namespace ghostqc;

namespace {

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

double max_abs_diff(const FeatureJacobian& a, const FeatureJacobian& b) {
  REQUIRE(a.values.size() == b.values.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
  }
  return worst;
}

CircuitSpec random_spec(Rng& rng, int max_qubits, int max_layers) {
  CircuitSpec spec;
  spec.encoding = static_cast<Encoding>(rng.next_u64() % 3);
  spec.num_qubits = 1 + static_cast<int>(rng.next_u64() % max_qubits);
  spec.layers = 1 + static_cast<int>(rng.next_u64() % max_layers);
  spec.entangler =
      (rng.next_u64() % 2) ? Entangler::RzzParameterized : Entangler::CzFixed;
  spec.topology = (rng.next_u64() % 2) ? Topology::Circular : Topology::Linear;
  spec.haar_seed = rng.next_u64();
  return spec;
}

}  // namespace

TEST_CASE("shift-rule constants are parameter independent") {
  const ShiftRule rule = pauli_shift_rule();
  CHECK(rule.shift == doctest::Approx(M_PI / 2.0));
  CHECK(rule.coefficient == doctest::Approx(0.5));
}

TEST_CASE("shift rule on a single RY rotation gives -sin(theta)") {
  CircuitSpec spec;
  spec.num_qubits = 1;
  spec.layers = 1;
  const Observable obs = Observable::default_z(1);
  const int iy = spec.local_param_index(0, 0, 1);
  for (double angle : {0.0, 0.4, M_PI / 2, 2.2}) {
    ParamVector theta;
    theta.values.assign(spec.num_params(), 0.0);
    theta.values[iy] = angle;
    const FeatureJacobian jac = psr_jacobian(spec, {0.0}, theta, obs);
    CHECK(jac.at(0, iy) == doctest::Approx(-std::sin(angle)).epsilon(1e-12));
  }
  ParamVector theta;
  theta.values.assign(spec.num_params(), 0.0);
  theta.values[iy] = M_PI / 2;
  const FeatureJacobian jac = psr_jacobian(spec, {0.0}, theta, obs);
  CHECK(jac.at(0, iy) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("parameters with no causal path have zero gradient") {
  // RZ on |0> measured in Z: the phase never shows up.
  CircuitSpec spec;
  spec.num_qubits = 1;
  spec.layers = 1;
  const Observable obs = Observable::default_z(1);
  ParamVector theta;
  theta.values.assign(spec.num_params(), 0.0);
  const int iz = spec.local_param_index(0, 0, 2);
  theta.values[iz] = 1.3;
  const FeatureJacobian jac = psr_jacobian(spec, {0.0}, theta, obs);
  CHECK(std::abs(jac.at(0, iz)) < 1e-14);
}

TEST_CASE("psr agrees with central finite differences") {
  Rng rng(101);
  SUBCASE("4-qubit 2-layer random circuit") {
    CircuitSpec spec;
    spec.num_qubits = 4;
    spec.layers = 2;
    spec.entangler = Entangler::RzzParameterized;
    const ParamVector theta = random_theta(spec, rng);
    const auto z = random_input(spec, rng);
    const Observable obs = Observable::default_z(4);
    const FeatureJacobian psr = psr_jacobian(spec, z, theta, obs);
    const FeatureJacobian fd = finite_diff_jacobian(spec, z, theta, obs, 1e-4);
    CHECK(max_abs_diff(psr, fd) < 1e-5);
  }
  SUBCASE("random specs over all encodings") {
    for (int trial = 0; trial < 10; ++trial) {
      const CircuitSpec spec = random_spec(rng, 4, 3);
      const ParamVector theta = random_theta(spec, rng);
      const auto z = random_input(spec, rng);
      const Observable obs = Observable::default_z(spec.sim_qubits());
      const FeatureJacobian psr = psr_jacobian(spec, z, theta, obs);
      const FeatureJacobian fd = finite_diff_jacobian(spec, z, theta, obs, 1e-4);
      CHECK(max_abs_diff(psr, fd) < 1e-5);
    }
  }
}

TEST_CASE("adjoint agrees with psr") {
  Rng rng(103);
  SUBCASE("single RY rotation") {
    CircuitSpec spec;
    spec.num_qubits = 1;
    spec.layers = 1;
    const Observable obs = Observable::default_z(1);
    ParamVector theta;
    theta.values.assign(spec.num_params(), 0.0);
    theta.values[spec.local_param_index(0, 0, 1)] = 0.9;
    const FeatureJacobian adj = adjoint_jacobian(spec, {0.0}, theta, obs);
    CHECK(adj.at(0, spec.local_param_index(0, 0, 1)) ==
          doctest::Approx(-std::sin(0.9)).epsilon(1e-12));
  }
  SUBCASE("random 6-qubit 3-layer circuits") {
    double worst = 0.0;
    for (int trial = 0; trial < 8; ++trial) {
      CircuitSpec spec = random_spec(rng, 6, 3);
      const ParamVector theta = random_theta(spec, rng);
      const auto z = random_input(spec, rng);
      const Observable obs = Observable::default_z(spec.sim_qubits());
      worst = std::max(worst, max_abs_diff(psr_jacobian(spec, z, theta, obs),
                                           adjoint_jacobian(spec, z, theta, obs)));
    }
    CHECK(worst < 1e-9);
  }
  SUBCASE("parallel psr matches serial psr bitwise") {
    CircuitSpec spec = random_spec(rng, 5, 3);
    const ParamVector theta = random_theta(spec, rng);
    const auto z = random_input(spec, rng);
    const Observable obs = Observable::default_z(spec.sim_qubits());
    const FeatureJacobian serial = psr_jacobian(spec, z, theta, obs, nullptr, nullptr, 1);
    const FeatureJacobian parallel = psr_jacobian(spec, z, theta, obs, nullptr, nullptr, 4);
    CHECK(serial.values == parallel.values);
  }
  SUBCASE("noise makes the adjoint backend refuse") {
    CircuitSpec spec;
    spec.num_qubits = 2;
    spec.layers = 1;
    spec.noise = NoiseSpec{ChannelKind::Depolarizing, 0.05};
    ParamVector theta;
    theta.values.assign(spec.num_params(), 0.0);
    CHECK_THROWS_AS(adjoint_jacobian(spec, {0.0, 0.0}, theta, Observable::default_z(2)),
                    std::invalid_argument);
  }
}

TEST_CASE("zero-parameter circuit yields a zero-column jacobian") {
  Circuit c;
  c.num_qubits = 1;
  c.num_params = 0;
  c.ops.push_back({Gate::h(0), -1, {Pauli::I, Pauli::I}, false});
  const FeatureJacobian jac = adjoint_jacobian_circuit(c, Observable::default_z(1));
  CHECK(jac.num_features == 1);
  CHECK(jac.num_params == 0);
  CHECK(jac.values.empty());
}

TEST_CASE("finite differences") {
  CircuitSpec spec;
  spec.num_qubits = 1;
  spec.layers = 1;
  const Observable obs = Observable::default_z(1);
  const int iy = spec.local_param_index(0, 0, 1);

  SUBCASE("cos(theta) feature is flat at theta = 0") {
    ParamVector theta;
    theta.values.assign(spec.num_params(), 0.0);
    const double h = 1e-4;
    const FeatureJacobian fd = finite_diff_jacobian(spec, {0.0}, theta, obs, h);
    CHECK(std::abs(fd.at(0, iy)) < h * h + 1e-12);
  }

  SUBCASE("error scales as h^2") {
    ParamVector theta;
    theta.values.assign(spec.num_params(), 0.0);
    theta.values[iy] = 0.8;
    const double truth = -std::sin(0.8);
    const double err_coarse =
        std::abs(finite_diff_jacobian(spec, {0.0}, theta, obs, 1e-2).at(0, iy) - truth);
    const double err_fine =
        std::abs(finite_diff_jacobian(spec, {0.0}, theta, obs, 1e-4).at(0, iy) - truth);
    const double ratio = err_coarse / err_fine;
    CHECK(ratio > 1e3);
    CHECK(ratio < 1e5);
  }

  SUBCASE("step must be positive") {
    ParamVector theta;
    theta.values.assign(spec.num_params(), 0.0);
    CHECK_THROWS_AS(finite_diff_jacobian(spec, {0.0}, theta, obs, 0.0),
                    std::invalid_argument);
  }
}

TEST_CASE("psr costs exactly two circuit runs per parameter") {
  Rng rng(107);
  CircuitSpec spec;
  spec.num_qubits = 3;
  spec.layers = 2;
  spec.entangler = Entangler::RzzParameterized;
  const ParamVector theta = random_theta(spec, rng);
  const auto z = random_input(spec, rng);
  RunStats stats;
  psr_jacobian(spec, z, theta, Observable::default_z(3), nullptr, &stats);
  CHECK(stats.circuit_runs.load() == 2L * spec.num_params());
}

TEST_CASE("trajectory psr is an unbiased estimate of the exact-channel jacobian") {
  CircuitSpec spec;
  spec.num_qubits = 2;
  spec.layers = 1;
  spec.noise = NoiseSpec{ChannelKind::Depolarizing, 0.1};
  Rng rng(109);
  const ParamVector theta = random_theta(spec, rng);
  const std::vector<double> z{1.5, 4.0};
  const Observable obs = Observable::default_z(2);

  const FeatureJacobian exact = psr_jacobian_density(spec, z, theta, obs);

  const int reps = 4000;
  FeatureJacobian mean = FeatureJacobian::zeros(exact.num_features, exact.num_params);
  FeatureJacobian sq = FeatureJacobian::zeros(exact.num_features, exact.num_params);
  for (int r = 0; r < reps; ++r) {
    Rng rep = rng.split(r);
    const FeatureJacobian jac = psr_jacobian(spec, z, theta, obs, &rep);
    for (std::size_t i = 0; i < jac.values.size(); ++i) {
      mean.values[i] += jac.values[i];
      sq.values[i] += jac.values[i] * jac.values[i];
    }
  }
  for (std::size_t i = 0; i < mean.values.size(); ++i) {
    mean.values[i] /= reps;
    const double var = sq.values[i] / reps - mean.values[i] * mean.values[i];
    const double se = std::sqrt(std::max(var, 0.0) / reps);
    CHECK(std::abs(mean.values[i] - exact.values[i]) < 3.0 * se + 1e-9);
  }
}
