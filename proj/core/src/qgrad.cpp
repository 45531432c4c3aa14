#include "ghostqc/qgrad.hpp"

#include <cmath>
#include <stdexcept>

#include "ghostqc/parallel.hpp"

namespace ghostqc {

FeatureJacobian FeatureJacobian::zeros(int features, int params) {
  FeatureJacobian j;
  j.num_features = features;
  j.num_params = params;
  j.values.assign(static_cast<std::size_t>(features) * params, 0.0);
  return j;
}

ShiftRule pauli_shift_rule() { return {M_PI / 2.0, 0.5}; }

namespace {

constexpr double kShift = M_PI / 2.0;
constexpr double kCoeff = 0.5;

void check_differentiable(const Circuit& c) {
  for (const auto& op : c.ops) {
    if (op.param_index < 0) continue;
    if (op.generator[0] == Pauli::I &&
        (op.gate.num_targets < 2 || op.generator[1] == Pauli::I)) {
      throw std::invalid_argument("parameterized gate without a Pauli generator");
    }
  }
}

}  // namespace

std::vector<double> psr_column(const CircuitSpec& spec, const std::vector<double>& z,
                               const ParamVector& theta, const Observable& obs,
                               int param_index, Rng* rng, RunStats* stats) {
  if (param_index < 0 || param_index >= spec.num_params()) {
    throw std::out_of_range("parameter index out of range");
  }
  ParamVector shifted = theta;
  shifted.values[param_index] = theta.values[param_index] + kShift;
  Rng rp = rng ? rng->split(2 * static_cast<std::uint64_t>(param_index))
               : Rng(0);
  Rng rm = rng ? rng->split(2 * static_cast<std::uint64_t>(param_index) + 1)
               : Rng(0);
  const FeatureResult plus =
      run_features(spec, z, shifted, obs, rng ? &rp : nullptr, stats);
  shifted.values[param_index] = theta.values[param_index] - kShift;
  const FeatureResult minus =
      run_features(spec, z, shifted, obs, rng ? &rm : nullptr, stats);
  std::vector<double> col(plus.raw.size());
  for (std::size_t i = 0; i < col.size(); ++i) {
    col[i] = kCoeff * (plus.raw[i] - minus.raw[i]);
  }
  return col;
}

FeatureJacobian psr_jacobian(const CircuitSpec& spec, const std::vector<double>& z,
                             const ParamVector& theta, const Observable& obs, Rng* rng,
                             RunStats* stats, int threads) {
  check_differentiable(build_circuit(spec, z, theta));
  const int np = spec.num_params();
  const int nf = obs.num_features();
  FeatureJacobian jac = FeatureJacobian::zeros(nf, np);
  parallel_for(static_cast<std::size_t>(np), threads, [&](std::size_t k) {
    const auto col = psr_column(spec, z, theta, obs, static_cast<int>(k), rng, stats);
    for (int i = 0; i < nf; ++i) jac.at(i, static_cast<int>(k)) = col[i];
  });
  return jac;
}

FeatureJacobian psr_jacobian_density(const CircuitSpec& spec, const std::vector<double>& z,
                                     const ParamVector& theta, const Observable& obs) {
  const int np = spec.num_params();
  const int nf = obs.num_features();
  FeatureJacobian jac = FeatureJacobian::zeros(nf, np);
  ParamVector shifted = theta;
  for (int k = 0; k < np; ++k) {
    shifted.values[k] = theta.values[k] + kShift;
    const FeatureResult plus = run_features_density(spec, z, shifted, obs);
    shifted.values[k] = theta.values[k] - kShift;
    const FeatureResult minus = run_features_density(spec, z, shifted, obs);
    shifted.values[k] = theta.values[k];
    for (int i = 0; i < nf; ++i) {
      jac.at(i, k) = kCoeff * (plus.raw[i] - minus.raw[i]);
    }
  }
  return jac;
}

FeatureJacobian adjoint_jacobian_circuit(const Circuit& circuit, const Observable& obs) {
  if (circuit.noise && circuit.noise->rate > 0.0) {
    throw std::invalid_argument("adjoint differentiation does not support noisy circuits");
  }
  check_differentiable(circuit);

  const int nf = obs.num_features();
  FeatureJacobian jac = FeatureJacobian::zeros(nf, circuit.num_params);

  StateVector phi = circuit.run(nullptr);
  std::vector<StateVector> lambdas;
  lambdas.reserve(nf);
  for (const auto& term : obs.terms) {
    StateVector l = phi;
    apply_pauli_string_inplace(l, term.labels);
    lambdas.push_back(std::move(l));
  }

  // Walk gates backwards keeping phi = U_k..U_1|init> and
  // lambda_i = U_{k+1}^dag..U_G^dag h_i U_G..U_1|init>; then
  // d<h_i>/d theta_k = Im(<lambda_i| P |phi>).
  for (auto it = circuit.ops.rbegin(); it != circuit.ops.rend(); ++it) {
    const CircuitOp& op = *it;
    if (op.param_index >= 0) {
      StateVector p_phi = phi;
      for (int t = 0; t < op.gate.num_targets; ++t) {
        switch (op.generator[t]) {
          case Pauli::I: break;
          case Pauli::X: apply_gate_inplace(p_phi, Gate::x(op.gate.targets[t])); break;
          case Pauli::Y: apply_gate_inplace(p_phi, Gate::y(op.gate.targets[t])); break;
          case Pauli::Z: apply_gate_inplace(p_phi, Gate::z(op.gate.targets[t])); break;
        }
      }
      for (int i = 0; i < nf; ++i) {
        jac.at(i, op.param_index) += inner_product(lambdas[i], p_phi).imag();
      }
    }
    const Gate inv = op.gate.dagger();
    apply_gate_inplace(phi, inv);
    for (auto& l : lambdas) apply_gate_inplace(l, inv);
  }
  return jac;
}

FeatureJacobian adjoint_jacobian(const CircuitSpec& spec, const std::vector<double>& z,
                                 const ParamVector& theta, const Observable& obs) {
  if (spec.noise && spec.noise->rate > 0.0) {
    throw std::invalid_argument("adjoint differentiation does not support noisy circuits");
  }
  return adjoint_jacobian_circuit(build_circuit(spec, z, theta), obs);
}

FeatureJacobian finite_diff_jacobian(const CircuitSpec& spec, const std::vector<double>& z,
                                     const ParamVector& theta, const Observable& obs,
                                     double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  const int np = spec.num_params();
  const int nf = obs.num_features();
  FeatureJacobian jac = FeatureJacobian::zeros(nf, np);
  ParamVector shifted = theta;
  for (int k = 0; k < np; ++k) {
    shifted.values[k] = theta.values[k] + h;
    const FeatureResult plus = run_features(spec, z, shifted, obs);
    shifted.values[k] = theta.values[k] - h;
    const FeatureResult minus = run_features(spec, z, shifted, obs);
    shifted.values[k] = theta.values[k];
    for (int i = 0; i < nf; ++i) {
      jac.at(i, k) = (plus.raw[i] - minus.raw[i]) / (2.0 * h);
    }
  }
  return jac;
}

}  // namespace ghostqc
