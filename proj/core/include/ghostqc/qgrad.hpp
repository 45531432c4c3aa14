#pragma once

#include <vector>

#include "ghostqc/qcircuit.hpp"

namespace ghostqc {

// Fixed shift-rule constants for Pauli-generated gates; both are independent
// of the parameter value.
struct ShiftRule {
  double shift;        // radians
  double coefficient;  // prefactor on the shifted difference
};
ShiftRule pauli_shift_rule();

// d<h_i>/d theta_k, row-major (num_features x num_params).
struct FeatureJacobian {
  int num_features = 0;
  int num_params = 0;
  std::vector<double> values;

  static FeatureJacobian zeros(int features, int params);
  double& at(int feature, int param) { return values[feature * num_params + param]; }
  double at(int feature, int param) const { return values[feature * num_params + param]; }
};

// Parameter-shift rule: entry (i,k) = ( <h_i>(theta_k + pi/2) -
// <h_i>(theta_k - pi/2) ) / 2. Exact for Pauli-generated gates. Under
// trajectory noise each shifted run draws an independent generator derived
// from rng, making the estimate unbiased for the exact-channel jacobian.
FeatureJacobian psr_jacobian(const CircuitSpec& spec, const std::vector<double>& z,
                             const ParamVector& theta, const Observable& obs,
                             Rng* rng = nullptr, RunStats* stats = nullptr,
                             int threads = 1);

// Parameter-shift against exact-channel (density-matrix) evaluations.
FeatureJacobian psr_jacobian_density(const CircuitSpec& spec, const std::vector<double>& z,
                                     const ParamVector& theta, const Observable& obs);

// Single-sweep reverse-mode jacobian on the statevector; noiseless circuits
// only, agrees with psr_jacobian to numerical precision.
FeatureJacobian adjoint_jacobian(const CircuitSpec& spec, const std::vector<double>& z,
                                 const ParamVector& theta, const Observable& obs);

// Circuit-level adjoint core, usable for hand-built circuits.
FeatureJacobian adjoint_jacobian_circuit(const Circuit& circuit, const Observable& obs);

// Central differences with step h; O(h^2) test oracle.
FeatureJacobian finite_diff_jacobian(const CircuitSpec& spec, const std::vector<double>& z,
                                     const ParamVector& theta, const Observable& obs,
                                     double h);

// One jacobian column (single parameter) via the shift rule; cheap path for
// probing individual parameters.
std::vector<double> psr_column(const CircuitSpec& spec, const std::vector<double>& z,
                               const ParamVector& theta, const Observable& obs,
                               int param_index, Rng* rng = nullptr,
                               RunStats* stats = nullptr);

}  // namespace ghostqc
