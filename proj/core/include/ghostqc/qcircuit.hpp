#pragma once

#include <atomic>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ghostqc/qstate.hpp"

namespace ghostqc {

enum class Encoding { AngleReupload, Iqp, Heisenberg };
enum class Entangler { CzFixed, RzzParameterized };
enum class Topology { Linear, Circular };

struct NoiseSpec {
  ChannelKind kind = ChannelKind::Depolarizing;
  double rate = 0.0;
};

// Static description of one parameterized circuit (per patch).
struct CircuitSpec {
  Encoding encoding = Encoding::AngleReupload;
  int num_qubits = 4;  // input length n; heisenberg simulates n+1 qubits
  int layers = 1;
  Entangler entangler = Entangler::CzFixed;
  Topology topology = Topology::Linear;
  int trotter_steps = 3;         // heisenberg only
  double evolution_time = -1.0;  // heisenberg only; < 0 means n/3
  std::optional<NoiseSpec> noise;
  std::uint64_t haar_seed = 0;  // heisenberg initial product state

  int sim_qubits() const;
  int entanglers_per_layer() const;
  int num_params() const;  // L*3*sim + (rzz ? L*E : 0)
  double effective_evolution_time() const;

  // Index of angle (layer, qubit, rot) with rot 0=RX, 1=RY, 2=RZ; layers and
  // qubits are 0-based.
  int local_param_index(int layer, int qubit, int rot) const;
  // Index of the k-th entangling angle of a layer (rzz entangler only).
  int entangling_param_index(int layer, int k) const;

  void validate() const;

  nlohmann::json to_json() const;
  static CircuitSpec from_json(const nlohmann::json& j);
};

// Trainable angles laid out per layer: n*3 local angles, then the entangling
// block when the entangler is parameterized. Stored unwrapped in R.
struct ParamVector {
  std::vector<double> values;
};

struct PauliTerm {
  double weight = 1.0;
  std::vector<Pauli> labels;
};

struct Observable {
  std::vector<PauliTerm> terms;
  bool trainable_weights = false;

  // One Z per qubit, weight 1: the default feature map.
  static Observable default_z(int num_qubits);
  int num_features() const { return static_cast<int>(terms.size()); }
};

// One unitary in a built circuit, with differentiation metadata.
struct CircuitOp {
  Gate gate;
  int param_index = -1;  // >= 0 for trainable gates
  std::array<Pauli, 2> generator{Pauli::I, Pauli::I};  // per target
  bool noise_after = false;
};

struct Circuit {
  int num_qubits = 0;
  int num_params = 0;
  std::vector<CircuitOp> ops;
  // Per-qubit initial amplitudes; empty means |0...0>.
  std::vector<std::array<cdouble, 2>> init_qubit_states;
  std::optional<NoiseSpec> noise;

  StateVector initial_state() const;
  // Runs the circuit; rng is required when noise is present (one Kraus branch
  // is sampled after each flagged op).
  StateVector run(Rng* rng = nullptr) const;
  // Exact-channel evolution; limited to <= 10 qubits.
  DensityMatrix run_density() const;
};

// Counts circuit executions, shared across threads.
struct RunStats {
  std::atomic<long> circuit_runs{0};
};

struct FeatureResult {
  std::vector<double> raw;       // <h_i> per observable term
  std::vector<double> weighted;  // w_i * <h_i>
  double weighted_sum = 0.0;     // w . h
};

// The diagonal IQP block U_Z(z) as RZ / RZZ gates over all qubit pairs.
std::vector<Gate> iqp_encoding_unitary(const std::vector<double>& z);

Circuit build_circuit(const CircuitSpec& spec, const std::vector<double>& z,
                      const ParamVector& theta);

FeatureResult run_features(const CircuitSpec& spec, const std::vector<double>& z,
                           const ParamVector& theta, const Observable& obs,
                           Rng* rng = nullptr, RunStats* stats = nullptr);

// Exact-channel variant (noise applied as a density-matrix map).
FeatureResult run_features_density(const CircuitSpec& spec, const std::vector<double>& z,
                                   const ParamVector& theta, const Observable& obs);

std::string to_string(Encoding e);
std::string to_string(Entangler e);
std::string to_string(Topology t);
std::string to_string(ChannelKind k);
Encoding encoding_from_string(const std::string& s);
Entangler entangler_from_string(const std::string& s);
Topology topology_from_string(const std::string& s);
ChannelKind channel_kind_from_string(const std::string& s);

}  // namespace ghostqc
