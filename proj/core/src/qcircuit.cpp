#include "ghostqc/qcircuit.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace ghostqc {

// --- CircuitSpec -------------------------------------------------------------

int CircuitSpec::sim_qubits() const {
  return encoding == Encoding::Heisenberg ? num_qubits + 1 : num_qubits;
}

int CircuitSpec::entanglers_per_layer() const {
  const int n = sim_qubits();
  if (n < 2) return 0;
  return topology == Topology::Circular ? n : n - 1;
}

int CircuitSpec::num_params() const {
  const int per_layer = 3 * sim_qubits() +
                        (entangler == Entangler::RzzParameterized ? entanglers_per_layer() : 0);
  return layers * per_layer;
}

double CircuitSpec::effective_evolution_time() const {
  return evolution_time >= 0.0 ? evolution_time : static_cast<double>(num_qubits) / 3.0;
}

int CircuitSpec::local_param_index(int layer, int qubit, int rot) const {
  const int per_layer = num_params() / layers;
  return layer * per_layer + qubit * 3 + rot;
}

int CircuitSpec::entangling_param_index(int layer, int k) const {
  if (entangler != Entangler::RzzParameterized) {
    throw std::logic_error("fixed entangler has no entangling parameters");
  }
  const int per_layer = num_params() / layers;
  return layer * per_layer + 3 * sim_qubits() + k;
}

void CircuitSpec::validate() const {
  if (num_qubits < 1) throw std::invalid_argument("circuit needs at least one qubit");
  if (layers < 1) throw std::invalid_argument("circuit needs at least one layer");
  if (encoding == Encoding::Heisenberg && trotter_steps < 1) {
    throw std::invalid_argument("heisenberg encoding needs at least one trotter step");
  }
  if (noise && (noise->rate < 0.0 || noise->rate > 1.0)) {
    throw std::invalid_argument("noise rate not in [0,1]");
  }
}

// --- enum names --------------------------------------------------------------

std::string to_string(Encoding e) {
  switch (e) {
    case Encoding::AngleReupload: return "angle_reupload";
    case Encoding::Iqp: return "iqp";
    case Encoding::Heisenberg: return "heisenberg";
  }
  return "?";
}
std::string to_string(Entangler e) {
  return e == Entangler::CzFixed ? "cz_fixed" : "rzz_parameterized";
}
std::string to_string(Topology t) { return t == Topology::Linear ? "linear" : "circular"; }
std::string to_string(ChannelKind k) {
  switch (k) {
    case ChannelKind::Depolarizing: return "depolarizing";
    case ChannelKind::AmplitudeDamping: return "amplitude_damping";
    case ChannelKind::PhaseDamping: return "phase_damping";
  }
  return "?";
}

Encoding encoding_from_string(const std::string& s) {
  if (s == "angle_reupload") return Encoding::AngleReupload;
  if (s == "iqp") return Encoding::Iqp;
  if (s == "heisenberg") return Encoding::Heisenberg;
  throw std::invalid_argument("unknown encoding: " + s);
}
Entangler entangler_from_string(const std::string& s) {
  if (s == "cz_fixed") return Entangler::CzFixed;
  if (s == "rzz_parameterized") return Entangler::RzzParameterized;
  throw std::invalid_argument("unknown entangler: " + s);
}
Topology topology_from_string(const std::string& s) {
  if (s == "linear") return Topology::Linear;
  if (s == "circular") return Topology::Circular;
  throw std::invalid_argument("unknown topology: " + s);
}
ChannelKind channel_kind_from_string(const std::string& s) {
  if (s == "depolarizing") return ChannelKind::Depolarizing;
  if (s == "amplitude_damping") return ChannelKind::AmplitudeDamping;
  if (s == "phase_damping") return ChannelKind::PhaseDamping;
  throw std::invalid_argument("unknown channel kind: " + s);
}

nlohmann::json CircuitSpec::to_json() const {
  nlohmann::json j{
      {"encoding", to_string(encoding)},
      {"qubits", num_qubits},
      {"layers", layers},
      {"entangler", to_string(entangler)},
      {"topology", to_string(topology)},
      {"trotter_steps", trotter_steps},
      {"evolution_time", evolution_time},
  };
  if (haar_seed != 0) j["haar_seed"] = haar_seed;
  if (noise) j["noise"] = {{"kind", to_string(noise->kind)}, {"rate", noise->rate}};
  return j;
}

CircuitSpec CircuitSpec::from_json(const nlohmann::json& j) {
  CircuitSpec s;
  s.encoding = encoding_from_string(j.at("encoding").get<std::string>());
  s.num_qubits = j.at("qubits").get<int>();
  s.layers = j.at("layers").get<int>();
  s.entangler = entangler_from_string(j.at("entangler").get<std::string>());
  s.topology = topology_from_string(j.at("topology").get<std::string>());
  if (j.contains("trotter_steps")) s.trotter_steps = j.at("trotter_steps").get<int>();
  if (j.contains("evolution_time")) s.evolution_time = j.at("evolution_time").get<double>();
  if (j.contains("haar_seed")) s.haar_seed = j.at("haar_seed").get<std::uint64_t>();
  if (j.contains("noise") && !j.at("noise").is_null()) {
    NoiseSpec n;
    n.kind = channel_kind_from_string(j.at("noise").at("kind").get<std::string>());
    n.rate = j.at("noise").at("rate").get<double>();
    s.noise = n;
  }
  s.validate();
  return s;
}

// --- Observable ----------------------------------------------------------------

Observable Observable::default_z(int num_qubits) {
  Observable obs;
  obs.terms.reserve(num_qubits);
  for (int q = 0; q < num_qubits; ++q) {
    PauliTerm t;
    t.weight = 1.0;
    t.labels.assign(num_qubits, Pauli::I);
    t.labels[q] = Pauli::Z;
    obs.terms.push_back(std::move(t));
  }
  return obs;
}

// --- circuit construction -------------------------------------------------------

namespace {

void check_input(const CircuitSpec& spec, const std::vector<double>& z) {
  if (static_cast<int>(z.size()) != spec.num_qubits) {
    throw std::invalid_argument("input length does not match circuit qubits");
  }
  const bool angle = spec.encoding == Encoding::AngleReupload;
  const double lo = 0.0;
  const double hi = angle ? 2.0 * M_PI : 1.0;
  for (double v : z) {
    if (!(v >= lo - 1e-12 && v <= hi + 1e-12)) {
      throw std::invalid_argument("encoding input out of range");
    }
  }
}

void append_local_rotations(Circuit& c, const CircuitSpec& spec, const ParamVector& theta,
                            int layer) {
  const int n = spec.sim_qubits();
  for (int q = 0; q < n; ++q) {
    // Printed as RX RY RZ acting on each qubit; rightmost acts first.
    const int ix = spec.local_param_index(layer, q, 0);
    const int iy = spec.local_param_index(layer, q, 1);
    const int iz = spec.local_param_index(layer, q, 2);
    c.ops.push_back({Gate::rz(q, theta.values[iz]), iz, {Pauli::Z, Pauli::I}, false});
    c.ops.push_back({Gate::ry(q, theta.values[iy]), iy, {Pauli::Y, Pauli::I}, false});
    c.ops.push_back({Gate::rx(q, theta.values[ix]), ix, {Pauli::X, Pauli::I}, false});
  }
}

void append_entanglers(Circuit& c, const CircuitSpec& spec, const ParamVector& theta, int layer) {
  const int n = spec.sim_qubits();
  const int count = spec.entanglers_per_layer();
  for (int k = 0; k < count; ++k) {
    const int a = k;
    const int b = (k + 1) % n;
    if (spec.entangler == Entangler::CzFixed) {
      c.ops.push_back({Gate::cz(a, b), -1, {Pauli::I, Pauli::I}, true});
    } else {
      const int idx = spec.entangling_param_index(layer, k);
      c.ops.push_back({Gate::rzz(a, b, theta.values[idx]), idx, {Pauli::Z, Pauli::Z}, true});
    }
  }
}

void append_variational_layer(Circuit& c, const CircuitSpec& spec, const ParamVector& theta,
                              int layer) {
  append_local_rotations(c, spec, theta, layer);
  append_entanglers(c, spec, theta, layer);
}

void append_angle_encoding(Circuit& c, const std::vector<double>& z) {
  for (int q = 0; q < static_cast<int>(z.size()); ++q) {
    // RY(z) RZ(z), RZ acting first.
    c.ops.push_back({Gate::rz(q, z[q]), -1, {Pauli::I, Pauli::I}, false});
    c.ops.push_back({Gate::ry(q, z[q]), -1, {Pauli::I, Pauli::I}, false});
  }
}

void append_heisenberg_encoding(Circuit& c, const CircuitSpec& spec, const std::vector<double>& z) {
  const int n = spec.num_qubits;
  const int steps = spec.trotter_steps;
  const double dt = spec.effective_evolution_time() / steps;
  for (int s = 0; s < steps; ++s) {
    for (int i = 0; i < n; ++i) {
      // exp(-i dt z_i (XX + YY + ZZ)): the three terms commute.
      const double angle = 2.0 * dt * z[i];
      c.ops.push_back({Gate::rxx(i, i + 1, angle), -1, {Pauli::I, Pauli::I}, false});
      c.ops.push_back({Gate::ryy(i, i + 1, angle), -1, {Pauli::I, Pauli::I}, false});
      c.ops.push_back({Gate::rzz(i, i + 1, angle), -1, {Pauli::I, Pauli::I}, false});
    }
  }
}

}  // namespace

std::vector<Gate> iqp_encoding_unitary(const std::vector<double>& z) {
  const int n = static_cast<int>(z.size());
  for (double v : z) {
    if (!(v >= -1e-12 && v <= 1.0 + 1e-12)) {
      throw std::invalid_argument("iqp input out of range [0,1]");
    }
  }
  std::vector<Gate> gates;
  // exp(-i (sum z_i Z_i + sum_{i<i'} z_i z_i' Z_i Z_i')) as a product of
  // commuting diagonal rotations.
  for (int i = 0; i < n; ++i) gates.push_back(Gate::rz(i, 2.0 * z[i]));
  for (int i = 0; i < n; ++i) {
    for (int k = i + 1; k < n; ++k) {
      gates.push_back(Gate::rzz(i, k, 2.0 * z[i] * z[k]));
    }
  }
  return gates;
}

Circuit build_circuit(const CircuitSpec& spec, const std::vector<double>& z,
                      const ParamVector& theta) {
  spec.validate();
  check_input(spec, z);
  if (static_cast<int>(theta.values.size()) != spec.num_params()) {
    throw std::invalid_argument("parameter vector length does not match circuit layout");
  }

  Circuit c;
  c.num_qubits = spec.sim_qubits();
  c.num_params = spec.num_params();
  c.noise = spec.noise;

  switch (spec.encoding) {
    case Encoding::AngleReupload:
      append_variational_layer(c, spec, theta, 0);
      for (int l = 1; l < spec.layers; ++l) {
        append_angle_encoding(c, z);
        append_variational_layer(c, spec, theta, l);
      }
      break;
    case Encoding::Iqp: {
      for (int q = 0; q < c.num_qubits; ++q) {
        c.ops.push_back({Gate::h(q), -1, {Pauli::I, Pauli::I}, false});
      }
      for (const auto& g : iqp_encoding_unitary(z)) {
        c.ops.push_back({g, -1, {Pauli::I, Pauli::I}, false});
      }
      for (int q = 0; q < c.num_qubits; ++q) {
        c.ops.push_back({Gate::h(q), -1, {Pauli::I, Pauli::I}, false});
      }
      for (const auto& g : iqp_encoding_unitary(z)) {
        c.ops.push_back({g, -1, {Pauli::I, Pauli::I}, false});
      }
      for (int l = 0; l < spec.layers; ++l) append_variational_layer(c, spec, theta, l);
      break;
    }
    case Encoding::Heisenberg: {
      Rng haar(spec.haar_seed);
      c.init_qubit_states.reserve(c.num_qubits);
      for (int q = 0; q < c.num_qubits; ++q) {
        Rng qrng = haar.split(static_cast<std::uint64_t>(q));
        c.init_qubit_states.push_back(haar_random_qubit_amplitudes(qrng));
      }
      append_heisenberg_encoding(c, spec, z);
      for (int l = 0; l < spec.layers; ++l) append_variational_layer(c, spec, theta, l);
      break;
    }
  }
  return c;
}

// --- execution ---------------------------------------------------------------------

StateVector Circuit::initial_state() const {
  if (init_qubit_states.empty()) return StateVector::zero_state(num_qubits);
  return StateVector::product_state(init_qubit_states);
}

StateVector Circuit::run(Rng* rng) const {
  if (noise && noise->rate > 0.0 && rng == nullptr) {
    throw std::invalid_argument("noisy circuit execution requires a generator");
  }
  StateVector psi = initial_state();
  const bool noisy = noise && noise->rate > 0.0;
  KrausChannel ch;
  if (noisy) ch = KrausChannel::make(noise->kind, noise->rate);
  for (const auto& op : ops) {
    apply_gate_inplace(psi, op.gate);
    if (noisy && op.noise_after) {
      // One channel instance per entangler, on its second qubit.
      sample_channel_trajectory_inplace(psi, ch, op.gate.targets[1], *rng);
    }
  }
  return psi;
}

DensityMatrix Circuit::run_density() const {
  if (num_qubits > 10) {
    throw std::invalid_argument("density-matrix mode is limited to 10 qubits");
  }
  DensityMatrix rho = DensityMatrix::from_state(initial_state());
  const bool noisy = noise && noise->rate > 0.0;
  KrausChannel ch;
  if (noisy) ch = KrausChannel::make(noise->kind, noise->rate);
  for (const auto& op : ops) {
    apply_gate_density_inplace(rho, op.gate);
    if (noisy && op.noise_after) {
      rho = apply_channel_density(rho, ch, op.gate.targets[1]);
    }
  }
  return rho;
}

namespace {

void check_observable(const Observable& obs, int num_qubits) {
  if (obs.terms.empty()) throw std::invalid_argument("observable has no terms");
  for (const auto& t : obs.terms) {
    if (static_cast<int>(t.labels.size()) != num_qubits) {
      throw std::invalid_argument("observable term length does not match qubit count");
    }
  }
}

FeatureResult features_from(const std::vector<double>& raw, const Observable& obs) {
  FeatureResult r;
  r.raw = raw;
  r.weighted.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    r.weighted[i] = obs.terms[i].weight * raw[i];
    r.weighted_sum += r.weighted[i];
  }
  return r;
}

}  // namespace

FeatureResult run_features(const CircuitSpec& spec, const std::vector<double>& z,
                           const ParamVector& theta, const Observable& obs, Rng* rng,
                           RunStats* stats) {
  const Circuit c = build_circuit(spec, z, theta);
  check_observable(obs, c.num_qubits);
  const StateVector psi = c.run(rng);
  if (stats) stats->circuit_runs.fetch_add(1, std::memory_order_relaxed);
  std::vector<double> raw(obs.terms.size());
  for (std::size_t i = 0; i < obs.terms.size(); ++i) {
    raw[i] = pauli_expectation(psi, obs.terms[i].labels);
  }
  return features_from(raw, obs);
}

FeatureResult run_features_density(const CircuitSpec& spec, const std::vector<double>& z,
                                   const ParamVector& theta, const Observable& obs) {
  const Circuit c = build_circuit(spec, z, theta);
  check_observable(obs, c.num_qubits);
  const DensityMatrix rho = c.run_density();
  std::vector<double> raw(obs.terms.size());
  for (std::size_t i = 0; i < obs.terms.size(); ++i) {
    raw[i] = pauli_expectation_density(rho, obs.terms[i].labels);
  }
  return features_from(raw, obs);
}

}  // namespace ghostqc
