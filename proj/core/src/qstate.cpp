#include "ghostqc/qstate.hpp"

#include <cmath>
#include <stdexcept>

namespace ghostqc {

namespace {

constexpr cdouble kI{0.0, 1.0};

std::size_t checked_dim(int num_qubits) {
  if (num_qubits < 1 || num_qubits > 30) {
    throw std::invalid_argument("qubit count out of range");
  }
  return std::size_t{1} << num_qubits;
}

}  // namespace

// --- StateVector -------------------------------------------------------------

StateVector StateVector::zero_state(int num_qubits) {
  StateVector s;
  s.num_qubits = num_qubits;
  s.amplitudes.assign(checked_dim(num_qubits), cdouble{0.0, 0.0});
  s.amplitudes[0] = 1.0;
  return s;
}

StateVector StateVector::product_state(const std::vector<std::array<cdouble, 2>>& qubits) {
  const int n = static_cast<int>(qubits.size());
  StateVector s;
  s.num_qubits = n;
  s.amplitudes.assign(checked_dim(n), cdouble{0.0, 0.0});
  for (std::size_t idx = 0; idx < s.amplitudes.size(); ++idx) {
    cdouble a{1.0, 0.0};
    for (int q = 0; q < n; ++q) {
      const int bit = static_cast<int>((idx >> (n - 1 - q)) & 1);
      a *= qubits[q][bit];
    }
    s.amplitudes[idx] = a;
  }
  return s;
}

double StateVector::norm() const {
  double s = 0.0;
  for (const auto& a : amplitudes) s += std::norm(a);
  return std::sqrt(s);
}

void StateVector::normalize() {
  const double n = norm();
  if (n <= 0.0) throw std::runtime_error("cannot normalize a zero state");
  for (auto& a : amplitudes) a /= n;
}

// --- DensityMatrix -----------------------------------------------------------

DensityMatrix DensityMatrix::from_state(const StateVector& psi) {
  DensityMatrix rho;
  rho.num_qubits = psi.num_qubits;
  const std::size_t d = psi.dim();
  rho.entries.assign(d * d, cdouble{0.0, 0.0});
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      rho.entries[r * d + c] = psi.amplitudes[r] * std::conj(psi.amplitudes[c]);
    }
  }
  return rho;
}

std::size_t DensityMatrix::dim() const { return std::size_t{1} << num_qubits; }

cdouble& DensityMatrix::at(std::size_t r, std::size_t c) { return entries[r * dim() + c]; }
const cdouble& DensityMatrix::at(std::size_t r, std::size_t c) const {
  return entries[r * dim() + c];
}

double DensityMatrix::trace_real() const {
  const std::size_t d = dim();
  double t = 0.0;
  for (std::size_t i = 0; i < d; ++i) t += entries[i * d + i].real();
  return t;
}

// --- gate constructors --------------------------------------------------------

namespace {

Gate single(GateKind kind, int t, std::array<cdouble, 4> m, double angle = 0.0) {
  Gate g;
  g.kind = kind;
  g.num_targets = 1;
  g.targets = {t, -1};
  g.angle = angle;
  for (int i = 0; i < 4; ++i) g.matrix[i] = m[i];
  return g;
}

Gate two(GateKind kind, int a, int b, const std::array<cdouble, 16>& m, double angle = 0.0) {
  if (a == b) throw std::invalid_argument("two-qubit gate targets must be distinct");
  Gate g;
  g.kind = kind;
  g.num_targets = 2;
  g.targets = {a, b};
  g.angle = angle;
  g.matrix = m;
  return g;
}

std::array<cdouble, 16> pauli_pair_rotation(Pauli p, double angle) {
  // exp(-i angle (PxP) / 2) = cos(angle/2) I - i sin(angle/2) PxP, since
  // (PxP)^2 = I.
  static const std::array<std::array<cdouble, 4>, 4> kPauli = {{
      {cdouble{1, 0}, {0, 0}, {0, 0}, {1, 0}},   // I
      {cdouble{0, 0}, {1, 0}, {1, 0}, {0, 0}},   // X
      {cdouble{0, 0}, {0, -1}, {0, 1}, {0, 0}},  // Y
      {cdouble{1, 0}, {0, 0}, {0, 0}, {-1, 0}},  // Z
  }};
  const auto& s = kPauli[static_cast<int>(p)];
  const double c = std::cos(angle / 2.0);
  const double sn = std::sin(angle / 2.0);
  std::array<cdouble, 16> m{};
  for (int r = 0; r < 4; ++r) {
    for (int col = 0; col < 4; ++col) {
      const cdouble pp = s[(r >> 1) * 2 + (col >> 1)] * s[(r & 1) * 2 + (col & 1)];
      cdouble v = -kI * sn * pp;
      if (r == col) v += c;
      m[r * 4 + col] = v;
    }
  }
  return m;
}

}  // namespace

Gate Gate::h(int t) {
  const double s = 1.0 / std::sqrt(2.0);
  return single(GateKind::H, t, {cdouble{s, 0}, {s, 0}, {s, 0}, {-s, 0}});
}
Gate Gate::x(int t) { return single(GateKind::X, t, {cdouble{0, 0}, {1, 0}, {1, 0}, {0, 0}}); }
Gate Gate::y(int t) { return single(GateKind::Y, t, {cdouble{0, 0}, {0, -1}, {0, 1}, {0, 0}}); }
Gate Gate::z(int t) { return single(GateKind::Z, t, {cdouble{1, 0}, {0, 0}, {0, 0}, {-1, 0}}); }

Gate Gate::rx(int t, double a) {
  const double c = std::cos(a / 2), s = std::sin(a / 2);
  return single(GateKind::RX, t, {cdouble{c, 0}, {0, -s}, {0, -s}, {c, 0}}, a);
}
Gate Gate::ry(int t, double a) {
  const double c = std::cos(a / 2), s = std::sin(a / 2);
  return single(GateKind::RY, t, {cdouble{c, 0}, {-s, 0}, {s, 0}, {c, 0}}, a);
}
Gate Gate::rz(int t, double a) {
  const cdouble em = std::exp(-kI * (a / 2)), ep = std::exp(kI * (a / 2));
  return single(GateKind::RZ, t, {em, {0, 0}, {0, 0}, ep}, a);
}

Gate Gate::cz(int a, int b) {
  std::array<cdouble, 16> m{};
  m[0] = m[5] = m[10] = 1.0;
  m[15] = -1.0;
  return two(GateKind::CZ, a, b, m);
}

Gate Gate::cnot(int control, int target) {
  std::array<cdouble, 16> m{};
  m[0] = m[5] = 1.0;   // |00>, |01| fixed
  m[2 * 4 + 3] = 1.0;  // |10> -> |11>
  m[3 * 4 + 2] = 1.0;  // |11> -> |10>
  return two(GateKind::CNOT, control, target, m);
}

Gate Gate::rxx(int a, int b, double angle) {
  return two(GateKind::RXX, a, b, pauli_pair_rotation(Pauli::X, angle), angle);
}
Gate Gate::ryy(int a, int b, double angle) {
  return two(GateKind::RYY, a, b, pauli_pair_rotation(Pauli::Y, angle), angle);
}
Gate Gate::rzz(int a, int b, double angle) {
  return two(GateKind::RZZ, a, b, pauli_pair_rotation(Pauli::Z, angle), angle);
}

Gate Gate::dagger() const {
  Gate g = *this;
  const int d = dim();
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      g.matrix[r * d + c] = std::conj(matrix[c * d + r]);
    }
  }
  g.angle = -angle;
  return g;
}

// --- Kraus channels -----------------------------------------------------------

KrausChannel KrausChannel::depolarizing(double lambda) {
  if (lambda < 0.0 || lambda > 1.0) throw std::invalid_argument("depolarizing rate not in [0,1]");
  KrausChannel ch;
  ch.kind = ChannelKind::Depolarizing;
  ch.rate = lambda;
  const double k0 = std::sqrt(1.0 - 3.0 * lambda / 4.0);
  const double k = std::sqrt(lambda / 4.0);
  ch.operators = {
      {cdouble{k0, 0}, {0, 0}, {0, 0}, {k0, 0}},  // sqrt(1-3l/4) I
      {cdouble{0, 0}, {k, 0}, {k, 0}, {0, 0}},    // sqrt(l/4) X
      {cdouble{0, 0}, {0, -k}, {0, k}, {0, 0}},   // sqrt(l/4) Y
      {cdouble{k, 0}, {0, 0}, {0, 0}, {-k, 0}},   // sqrt(l/4) Z
  };
  return ch;
}

KrausChannel KrausChannel::amplitude_damping(double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("damping probability not in [0,1]");
  KrausChannel ch;
  ch.kind = ChannelKind::AmplitudeDamping;
  ch.rate = p;
  ch.operators = {
      {cdouble{1, 0}, {0, 0}, {0, 0}, {std::sqrt(1.0 - p), 0}},
      {cdouble{0, 0}, {std::sqrt(p), 0}, {0, 0}, {0, 0}},
  };
  return ch;
}

KrausChannel KrausChannel::phase_damping(double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("damping probability not in [0,1]");
  KrausChannel ch;
  ch.kind = ChannelKind::PhaseDamping;
  ch.rate = p;
  ch.operators = {
      {cdouble{1, 0}, {0, 0}, {0, 0}, {std::sqrt(1.0 - p), 0}},
      {cdouble{0, 0}, {0, 0}, {0, 0}, {std::sqrt(p), 0}},
  };
  return ch;
}

KrausChannel KrausChannel::make(ChannelKind kind, double rate) {
  switch (kind) {
    case ChannelKind::Depolarizing: return depolarizing(rate);
    case ChannelKind::AmplitudeDamping: return amplitude_damping(rate);
    case ChannelKind::PhaseDamping: return phase_damping(rate);
  }
  throw std::invalid_argument("unknown channel kind");
}

// --- statevector kernels --------------------------------------------------------

namespace {

void check_targets(int num_qubits, const Gate& gate) {
  for (int k = 0; k < gate.num_targets; ++k) {
    const int t = gate.targets[k];
    if (t < 0 || t >= num_qubits) throw std::out_of_range("gate target out of range");
  }
  if (gate.num_targets == 2 && gate.targets[0] == gate.targets[1]) {
    throw std::invalid_argument("duplicate gate targets");
  }
}

void apply_matrix1(std::vector<cdouble>& amps, int num_qubits, int target,
                   const cdouble* m) {
  const std::size_t stride = std::size_t{1} << (num_qubits - 1 - target);
  const std::size_t dim = amps.size();
  for (std::size_t base = 0; base < dim; base += 2 * stride) {
    for (std::size_t i = base; i < base + stride; ++i) {
      const cdouble a0 = amps[i];
      const cdouble a1 = amps[i + stride];
      amps[i] = m[0] * a0 + m[1] * a1;
      amps[i + stride] = m[2] * a0 + m[3] * a1;
    }
  }
}

void apply_matrix2(std::vector<cdouble>& amps, int num_qubits, int t0, int t1,
                   const cdouble* m) {
  const std::size_t s0 = std::size_t{1} << (num_qubits - 1 - t0);
  const std::size_t s1 = std::size_t{1} << (num_qubits - 1 - t1);
  const std::size_t dim = amps.size();
  const std::size_t mask = s0 | s1;
  for (std::size_t i = 0; i < dim; ++i) {
    if (i & mask) continue;  // visit each 4-tuple once via its 00 index
    const std::size_t i00 = i;
    const std::size_t i01 = i | s1;
    const std::size_t i10 = i | s0;
    const std::size_t i11 = i | mask;
    const cdouble a00 = amps[i00], a01 = amps[i01], a10 = amps[i10], a11 = amps[i11];
    amps[i00] = m[0] * a00 + m[1] * a01 + m[2] * a10 + m[3] * a11;
    amps[i01] = m[4] * a00 + m[5] * a01 + m[6] * a10 + m[7] * a11;
    amps[i10] = m[8] * a00 + m[9] * a01 + m[10] * a10 + m[11] * a11;
    amps[i11] = m[12] * a00 + m[13] * a01 + m[14] * a10 + m[15] * a11;
  }
}

}  // namespace

void apply_gate_inplace(StateVector& state, const Gate& gate) {
  check_targets(state.num_qubits, gate);
  if (gate.num_targets == 1) {
    apply_matrix1(state.amplitudes, state.num_qubits, gate.targets[0], gate.matrix.data());
  } else {
    apply_matrix2(state.amplitudes, state.num_qubits, gate.targets[0], gate.targets[1],
                  gate.matrix.data());
  }
}

StateVector apply_gate(const StateVector& state, const Gate& gate) {
  StateVector out = state;
  apply_gate_inplace(out, gate);
  return out;
}

void apply_pauli_string_inplace(StateVector& state, const std::vector<Pauli>& labels) {
  if (static_cast<int>(labels.size()) != state.num_qubits) {
    throw std::invalid_argument("pauli string length mismatch");
  }
  for (int q = 0; q < state.num_qubits; ++q) {
    switch (labels[q]) {
      case Pauli::I: break;
      case Pauli::X: apply_gate_inplace(state, Gate::x(q)); break;
      case Pauli::Y: apply_gate_inplace(state, Gate::y(q)); break;
      case Pauli::Z: apply_gate_inplace(state, Gate::z(q)); break;
    }
  }
}

cdouble inner_product(const StateVector& bra, const StateVector& ket) {
  if (bra.dim() != ket.dim()) throw std::invalid_argument("dimension mismatch");
  cdouble s{0.0, 0.0};
  for (std::size_t i = 0; i < bra.dim(); ++i) {
    s += std::conj(bra.amplitudes[i]) * ket.amplitudes[i];
  }
  return s;
}

double pauli_expectation(const StateVector& state, const std::vector<Pauli>& labels) {
  StateVector h_psi = state;
  apply_pauli_string_inplace(h_psi, labels);
  return inner_product(state, h_psi).real();
}

StateVector haar_random_qubit(std::uint64_t seed) {
  Rng rng(seed);
  StateVector s;
  s.num_qubits = 1;
  const auto amps = haar_random_qubit_amplitudes(rng);
  s.amplitudes = {amps[0], amps[1]};
  return s;
}

std::array<cdouble, 2> haar_random_qubit_amplitudes(Rng& rng) {
  // Normalized complex Gaussian pair is Haar-distributed on the Bloch sphere.
  cdouble a{rng.normal(), rng.normal()};
  cdouble b{rng.normal(), rng.normal()};
  double n = std::sqrt(std::norm(a) + std::norm(b));
  while (n <= 1e-300) {
    a = {rng.normal(), rng.normal()};
    b = {rng.normal(), rng.normal()};
    n = std::sqrt(std::norm(a) + std::norm(b));
  }
  return {a / n, b / n};
}

double phase_aligned_distance(const std::vector<cdouble>& a, const std::vector<cdouble>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dimension mismatch");
  std::size_t ref = 0;
  double best = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i]) > best) {
      best = std::abs(a[i]);
      ref = i;
    }
  }
  cdouble phase{1.0, 0.0};
  if (best > 1e-300 && std::abs(b[ref]) > 1e-300) {
    phase = (a[ref] / std::abs(a[ref])) / (b[ref] / std::abs(b[ref]));
  }
  double dist = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dist = std::max(dist, std::abs(a[i] - phase * b[i]));
  }
  return dist;
}

std::vector<Gate> two_qubit_rotation_decomposed(Pauli axis, double angle) {
  // RZZ(a) = CNOT (I x RZ(a)) CNOT; propagating the rotation axis through the
  // CNOT gives the XX variant with RX on the control. YY additionally needs an
  // RX(+-pi/2) basis change on both qubits around the ZZ core.
  switch (axis) {
    case Pauli::Z:
      return {Gate::cnot(0, 1), Gate::rz(1, angle), Gate::cnot(0, 1)};
    case Pauli::X:
      return {Gate::cnot(0, 1), Gate::rx(0, angle), Gate::cnot(0, 1)};
    case Pauli::Y:
      return {Gate::rx(0, M_PI / 2), Gate::rx(1, M_PI / 2),
              Gate::cnot(0, 1),      Gate::rz(1, angle),
              Gate::cnot(0, 1),      Gate::rx(0, -M_PI / 2),
              Gate::rx(1, -M_PI / 2)};
    default:
      throw std::invalid_argument("rotation axis must be X, Y or Z");
  }
}

std::array<cdouble, 16> compose_two_qubit_sequence(const std::vector<Gate>& gates) {
  std::array<cdouble, 16> u{};
  for (int i = 0; i < 4; ++i) u[i * 4 + i] = 1.0;
  // Build each column by running the sequence on a basis state.
  for (int col = 0; col < 4; ++col) {
    StateVector psi;
    psi.num_qubits = 2;
    psi.amplitudes.assign(4, cdouble{0.0, 0.0});
    psi.amplitudes[col] = 1.0;
    for (const auto& g : gates) apply_gate_inplace(psi, g);
    for (int row = 0; row < 4; ++row) u[row * 4 + col] = psi.amplitudes[row];
  }
  return u;
}

// --- density-matrix kernels -----------------------------------------------------

namespace {

// rho -> M rho (left multiplication by a 1-qubit operator on `target`).
void left_mul1(DensityMatrix& rho, int target, const cdouble* m) {
  const std::size_t d = rho.dim();
  const std::size_t stride = std::size_t{1} << (rho.num_qubits - 1 - target);
  for (std::size_t col = 0; col < d; ++col) {
    for (std::size_t base = 0; base < d; base += 2 * stride) {
      for (std::size_t r = base; r < base + stride; ++r) {
        const cdouble a0 = rho.entries[r * d + col];
        const cdouble a1 = rho.entries[(r + stride) * d + col];
        rho.entries[r * d + col] = m[0] * a0 + m[1] * a1;
        rho.entries[(r + stride) * d + col] = m[2] * a0 + m[3] * a1;
      }
    }
  }
}

// rho -> rho M^dag.
void right_mul1_dag(DensityMatrix& rho, int target, const cdouble* m) {
  const std::size_t d = rho.dim();
  const std::size_t stride = std::size_t{1} << (rho.num_qubits - 1 - target);
  for (std::size_t row = 0; row < d; ++row) {
    cdouble* r = &rho.entries[row * d];
    for (std::size_t base = 0; base < d; base += 2 * stride) {
      for (std::size_t c = base; c < base + stride; ++c) {
        const cdouble a0 = r[c];
        const cdouble a1 = r[c + stride];
        r[c] = a0 * std::conj(m[0]) + a1 * std::conj(m[1]);
        r[c + stride] = a0 * std::conj(m[2]) + a1 * std::conj(m[3]);
      }
    }
  }
}

void left_mul2(DensityMatrix& rho, int t0, int t1, const cdouble* m) {
  const std::size_t d = rho.dim();
  const std::size_t s0 = std::size_t{1} << (rho.num_qubits - 1 - t0);
  const std::size_t s1 = std::size_t{1} << (rho.num_qubits - 1 - t1);
  const std::size_t mask = s0 | s1;
  for (std::size_t col = 0; col < d; ++col) {
    for (std::size_t r = 0; r < d; ++r) {
      if (r & mask) continue;
      const std::size_t i00 = r, i01 = r | s1, i10 = r | s0, i11 = r | mask;
      const cdouble a00 = rho.entries[i00 * d + col];
      const cdouble a01 = rho.entries[i01 * d + col];
      const cdouble a10 = rho.entries[i10 * d + col];
      const cdouble a11 = rho.entries[i11 * d + col];
      rho.entries[i00 * d + col] = m[0] * a00 + m[1] * a01 + m[2] * a10 + m[3] * a11;
      rho.entries[i01 * d + col] = m[4] * a00 + m[5] * a01 + m[6] * a10 + m[7] * a11;
      rho.entries[i10 * d + col] = m[8] * a00 + m[9] * a01 + m[10] * a10 + m[11] * a11;
      rho.entries[i11 * d + col] = m[12] * a00 + m[13] * a01 + m[14] * a10 + m[15] * a11;
    }
  }
}

void right_mul2_dag(DensityMatrix& rho, int t0, int t1, const cdouble* m) {
  const std::size_t d = rho.dim();
  const std::size_t s0 = std::size_t{1} << (rho.num_qubits - 1 - t0);
  const std::size_t s1 = std::size_t{1} << (rho.num_qubits - 1 - t1);
  const std::size_t mask = s0 | s1;
  for (std::size_t row = 0; row < d; ++row) {
    cdouble* r = &rho.entries[row * d];
    for (std::size_t c = 0; c < d; ++c) {
      if (c & mask) continue;
      const std::size_t i00 = c, i01 = c | s1, i10 = c | s0, i11 = c | mask;
      const cdouble a00 = r[i00], a01 = r[i01], a10 = r[i10], a11 = r[i11];
      r[i00] = a00 * std::conj(m[0]) + a01 * std::conj(m[1]) + a10 * std::conj(m[2]) +
               a11 * std::conj(m[3]);
      r[i01] = a00 * std::conj(m[4]) + a01 * std::conj(m[5]) + a10 * std::conj(m[6]) +
               a11 * std::conj(m[7]);
      r[i10] = a00 * std::conj(m[8]) + a01 * std::conj(m[9]) + a10 * std::conj(m[10]) +
               a11 * std::conj(m[11]);
      r[i11] = a00 * std::conj(m[12]) + a01 * std::conj(m[13]) + a10 * std::conj(m[14]) +
               a11 * std::conj(m[15]);
    }
  }
}

}  // namespace

void apply_gate_density_inplace(DensityMatrix& rho, const Gate& gate) {
  check_targets(rho.num_qubits, gate);
  if (gate.num_targets == 1) {
    left_mul1(rho, gate.targets[0], gate.matrix.data());
    right_mul1_dag(rho, gate.targets[0], gate.matrix.data());
  } else {
    left_mul2(rho, gate.targets[0], gate.targets[1], gate.matrix.data());
    right_mul2_dag(rho, gate.targets[0], gate.targets[1], gate.matrix.data());
  }
}

DensityMatrix apply_channel_density(const DensityMatrix& rho, const KrausChannel& channel,
                                    int target) {
  if (target < 0 || target >= rho.num_qubits) throw std::out_of_range("channel target out of range");
  DensityMatrix out;
  out.num_qubits = rho.num_qubits;
  out.entries.assign(rho.entries.size(), cdouble{0.0, 0.0});
  for (const auto& k : channel.operators) {
    DensityMatrix branch = rho;
    left_mul1(branch, target, k.data());
    right_mul1_dag(branch, target, k.data());
    for (std::size_t i = 0; i < out.entries.size(); ++i) out.entries[i] += branch.entries[i];
  }
  return out;
}

double pauli_expectation_density(const DensityMatrix& rho, const std::vector<Pauli>& labels) {
  if (static_cast<int>(labels.size()) != rho.num_qubits) {
    throw std::invalid_argument("pauli string length mismatch");
  }
  // tr(rho h) with h a Pauli string: h|c> = phase * |r(c)>, so
  // tr = sum_c phase(c) * rho[c, r(c)].
  const std::size_t d = rho.dim();
  const int n = rho.num_qubits;
  cdouble tr{0.0, 0.0};
  for (std::size_t c = 0; c < d; ++c) {
    std::size_t r = c;
    cdouble phase{1.0, 0.0};
    for (int q = 0; q < n; ++q) {
      const std::size_t bit = std::size_t{1} << (n - 1 - q);
      const bool one = (c & bit) != 0;
      switch (labels[q]) {
        case Pauli::I: break;
        case Pauli::X: r ^= bit; break;
        case Pauli::Y:
          r ^= bit;
          phase *= one ? cdouble{0.0, -1.0} : cdouble{0.0, 1.0};
          break;
        case Pauli::Z:
          if (one) phase = -phase;
          break;
      }
    }
    tr += phase * rho.entries[c * d + r];
  }
  return tr.real();
}

// --- trajectories -----------------------------------------------------------------

void sample_channel_trajectory_inplace(StateVector& state, const KrausChannel& channel,
                                       int target, Rng& rng) {
  if (target < 0 || target >= state.num_qubits) {
    throw std::out_of_range("channel target out of range");
  }
  const std::size_t count = channel.operators.size();
  std::vector<StateVector> branches;
  std::vector<double> probs(count, 0.0);
  branches.reserve(count);
  double total = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    StateVector b = state;
    apply_matrix1(b.amplitudes, b.num_qubits, target, channel.operators[i].data());
    double p = 0.0;
    for (const auto& a : b.amplitudes) p += std::norm(a);
    probs[i] = p;
    total += p;
    branches.push_back(std::move(b));
  }
  // total == 1 up to roundoff by completeness; draw within the realized mass
  // so a zero-probability branch can never be hit.
  const double u = rng.uniform() * total;
  double acc = 0.0;
  std::size_t pick = count;
  for (std::size_t i = 0; i < count; ++i) {
    if (probs[i] <= 0.0) continue;
    acc += probs[i];
    pick = i;
    if (u < acc) break;
  }
  if (pick == count) throw std::runtime_error("no channel branch has positive probability");
  state = std::move(branches[pick]);
  const double scale = 1.0 / std::sqrt(probs[pick]);
  for (auto& a : state.amplitudes) a *= scale;
}

StateVector sample_channel_trajectory(const StateVector& state, const KrausChannel& channel,
                                      int target, Rng& rng) {
  StateVector out = state;
  sample_channel_trajectory_inplace(out, channel, target, rng);
  return out;
}

}  // namespace ghostqc
