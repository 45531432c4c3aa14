#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "ghostqc/rng.hpp"

namespace ghostqc {

using cdouble = std::complex<double>;

enum class Pauli : std::uint8_t { I, X, Y, Z };

// Dense n-qubit state. Qubit 0 is the most significant bit of the amplitude
// index, so |q0 q1 ... q_{n-1}> maps to index (q0<<(n-1)) | ... | q_{n-1}.
struct StateVector {
  int num_qubits = 0;
  std::vector<cdouble> amplitudes;

  static StateVector zero_state(int num_qubits);
  // Product state from per-qubit amplitude pairs.
  static StateVector product_state(const std::vector<std::array<cdouble, 2>>& qubits);

  std::size_t dim() const { return amplitudes.size(); }
  double norm() const;
  void normalize();
};

struct DensityMatrix {
  int num_qubits = 0;
  std::vector<cdouble> entries;  // row-major, 2^n x 2^n

  static DensityMatrix from_state(const StateVector& psi);

  std::size_t dim() const;
  cdouble& at(std::size_t r, std::size_t c);
  const cdouble& at(std::size_t r, std::size_t c) const;
  double trace_real() const;
};

enum class GateKind {
  H, X, Y, Z,
  RX, RY, RZ,
  CZ, CNOT,
  RXX, RYY, RZZ,
};

// Concrete 1- or 2-qubit unitary. For two-qubit gates targets[0] is the more
// significant bit of the 4x4 matrix basis |t0 t1>.
struct Gate {
  GateKind kind = GateKind::H;
  int num_targets = 1;
  std::array<int, 2> targets{0, -1};
  double angle = 0.0;  // rotations only
  std::array<cdouble, 16> matrix{};  // row-major; 2x2 gates use [0..3]

  static Gate h(int t);
  static Gate x(int t);
  static Gate y(int t);
  static Gate z(int t);
  static Gate rx(int t, double angle);
  static Gate ry(int t, double angle);
  static Gate rz(int t, double angle);
  static Gate cz(int a, int b);
  static Gate cnot(int control, int target);
  static Gate rxx(int a, int b, double angle);
  static Gate ryy(int a, int b, double angle);
  static Gate rzz(int a, int b, double angle);

  Gate dagger() const;
  int dim() const { return num_targets == 1 ? 2 : 4; }
};

enum class ChannelKind { Depolarizing, AmplitudeDamping, PhaseDamping };

// Single-qubit Kraus channel; operators satisfy sum K^dag K = I.
struct KrausChannel {
  ChannelKind kind = ChannelKind::Depolarizing;
  double rate = 0.0;
  std::vector<std::array<cdouble, 4>> operators;  // 2x2 row-major each

  static KrausChannel depolarizing(double lambda);
  static KrausChannel amplitude_damping(double p);
  static KrausChannel phase_damping(double p);
  static KrausChannel make(ChannelKind kind, double rate);
};

// --- statevector operations -------------------------------------------------

void apply_gate_inplace(StateVector& state, const Gate& gate);
StateVector apply_gate(const StateVector& state, const Gate& gate);

// <psi| P_0 x P_1 x ... |psi> for one Pauli label per qubit.
double pauli_expectation(const StateVector& state, const std::vector<Pauli>& labels);

// Applies the Pauli string to the state (in place).
void apply_pauli_string_inplace(StateVector& state, const std::vector<Pauli>& labels);

cdouble inner_product(const StateVector& bra, const StateVector& ket);

// Deterministic Haar-random single-qubit state for a fixed seed.
StateVector haar_random_qubit(std::uint64_t seed);
std::array<cdouble, 2> haar_random_qubit_amplitudes(Rng& rng);

// Equivalence up to a global phase; returns max elementwise deviation after
// aligning phases on the largest-magnitude entry.
double phase_aligned_distance(const std::vector<cdouble>& a, const std::vector<cdouble>& b);

// Decomposition of exp(-i angle P(x)P / 2) for P in {X, Y, Z} into CNOTs and a
// single-qubit rotation (plus basis changes for YY). Targets (0, 1).
std::vector<Gate> two_qubit_rotation_decomposed(Pauli axis, double angle);

// Dense 4x4 of a gate sequence on two qubits, in application order.
std::array<cdouble, 16> compose_two_qubit_sequence(const std::vector<Gate>& gates);

// --- density-matrix operations ----------------------------------------------

void apply_gate_density_inplace(DensityMatrix& rho, const Gate& gate);
DensityMatrix apply_channel_density(const DensityMatrix& rho, const KrausChannel& channel, int target);
double pauli_expectation_density(const DensityMatrix& rho, const std::vector<Pauli>& labels);

// --- trajectory sampling ----------------------------------------------------

// Picks one Kraus branch with probability <K^dag K> and renormalizes.
void sample_channel_trajectory_inplace(StateVector& state, const KrausChannel& channel,
                                       int target, Rng& rng);
StateVector sample_channel_trajectory(const StateVector& state, const KrausChannel& channel,
                                      int target, Rng& rng);

}  // namespace ghostqc
