#include <benchmark/benchmark.h>

#include "ghostqc/qstate.hpp"

using namespace ghostqc;

namespace {

StateVector random_state(int n, Rng& rng) {
  StateVector s = StateVector::zero_state(n);
  for (auto& a : s.amplitudes) a = {rng.normal(), rng.normal()};
  s.normalize();
  return s;
}

void BM_SingleQubitGate(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(1);
  StateVector psi = random_state(n, rng);
  const Gate g = Gate::ry(n / 2, 0.37);
  for (auto _ : state) {
    apply_gate_inplace(psi, g);
    benchmark::DoNotOptimize(psi.amplitudes.data());
  }
  state.SetItemsProcessed(state.iterations() * (1LL << n));
}
BENCHMARK(BM_SingleQubitGate)->DenseRange(8, 16, 4);

void BM_TwoQubitGate(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(2);
  StateVector psi = random_state(n, rng);
  const Gate g = Gate::rzz(0, n - 1, 0.37);
  for (auto _ : state) {
    apply_gate_inplace(psi, g);
    benchmark::DoNotOptimize(psi.amplitudes.data());
  }
  state.SetItemsProcessed(state.iterations() * (1LL << n));
}
BENCHMARK(BM_TwoQubitGate)->DenseRange(8, 16, 4);

void BM_PauliExpectation(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(3);
  const StateVector psi = random_state(n, rng);
  std::vector<Pauli> labels(n, Pauli::I);
  labels[0] = Pauli::Z;
  labels[n - 1] = Pauli::X;
  for (auto _ : state) {
    benchmark::DoNotOptimize(pauli_expectation(psi, labels));
  }
}
BENCHMARK(BM_PauliExpectation)->DenseRange(8, 16, 4);

void BM_TrajectoryChannel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(4);
  const StateVector psi = random_state(n, rng);
  const KrausChannel ch = KrausChannel::depolarizing(0.05);
  for (auto _ : state) {
    StateVector s = psi;
    sample_channel_trajectory_inplace(s, ch, n / 2, rng);
    benchmark::DoNotOptimize(s.amplitudes.data());
  }
}
BENCHMARK(BM_TrajectoryChannel)->DenseRange(8, 16, 4);

}  // namespace
