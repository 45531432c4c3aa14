#include <benchmark/benchmark.h>

#include "ghostqc/qcsgi.hpp"

using namespace ghostqc;

namespace {

struct Fixture {
  Image truth;
  PatternSet patterns;
  BucketSignals buckets;
  HybridModel model;
};

Fixture make_fixture(int m, int qubits, int layers) {
  Fixture f{make_fixture_object("glyph", 32), generate_patterns(m, 32, 32, 7), {}, {}};
  f.buckets = forward_buckets(f.patterns, f.truth);
  ModelConfig mc;
  mc.qubits_per_patch = qubits;
  mc.layers = layers;
  mc.image_side = 32;
  mc.seed = 9;
  f.model = build_model(mc, m);
  return f;
}

void BM_HybridForward(benchmark::State& state) {
  Fixture f = make_fixture(static_cast<int>(state.range(0)), 8, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hybrid_forward(f.model, f.buckets.values).image.data.data());
  }
}
BENCHMARK(BM_HybridForward)->Arg(64)->Arg(256);

void BM_AdjointJacobians(benchmark::State& state) {
  Fixture f = make_fixture(static_cast<int>(state.range(0)), 8, 3);
  const LossResult base = loss(f.model, f.buckets, f.patterns, 1e-6, true);
  for (auto _ : state) {
    const Gradients g = loss_gradients(f.model, base, f.buckets, f.patterns, 1e-6,
                                       GradBackend::Adjoint);
    benchmark::DoNotOptimize(g.squared_norm);
  }
}
BENCHMARK(BM_AdjointJacobians)->Arg(64)->Arg(256);

void BM_PsrJacobians(benchmark::State& state) {
  Fixture f = make_fixture(static_cast<int>(state.range(0)), 8, 3);
  const LossResult base = loss(f.model, f.buckets, f.patterns, 1e-6, true);
  for (auto _ : state) {
    const Gradients g =
        loss_gradients(f.model, base, f.buckets, f.patterns, 1e-6, GradBackend::Psr);
    benchmark::DoNotOptimize(g.squared_norm);
  }
}
BENCHMARK(BM_PsrJacobians)->Arg(64);

void BM_TrainIteration(benchmark::State& state) {
  Fixture f = make_fixture(64, 8, 3);
  TrainConfig cfg;
  cfg.max_iterations = 1;
  cfg.learning_rate = 0.002;
  for (auto _ : state) {
    HybridModel model = f.model;
    benchmark::DoNotOptimize(train(model, f.buckets, f.patterns, cfg).best_loss);
  }
}
BENCHMARK(BM_TrainIteration);

}  // namespace
