// Serial reference kernels against the OpenMP kernels.
// Arguments: N, m.

#include <benchmark/benchmark.h>

#include "bouquet/thermo.hpp"

using namespace bouquet;

namespace {

const ExpMapModel& model() {
  static const ExpMapModel m = build_model(0.25);
  return m;
}

void build(benchmark::State& state, Kernel kernel) {
  const TruncationLevel level(static_cast<int>(state.range(0)));
  const int depth = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(build_operator(model(), PotentialSpec(), level, depth, kernel));
  state.counters["states"] = static_cast<double>(cylinder_count(level, depth));
}

void apply_op(benchmark::State& state, Kernel kernel) {
  const auto op = build_operator(model(), PotentialSpec(), TruncationLevel(static_cast<int>(state.range(0))),
                                 static_cast<int>(state.range(1)));
  std::vector<double> g(op.states, 1.0), out;
  for (auto _ : state) {
    bouquet::apply(op, g, out, kernel);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(op.weights.size()));
}

void adjoint(benchmark::State& state, Kernel kernel) {
  const auto op = build_operator(model(), PotentialSpec(), TruncationLevel(static_cast<int>(state.range(0))),
                                 static_cast<int>(state.range(1)));
  std::vector<double> nu(op.states, 1.0 / static_cast<double>(op.states)), out;
  for (auto _ : state) {
    apply_adjoint(op, nu, out, kernel);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(op.weights.size()));
}

void pressure(benchmark::State& state, Kernel kernel) {
  const auto op = build_operator(model(), PotentialSpec(), TruncationLevel(static_cast<int>(state.range(0))),
                                 static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(pressure_eigen(op, {1e-13, 100'000, kernel}));
}

void sizes(benchmark::internal::Benchmark* b) { b->Args({1, 6})->Args({1, 9})->Args({2, 5})->Args({3, 4}); }

}  // namespace

BENCHMARK_CAPTURE(build, serial, Kernel::Serial)->Apply(sizes)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(build, parallel, Kernel::Parallel)->Apply(sizes)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_CAPTURE(apply_op, serial, Kernel::Serial)->Apply(sizes);
BENCHMARK_CAPTURE(apply_op, parallel, Kernel::Parallel)->Apply(sizes)->UseRealTime();
BENCHMARK_CAPTURE(adjoint, serial, Kernel::Serial)->Apply(sizes);
BENCHMARK_CAPTURE(adjoint, parallel, Kernel::Parallel)->Apply(sizes)->UseRealTime();
BENCHMARK_CAPTURE(pressure, serial, Kernel::Serial)->Args({1, 9})->Args({2, 5})->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(pressure, parallel, Kernel::Parallel)->Args({1, 9})->Args({2, 5})->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
