#include <benchmark/benchmark.h>

#include "gmeasure/kernels.hpp"
#include "gmeasure/measure.hpp"
#include "gmeasure/models.hpp"

namespace {

using namespace gmeasure;

const RenewalModel& harmonic_renewal() {
  static const RenewalModel m(QRule::harmonic(), 0.5);
  return m;
}

const BergerModel& berger() {
  static const BergerModel m;
  return m;
}

Exec exec_of(const benchmark::State& s) { return s.range(0) ? Exec::kParallel : Exec::kSerial; }

void BM_HitCounts(benchmark::State& state) {
  const AnchoredPast p({0}, {1});
  for (auto _ : state)
    benchmark::DoNotOptimize(hit_counts(harmonic_renewal(), p, 500, 1, 4000, 7, exec_of(state)));
  state.SetLabel(state.range(0) ? "parallel" : "serial");
}
BENCHMARK(BM_HitCounts)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_WindowCounts(benchmark::State& state) {
  const AnchoredPast p({1});
  for (auto _ : state)
    benchmark::DoNotOptimize(window_counts(berger(), p, 100, 4, 20000, 7, exec_of(state)));
  state.SetLabel(state.range(0) ? "parallel" : "serial");
}
BENCHMARK(BM_WindowCounts)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_CesaroTable(benchmark::State& state) {
  const SpinFlipFactor m(0.3);
  const AnchoredPast p({1});
  ExactOptions opts;
  opts.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(cesaro_table(m, p, 200, 8, opts));
  state.SetLabel(state.range(0) ? "parallel" : "serial");
}
BENCHMARK(BM_CesaroTable)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
