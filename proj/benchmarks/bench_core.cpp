#include "ddelab/integrator.hpp"
#include "ddelab/manifold.hpp"
#include "ddelab/periodic.hpp"
#include "ddelab/spectrum.hpp"
#include "ddelab/threshold.hpp"

#include <benchmark/benchmark.h>

using namespace ddelab;

static void BM_IntegrateLimit(benchmark::State& state) {
  IntegratorOptions opt;
  opt.steps_per_delay = static_cast<int>(state.range(0));
  const SystemSpec sys = SystemSpec::limit(1.0, 7.38);
  for (auto _ : state) benchmark::DoNotOptimize(integrate(sys, HistoryFunction::constant(0.4), 100.0, opt).t_end());
}
BENCHMARK(BM_IntegrateLimit)->Arg(100)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

static void BM_IntegrateSmooth(benchmark::State& state) {
  const SystemSpec sys = SystemSpec::smooth(1.0, 7.38, 2.0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(integrate(sys, HistoryFunction::constant(0.4), 100.0).t_end());
}
BENCHMARK(BM_IntegrateSmooth)->Arg(20)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_ShootPlus(benchmark::State& state) {
  const SystemSpec sys = SystemSpec::limit(1.0, 7.38);
  for (auto _ : state) benchmark::DoNotOptimize(shoot_branch(sys, Branch::Plus).landmarks.t2);
}
BENCHMARK(BM_ShootPlus)->Unit(benchmark::kMillisecond);

static void BM_ClassifyZ(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(classify_zd(1.0, 7.38).evidence);
}
BENCHMARK(BM_ClassifyZ)->Unit(benchmark::kMillisecond);

static void BM_Spectrum(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(spectrum(1.0, 2.0, 5).lambda0);
}
BENCHMARK(BM_Spectrum);

static void BM_Monodromy(benchmark::State& state) {
  const SystemSpec sys = SystemSpec::smooth(1.0, 7.38, 2.0, 200);
  const Trajectory tr = integrate(sys, HistoryFunction::constant(0.5), 200.0);
  const auto orbit = detect_periodic(tr, 1.0, 100.0);
  if (!orbit) {
    state.SkipWithError("no orbit");
    return;
  }
  for (auto _ : state)
    benchmark::DoNotOptimize(monodromy_multipliers(*orbit, static_cast<int>(state.range(0))).trivial_error);
}
BENCHMARK(BM_Monodromy)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
