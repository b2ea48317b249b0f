#include <benchmark/benchmark.h>

#include "qsched/simharness.hpp"

using namespace qsched;

namespace {

ScenarioConfig scenario(int rings, int sats) {
  ScenarioConfig c;
  c.constellation.rings = rings;
  c.constellation.sats_per_ring = sats;
  c.slot_duration_s = 60.0;
  c.threads = 1;
  return c;
}

void BM_Propagate(benchmark::State& state) {
  const auto c = scenario(20, 20);
  int t = 0;
  for (auto _ : state) benchmark::DoNotOptimize(propagate(c.constellation, c.stations, t++ % 1440, 60.0));
}
BENCHMARK(BM_Propagate);

void BM_BuildWeights(benchmark::State& state) {
  const auto c = scenario(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)));
  const auto net = make_network(c);
  const auto weather = load_environment(c);
  const bool reflection = state.range(1) != 0;
  int t = 0;
  for (auto _ : state) {
    const auto snap = propagate(c.constellation, c.stations, t++ % 1440, 60.0);
    if (reflection) {
      benchmark::DoNotOptimize(build_reflection_weights(snap, net, c.link, weather, c.month));
    } else {
      benchmark::DoNotOptimize(build_weights(snap, net, c.link, weather, c.month));
    }
  }
}
BENCHMARK(BM_BuildWeights)->Args({10, 0})->Args({20, 0})->Args({10, 1})->Args({20, 1});

void BM_Slot(benchmark::State& state) {
  auto c = scenario(20, 20);
  c.policy = static_cast<Policy>(state.range(0));
  const auto net = make_network(c);
  const auto weather = load_environment(c);
  SolverOptions options;
  options.mip.node_limit = 5000;
  int t = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_slot(c, net, weather, (t++ * 37) % 1440, options));
  state.SetLabel(to_string(c.policy));
}
BENCHMARK(BM_Slot)
    ->Arg(static_cast<int>(Policy::kPrimaryRatesum))
    ->Arg(static_cast<int>(Policy::kReflectionRatefair))
    ->Unit(benchmark::kMillisecond);

void BM_CaseStudyPoint(benchmark::State& state) {
  CaseStudyParams p;
  p.phase_samples = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(case_study(3000e3, p));
}
BENCHMARK(BM_CaseStudyPoint)->Arg(181)->Arg(721)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
