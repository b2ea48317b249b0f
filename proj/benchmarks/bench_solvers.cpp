#include <random>

#include <benchmark/benchmark.h>

#include "instances.hpp"
#include "qsched/ilp.hpp"

using namespace qsched;

namespace {

std::vector<SlotInstance> instances(int sats, int pairs, bool reflection) {
  std::mt19937_64 rng(1);
  testing_support::InstanceShape shape;
  shape.max_sats = sats;
  shape.max_pairs = pairs;
  shape.max_stations = 8;
  shape.max_cap = 3;
  shape.reflection = reflection;
  shape.relay_density = 0.1;
  std::vector<SlotInstance> out;
  for (int k = 0; k < 16; ++k) out.push_back(testing_support::random_instance(rng, shape));
  return out;
}

void BM_RandomMip(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::vector<ilp::MipProblem> mips;
  for (int k = 0; k < 64; ++k) mips.push_back(testing_support::random_mip(rng));
  std::size_t k = 0;
  for (auto _ : state) benchmark::DoNotOptimize(ilp::solve_mip(mips[k++ % mips.size()]));
}
BENCHMARK(BM_RandomMip);

void BM_Hungarian(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> w(0.0, 100.0);
  std::vector<std::vector<double>> m(n, std::vector<double>(n));
  for (auto& row : m) {
    for (auto& v : row) v = w(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(ilp::hungarian(m));
  state.SetComplexityN(n);
}
BENCHMARK(BM_Hungarian)->RangeMultiplier(2)->Range(8, 256)->Complexity(benchmark::oNCubed);

void BM_Mwis(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> w(1.0, 10.0);
  std::bernoulli_distribution edge(0.2);
  std::vector<double> weights(n);
  for (auto& v : weights) v = w(rng);
  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (edge(rng)) edges.push_back({a, b});
    }
  }
  for (auto _ : state) benchmark::DoNotOptimize(ilp::mwis_exact(weights, edges));
}
BENCHMARK(BM_Mwis)->Arg(16)->Arg(32)->Arg(48);

void BM_Policy(benchmark::State& state) {
  const auto policy = static_cast<Policy>(state.range(0));
  const auto set = instances(8, 8, uses_reflection(policy));
  std::size_t k = 0;
  for (auto _ : state) benchmark::DoNotOptimize(solve(set[k++ % set.size()], policy));
  state.SetLabel(to_string(policy));
}
BENCHMARK(BM_Policy)
    ->Arg(static_cast<int>(Policy::kPrimaryRatesum))
    ->Arg(static_cast<int>(Policy::kPrimaryRatefair))
    ->Arg(static_cast<int>(Policy::kReflectionRatesum))
    ->Arg(static_cast<int>(Policy::kReflectionRatefair));

}  // namespace
