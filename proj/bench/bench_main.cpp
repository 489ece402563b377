// Serial vs OpenMP timings for the data-parallel kernels. Set
// MUTUALSEC_THREADS to control the parallel width.

#include <benchmark/benchmark.h>

#include "mutualsec/network.hpp"
#include "mutualsec/sim.hpp"
#include "mutualsec/strategy.hpp"

using namespace mutualsec;

namespace {

const Environment kEnv{0.3, 0.05, 0.3, 0.2};

Exec exec_of(const benchmark::State& state) { return state.range(0) ? Exec::parallel : Exec::serial; }

void BM_Mct(benchmark::State& state) {
  const auto tm = ring_lattice(static_cast<std::size_t>(state.range(1)), 4, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(has_mct(tm, kDefaultMctLimit, exec_of(state)));
}
BENCHMARK(BM_Mct)->ArgsProduct({{0, 1}, {14, 18}})->Unit(benchmark::kMillisecond);

void BM_BruteForce(benchmark::State& state) {
  const auto tm = ring_lattice(static_cast<std::size_t>(state.range(1)), 4, 1.0);
  const auto mon = MonitoringModel::rational(0.1);
  for (auto _ : state)
    benchmark::DoNotOptimize(brute_force_optimal(kEnv, mon, tm, kDefaultBruteForceCap, exec_of(state)));
}
BENCHMARK(BM_BruteForce)->ArgsProduct({{0, 1}, {10, 14}})->Unit(benchmark::kMillisecond);

void BM_SimulateMany(benchmark::State& state) {
  const auto tm = complete_graph(8, 1.0);
  const auto mon = MonitoringModel::rational(0.1);
  const auto design = optimal_design(kEnv, mon, tm, Subset::all(8)).design();
  const auto profile = BehaviorProfile::uniform(8, Behavior::compliant);
  for (auto _ : state)
    benchmark::DoNotOptimize(simulate_many(design, profile, kEnv, mon, tm, 10000, 16, 1, exec_of(state)));
}
BENCHMARK(BM_SimulateMany)->ArgsProduct({{0, 1}, {8}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
