#include <benchmark/benchmark.h>

#include "hogibbs/coupling.hpp"
#include "hogibbs/influence.hpp"
#include "hogibbs/model_zoo.hpp"
#include "hogibbs/samplers.hpp"

using namespace hogibbs;

namespace {

FactorGraph ising(std::size_t n) {
  RngStream rng(1);
  return build_random_ising(n, 3, 0.2, {}, rng);
}

SampleSink single_event(std::size_t n) {
  std::vector<Event> events{{"x0", [](std::span<const int> s) { return s[0] == 1; }, {0}}};
  return SampleSink::events(n, events, 0);
}

void BM_Sequential(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto g = ising(n);
  const auto sink = single_event(n);
  const std::uint64_t steps = 1'000'000;
  for (auto _ : state) {
    auto run = run_sequential(g, steps, State(n, 0), RngStream(2), sink);
    benchmark::DoNotOptimize(run.steps);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * steps));
}
BENCHMARK(BM_Sequential)->Arg(1000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

void BM_HogwildSimulated(benchmark::State& state) {
  const std::size_t n = 1000;
  const auto g = ising(n);
  const auto sink = single_event(n);
  const auto delays = build_maxent_delay(200, static_cast<double>(state.range(0)), n).delay_model();
  const std::uint64_t steps = 1'000'000;
  for (auto _ : state) {
    auto run = run_hogwild_simulated(g, steps, State(n, 0), delays, RngStream(3), sink);
    benchmark::DoNotOptimize(run.steps);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * steps));
}
BENCHMARK(BM_HogwildSimulated)->Arg(0)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_HogwildParallel(benchmark::State& state) {
  const std::size_t n = 1'000'000;
  const auto g = ising(n);
  const auto sink = single_event(n);
  const int workers = static_cast<int>(state.range(0));
  const std::uint64_t steps = 4'000'000;
  for (auto _ : state) {
    auto run = run_hogwild_parallel(g, steps, State(n, 0), workers, RngStream(4), sink);
    benchmark::DoNotOptimize(run.steps);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * steps));
}
BENCHMARK(BM_HogwildParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_Multimodel(benchmark::State& state) {
  const std::size_t n = 1'000'000;
  const auto g = ising(n);
  const auto sink = single_event(n);
  const int workers = static_cast<int>(state.range(0));
  const std::uint64_t steps = 4'000'000;
  for (auto _ : state) {
    auto run = run_multimodel(g, steps, State(n, 0), workers, RngStream(5), sink);
    benchmark::DoNotOptimize(run.steps);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * steps));
}
BENCHMARK(BM_Multimodel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_MonotoneCoupling(benchmark::State& state) {
  const std::size_t n = 1000;
  const auto g = ising(n);
  const auto delays = build_maxent_delay(200, static_cast<double>(state.range(0)), n).delay_model();
  CouplingOptions options;
  options.verify_order = false;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto run = run_monotone_coupling_ising(g, delays, RngStream(seed++), options);
    benchmark::DoNotOptimize(run.coupling_time);
  }
}
BENCHMARK(BM_MonotoneCoupling)->Arg(0)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_TotalInfluence(benchmark::State& state) {
  const auto g = ising(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(total_influence_exact(g).alpha);
}
BENCHMARK(BM_TotalInfluence)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
