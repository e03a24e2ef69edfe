#include "hogibbs/samplers.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <latch>
#include <thread>
#include <utility>

#include "hogibbs/errors.hpp"
#include "hogibbs/live_state.hpp"
#include "hogibbs/state_history.hpp"

namespace hogibbs {

namespace {

constexpr std::uint64_t kDelayStream = 0xde1a7;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void finish_timing(SampleRun& run, Clock::time_point start) {
  run.seconds = seconds_since(start);
  run.updates_per_second =
      run.seconds > 0 ? static_cast<double>(run.steps) / run.seconds : 0.0;
}

// Sequential chain body shared by run_sequential and run_multimodel.
void sequential_chain(const FactorGraph& graph, std::uint64_t steps, LiveState& live,
                      RngStream& rng, SampleSink& sink) {
  const std::size_t n = graph.num_variables();
  std::vector<double> probs(static_cast<std::size_t>(graph.max_domain_size()));
  for (std::uint64_t t = 0; t < steps; ++t) {
    const auto i = static_cast<VarId>(rng.index(n));
    std::span<double> p(probs.data(), static_cast<std::size_t>(graph.domain_size(i)));
    live.conditional(i, p);
    live.set(i, sample_categorical(p, rng.uniform()));
    sink.record(t, live.values());
  }
}

void require_steps(std::uint64_t steps) {
  if (steps < 1) throw ConfigError("steps must be >= 1");
}

}  // namespace

SampleRun run_sequential(const FactorGraph& graph, std::uint64_t steps,
                         const State& initial, RngStream rng, SampleSink sink) {
  require_steps(steps);
  const auto start = Clock::now();
  LiveState live(graph, initial);
  sequential_chain(graph, steps, live, rng, sink);
  SampleRun run(std::move(sink));
  run.steps = steps;
  run.final_state = live.state();
  run.state_bytes = graph.num_variables() * sizeof(int);
  finish_timing(run, start);
  return run;
}

namespace {

SampleRun run_two_thread_pattern(const FactorGraph& graph, std::uint64_t steps,
                                 const State& initial, const DelayModel& delay_model,
                                 RngStream& rng, SampleSink sink) {
  const std::size_t n = graph.num_variables();
  const auto& racing_mask = delay_model.racing();
  if (racing_mask.size() != n) {
    throw ConfigError("two-thread pattern configured for a different variable count");
  }
  std::vector<VarId> racing;
  for (std::size_t v = 0; v < n; ++v) {
    if (racing_mask[v]) racing.push_back(static_cast<VarId>(v));
  }
  const auto start = Clock::now();
  LiveState live(graph, initial);
  const auto width = static_cast<std::size_t>(graph.max_domain_size());
  std::vector<double> pa(width), pb(width);
  int max_delay = 0;
  std::uint64_t t = 0;
  while (t < steps) {
    const auto a = static_cast<VarId>(rng.index(n));
    std::span<double> probs_a(pa.data(), static_cast<std::size_t>(graph.domain_size(a)));
    if (racing_mask[a] && t + 1 < steps) {
      // Second racer: uniform over the other racing variables.
      const auto pos = static_cast<std::uint64_t>(
          std::lower_bound(racing.begin(), racing.end(), a) - racing.begin());
      const auto k = rng.index(racing.size() - 1);
      const VarId b = racing[k < pos ? k : k + 1];
      std::span<double> probs_b(pb.data(), static_cast<std::size_t>(graph.domain_size(b)));
      // Both workers read the same snapshot before either writes.
      live.conditional(a, probs_a);
      live.conditional(b, probs_b);
      const int za = sample_categorical(probs_a, rng.uniform());
      const int zb = sample_categorical(probs_b, rng.uniform());
      live.set(a, za);
      sink.record(t++, live.values());
      live.set(b, zb);
      sink.record(t++, live.values());
      max_delay = 1;
    } else {
      live.conditional(a, probs_a);
      live.set(a, sample_categorical(probs_a, rng.uniform()));
      sink.record(t++, live.values());
    }
  }
  SampleRun run(std::move(sink));
  run.steps = steps;
  run.final_state = live.state();
  run.state_bytes = n * sizeof(int);
  run.max_realized_delay = max_delay;
  finish_timing(run, start);
  return run;
}

}  // namespace

SampleRun run_hogwild_simulated(const FactorGraph& graph, std::uint64_t steps,
                                const State& initial, const DelayModel& delay_model,
                                RngStream rng, SampleSink sink) {
  require_steps(steps);
  if (delay_model.kind() == DelayKind::kTwoThreadPattern) {
    return run_two_thread_pattern(graph, steps, initial, delay_model, rng,
                                  std::move(sink));
  }
  const auto start = Clock::now();
  const std::size_t n = graph.num_variables();
  RngStream delay_rng = rng.fork(kDelayStream);
  LiveState live(graph, initial);
  StateHistory history(initial, delay_model.support_max());
  std::vector<int> view = initial.values;
  ConditionalWorkspace ws(graph);
  std::vector<double> probs(static_cast<std::size_t>(graph.max_domain_size()));
  std::vector<std::pair<VarId, int>> patched;
  patched.reserve(graph.max_blanket_size());
  const bool has_delays = delay_model.support_max() > 0;
  int max_delay = 0;

  for (std::uint64_t t = 0; t < steps; ++t) {
    const auto i = static_cast<VarId>(rng.index(n));
    std::span<double> p(probs.data(), static_cast<std::size_t>(graph.domain_size(i)));
    if (has_delays) {
      for (VarId j : graph.markov_blanket(i)) {
        int d = delay_model.sample(delay_rng);
        d = static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(d), t));
        max_delay = std::max(max_delay, d);
        if (d == 0) continue;
        const int stale = history.read(j, d);
        if (stale != view[j]) {
          patched.emplace_back(j, view[j]);
          view[j] = stale;
        }
      }
    }
    if (patched.empty()) {
      live.conditional(i, p);
    } else {
      conditional_into(graph, view, i, ws, p);
      for (const auto& [j, v] : patched) view[j] = v;
      patched.clear();
    }
    const int z = sample_categorical(p, rng.uniform());
    live.set(i, z);
    history.write(i, z);
    view[i] = z;
    sink.record(t, live.values());
  }

  SampleRun run(std::move(sink));
  run.steps = steps;
  run.final_state = live.state();
  run.state_bytes = n * sizeof(int);
  run.max_realized_delay = max_delay;
  finish_timing(run, start);
  return run;
}

SampleRun run_hogwild_parallel(const FactorGraph& graph, std::uint64_t total_steps,
                               const State& initial, int workers, RngStream rng,
                               SampleSink sink) {
  if (workers < 1) throw ConfigError("workers must be >= 1");
  require_steps(total_steps);
  graph.validate_state(initial.values);
  const std::size_t n = graph.num_variables();

  std::vector<int> shared = initial.values;
  std::atomic<std::uint64_t> counter{0};
  std::vector<SampleSink> sinks(static_cast<std::size_t>(workers), sink.empty_copy());
  std::latch ready(workers + 1);
  std::latch go(1);

  auto body = [&](int w) {
    RngStream local_rng(rng.seed(), rng.stream() + static_cast<std::uint64_t>(w));
    ConditionalWorkspace ws(graph);
    std::vector<int> view = initial.values;
    std::vector<double> probs(static_cast<std::size_t>(graph.max_domain_size()));
    SampleSink& local = sinks[static_cast<std::size_t>(w)];
    const auto& support = local.support();
    ready.count_down();
    go.wait();
    for (;;) {
      const std::uint64_t step = counter.fetch_add(1, std::memory_order_relaxed);
      if (step >= total_steps) break;
      const auto i = static_cast<VarId>(local_rng.index(n));
      for (VarId j : graph.markov_blanket(i)) {
        view[j] = std::atomic_ref<int>(shared[j]).load(std::memory_order_relaxed);
      }
      std::span<double> p(probs.data(), static_cast<std::size_t>(graph.domain_size(i)));
      conditional_into(graph, view, i, ws, p);
      const int z = sample_categorical(p, local_rng.uniform());
      std::atomic_ref<int>(shared[i]).store(z, std::memory_order_relaxed);
      view[i] = z;
      if (step >= local.burn_in()) {
        for (VarId j : support) {
          if (j != i) view[j] = std::atomic_ref<int>(shared[j]).load(std::memory_order_relaxed);
        }
        local.record(step, view);
      }
    }
  };

  std::vector<std::jthread> threads;
  threads.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) threads.emplace_back(body, w);
  ready.arrive_and_wait();
  const auto start = Clock::now();
  go.count_down();
  threads.clear();  // joins

  SampleRun run(sink.empty_copy());
  run.steps = total_steps;
  finish_timing(run, start);
  for (const SampleSink& s : sinks) run.sink.merge(s);
  run.final_state = State(std::move(shared));
  run.state_bytes = n * sizeof(int);
  return run;
}

SampleRun run_multimodel(const FactorGraph& graph, std::uint64_t total_steps,
                         const State& initial, int workers, RngStream rng,
                         SampleSink sink) {
  if (workers < 1) throw ConfigError("workers must be >= 1");
  require_steps(total_steps);
  graph.validate_state(initial.values);
  const auto count = static_cast<std::size_t>(workers);
  std::vector<SampleSink> sinks(count, sink.empty_copy());
  std::vector<State> finals(count);
  std::latch ready(workers + 1);
  std::latch go(1);

  auto body = [&](std::size_t w) {
    const std::uint64_t steps = total_steps / count + (w < total_steps % count ? 1 : 0);
    RngStream local_rng(rng.seed(), rng.stream() + w);
    LiveState live(graph, initial);
    ready.count_down();
    go.wait();
    if (steps > 0) sequential_chain(graph, steps, live, local_rng, sinks[w]);
    finals[w] = live.state();
  };

  std::vector<std::jthread> threads;
  threads.reserve(count);
  for (std::size_t w = 0; w < count; ++w) threads.emplace_back(body, w);
  ready.arrive_and_wait();
  const auto start = Clock::now();
  go.count_down();
  threads.clear();

  SampleRun run(sink.empty_copy());
  run.steps = total_steps;
  finish_timing(run, start);
  for (const SampleSink& s : sinks) run.sink.merge(s);
  run.final_state = std::move(finals.front());
  run.state_bytes = count * graph.num_variables() * sizeof(int);
  return run;
}

}  // namespace hogibbs
