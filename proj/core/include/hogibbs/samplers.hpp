#pragma once

#include <cstdint>
#include <utility>

#include "hogibbs/delay_model.hpp"
#include "hogibbs/factor_graph.hpp"
#include "hogibbs/rng.hpp"
#include "hogibbs/sample_sink.hpp"

namespace hogibbs {

struct SampleRun {
  explicit SampleRun(SampleSink s) : sink(std::move(s)) {}

  SampleSink sink;
  std::uint64_t steps = 0;
  double seconds = 0.0;
  double updates_per_second = 0.0;
  State final_state;
  /// Bytes of chain state held by all workers together.
  std::uint64_t state_bytes = 0;
  /// Largest delay actually applied after clamping (simulated runs).
  int max_realized_delay = 0;
};

/// Random-scan Gibbs: each step picks a variable uniformly and resamples it
/// from its conditional at the current state.
SampleRun run_sequential(const FactorGraph& graph, std::uint64_t steps,
                         const State& initial, RngStream rng, SampleSink sink);

/// Single-threaded simulation of asynchronous Gibbs. Markov-blanket reads are
/// stale by delays drawn from delay_model (clamped to the write count). The
/// variable choice and resampling consume the same draws as run_sequential,
/// and delays come from a separate child stream, so a zero-delay model
/// reproduces run_sequential exactly.
SampleRun run_hogwild_simulated(const FactorGraph& graph, std::uint64_t steps,
                                const State& initial, const DelayModel& delay_model,
                                RngStream rng, SampleSink sink);

/// Lock-free Gibbs over one shared state: `workers` threads each pick a
/// variable, read its blanket with relaxed per-slot atomic loads, resample and
/// store. Worker w draws from stream rng.stream() + w. Nondeterministic.
SampleRun run_hogwild_parallel(const FactorGraph& graph, std::uint64_t total_steps,
                               const State& initial, int workers, RngStream rng,
                               SampleSink sink);

/// `workers` independent sequential chains with private state, splitting
/// total_steps between them. Each chain applies the sink's burn-in to its
/// own step index. Worker 0 reproduces run_sequential on the same stream.
SampleRun run_multimodel(const FactorGraph& graph, std::uint64_t total_steps,
                         const State& initial, int workers, RngStream rng,
                         SampleSink sink);

}  // namespace hogibbs
