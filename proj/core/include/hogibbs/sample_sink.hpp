#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hogibbs/factor_graph.hpp"

namespace hogibbs {

enum class SinkMode { kJointHistogram, kMarginalAccumulator, kEventCounter, kThinnedTrace };

std::string to_string(SinkMode mode);

/// max(1000, steps / 100).
std::uint64_t default_burn_in(std::uint64_t steps);

struct Event {
  std::string name;
  std::function<bool(std::span<const int>)> predicate;
  /// Variables the predicate looks at; empty means all of them.
  std::vector<VarId> reads;
};

/// Consumes the post-update states of a chain. Samples with step index below
/// burn_in are discarded; counts are exact.
class SampleSink {
 public:
  static SampleSink joint_histogram(std::vector<int> domain_sizes,
                                    std::uint64_t burn_in = 0);
  static SampleSink marginals(std::vector<int> domain_sizes,
                              std::vector<std::vector<VarId>> subsets,
                              std::uint64_t burn_in = 0);
  static SampleSink events(std::size_t num_variables, std::vector<Event> events,
                           std::uint64_t burn_in = 0);
  static SampleSink thinned_trace(std::size_t num_variables, std::uint64_t stride,
                                  std::uint64_t burn_in = 0);

  SinkMode mode() const { return mode_; }
  std::uint64_t burn_in() const { return burn_in_; }
  std::uint64_t recorded() const { return recorded_; }

  /// Records the state after the update with 0-based index step.
  void record(std::uint64_t step, std::span<const int> state) {
    if (step < burn_in_) return;
    if (mode_ == SinkMode::kThinnedTrace && (step - burn_in_) % stride_ != 0) return;
    accept(state);
  }

  /// Variables record() reads.
  const std::vector<VarId>& support() const { return support_; }

  /// A sink with the same configuration and no samples.
  SampleSink empty_copy() const;
  void merge(const SampleSink& other);

  const EmpiricalDistribution& joint() const;
  const std::vector<std::vector<VarId>>& subsets() const { return subsets_; }
  const EmpiricalDistribution& marginal(std::size_t k) const;
  std::size_t num_events() const { return events_.size(); }
  const std::string& event_name(std::size_t k) const { return events_[k].name; }
  std::uint64_t event_count(std::size_t k) const { return event_counts_[k]; }
  const std::vector<State>& trace() const { return trace_; }
  std::uint64_t stride() const { return stride_; }

  /// Columns: state-or-event, count, probability.
  void write_csv(std::ostream& out) const;
  nlohmann::json to_json() const;

 private:
  SampleSink() = default;
  void accept(std::span<const int> state);

  SinkMode mode_ = SinkMode::kJointHistogram;
  std::uint64_t burn_in_ = 0;
  std::uint64_t stride_ = 1;
  std::uint64_t recorded_ = 0;
  std::vector<VarId> support_;

  JointIndexer indexer_;
  EmpiricalDistribution joint_;
  std::vector<std::vector<VarId>> subsets_;
  std::vector<JointIndexer> subset_indexers_;
  std::vector<EmpiricalDistribution> marginals_;
  std::vector<int> scratch_;
  std::vector<Event> events_;
  std::vector<std::uint64_t> event_counts_;
  std::vector<State> trace_;
};

/// "0:1:1" style label for a joint assignment.
std::string state_label(std::span<const int> values);

}  // namespace hogibbs
