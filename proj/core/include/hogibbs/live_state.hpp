#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hogibbs/factor_graph.hpp"

namespace hogibbs {

/// The current state of one chain plus cached summaries for factors that
/// expose them. Conditionals at the current state cost O(sum of non-summary
/// scope sizes) and O(1) per summary factor.
class LiveState {
 public:
  LiveState(const FactorGraph& graph, State initial);

  const FactorGraph& graph() const { return *graph_; }
  const State& state() const { return state_; }
  std::span<const int> values() const { return state_.values; }
  int operator[](VarId i) const { return state_.values[i]; }

  /// Conditional of variable i at the current state.
  void conditional(VarId i, std::span<double> out);

  void set(VarId i, int value);

  /// Replaces the whole state and rebuilds summaries.
  void reset(State state);

 private:
  void rebuild_summaries();

  const FactorGraph* graph_;
  State state_;
  // Offsets into summaries_ per factor; -1 for factors without summaries.
  std::vector<std::int64_t> summary_offset_;
  std::vector<std::int64_t> summaries_;
  std::vector<int> scope_scratch_;
  std::vector<double> energy_scratch_;
  std::vector<std::int64_t> summary_scratch_;
};

}  // namespace hogibbs
