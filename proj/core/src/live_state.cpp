#include "hogibbs/live_state.hpp"

#include <algorithm>

namespace hogibbs {

LiveState::LiveState(const FactorGraph& graph, State initial)
    : graph_(&graph), state_(std::move(initial)) {
  graph.validate_state(state_.values);
  summary_offset_.assign(graph.num_factors(), -1);
  std::size_t total = 0;
  std::size_t widest = 0;
  for (std::size_t f = 0; f < graph.num_factors(); ++f) {
    const std::size_t m = graph.factors()[f].function->summary_size();
    if (m > 0) {
      summary_offset_[f] = static_cast<std::int64_t>(total);
      total += m;
      widest = std::max(widest, m);
    }
  }
  summaries_.assign(total, 0);
  summary_scratch_.assign(widest, 0);
  scope_scratch_.assign(graph.max_scope(), 0);
  energy_scratch_.assign(static_cast<std::size_t>(graph.max_domain_size()), 0.0);
  rebuild_summaries();
}

void LiveState::rebuild_summaries() {
  std::fill(summaries_.begin(), summaries_.end(), 0);
  for (std::size_t f = 0; f < graph_->num_factors(); ++f) {
    if (summary_offset_[f] < 0) continue;
    const Factor& factor = graph_->factors()[f];
    const std::size_t m = factor.function->summary_size();
    std::span<std::int64_t> s(summaries_.data() + summary_offset_[f], m);
    for (std::size_t k = 0; k < factor.scope.size(); ++k) {
      factor.function->add_to_summary(k, state_.values[factor.scope[k]], 1, s);
    }
  }
}

void LiveState::reset(State state) {
  graph_->validate_state(state.values);
  state_ = std::move(state);
  rebuild_summaries();
}

void LiveState::conditional(VarId i, std::span<double> out) {
  const std::size_t d = out.size();
  std::fill(out.begin(), out.end(), 0.0);
  std::span<double> local(energy_scratch_.data(), d);
  const int current = state_.values[i];
  for (const Incidence& inc : graph_->incidences(i)) {
    const Factor& f = graph_->factors()[inc.factor];
    const FactorFunction& fn = *f.function;
    if (summary_offset_[inc.factor] >= 0) {
      const std::size_t m = fn.summary_size();
      std::span<std::int64_t> s(summary_scratch_.data(), m);
      std::copy_n(summaries_.begin() + summary_offset_[inc.factor], m, s.begin());
      fn.add_to_summary(inc.position, current, -1, s);
      for (std::size_t z = 0; z < d; ++z) {
        fn.add_to_summary(inc.position, static_cast<int>(z), 1, s);
        out[z] += fn.energy_from_summary(s);
        fn.add_to_summary(inc.position, static_cast<int>(z), -1, s);
      }
    } else {
      std::span<int> scope_values(scope_scratch_.data(), f.scope.size());
      for (std::size_t k = 0; k < f.scope.size(); ++k) {
        scope_values[k] = state_.values[f.scope[k]];
      }
      fn.local_energies(scope_values, inc.position, local);
      for (std::size_t z = 0; z < d; ++z) out[z] += local[z];
    }
  }
  softmax_in_place(out);
}

void LiveState::set(VarId i, int value) {
  const int old = state_.values[i];
  if (old == value) return;
  state_.values[i] = value;
  for (const Incidence& inc : graph_->incidences(i)) {
    const std::int64_t off = summary_offset_[inc.factor];
    if (off < 0) continue;
    const FactorFunction& fn = *graph_->factors()[inc.factor].function;
    std::span<std::int64_t> s(summaries_.data() + off, fn.summary_size());
    fn.add_to_summary(inc.position, old, -1, s);
    fn.add_to_summary(inc.position, value, 1, s);
  }
}

}  // namespace hogibbs
