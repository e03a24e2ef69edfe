#include "hogibbs/sample_sink.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <sstream>

#include "hogibbs/errors.hpp"

namespace hogibbs {

std::string to_string(SinkMode mode) {
  switch (mode) {
    case SinkMode::kJointHistogram: return "joint-histogram";
    case SinkMode::kMarginalAccumulator: return "marginal-accumulator";
    case SinkMode::kEventCounter: return "event-counter";
    case SinkMode::kThinnedTrace: return "thinned-trace";
  }
  return "unknown";
}

std::uint64_t default_burn_in(std::uint64_t steps) {
  return std::max<std::uint64_t>(1000, steps / 100);
}

std::string state_label(std::span<const int> values) {
  std::string s;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) s += ':';
    s += std::to_string(values[k]);
  }
  return s;
}

namespace {

std::vector<VarId> all_variables(std::size_t n) {
  std::vector<VarId> v(n);
  std::iota(v.begin(), v.end(), VarId{0});
  return v;
}

}  // namespace

SampleSink SampleSink::joint_histogram(std::vector<int> domain_sizes,
                                       std::uint64_t burn_in) {
  SampleSink s;
  s.mode_ = SinkMode::kJointHistogram;
  s.burn_in_ = burn_in;
  s.indexer_ = JointIndexer(domain_sizes);
  if (s.indexer_.size() > kDefaultEnumerationCap) {
    throw StateSpaceTooLarge("joint histogram needs " +
                             std::to_string(s.indexer_.size()) + " cells");
  }
  s.support_ = all_variables(domain_sizes.size());
  s.joint_.counts.assign(s.indexer_.size(), 0);
  s.joint_.domain_sizes = std::move(domain_sizes);
  return s;
}

SampleSink SampleSink::marginals(std::vector<int> domain_sizes,
                                 std::vector<std::vector<VarId>> subsets,
                                 std::uint64_t burn_in) {
  SampleSink s;
  s.mode_ = SinkMode::kMarginalAccumulator;
  s.burn_in_ = burn_in;
  std::size_t widest = 0;
  for (const auto& subset : subsets) {
    if (subset.size() > 16) throw ConfigError("marginal subsets are limited to 16 variables");
    std::vector<int> ds;
    for (VarId v : subset) {
      if (v >= domain_sizes.size()) throw ConfigError("subset variable out of range");
      ds.push_back(domain_sizes[v]);
      s.support_.push_back(v);
    }
    s.subset_indexers_.emplace_back(ds);
    EmpiricalDistribution e;
    e.counts.assign(s.subset_indexers_.back().size(), 0);
    e.domain_sizes = std::move(ds);
    s.marginals_.push_back(std::move(e));
    widest = std::max(widest, subset.size());
  }
  std::sort(s.support_.begin(), s.support_.end());
  s.support_.erase(std::unique(s.support_.begin(), s.support_.end()), s.support_.end());
  s.subsets_ = std::move(subsets);
  s.scratch_.assign(widest, 0);
  return s;
}

SampleSink SampleSink::events(std::size_t num_variables, std::vector<Event> events,
                              std::uint64_t burn_in) {
  SampleSink s;
  s.mode_ = SinkMode::kEventCounter;
  s.burn_in_ = burn_in;
  for (const Event& e : events) {
    if (!e.predicate) throw ConfigError("event '" + e.name + "' has no predicate");
    if (e.reads.empty()) {
      s.support_ = all_variables(num_variables);
      break;
    }
    s.support_.insert(s.support_.end(), e.reads.begin(), e.reads.end());
  }
  std::sort(s.support_.begin(), s.support_.end());
  s.support_.erase(std::unique(s.support_.begin(), s.support_.end()), s.support_.end());
  s.event_counts_.assign(events.size(), 0);
  s.events_ = std::move(events);
  return s;
}

SampleSink SampleSink::thinned_trace(std::size_t num_variables, std::uint64_t stride,
                                     std::uint64_t burn_in) {
  if (stride == 0) throw ConfigError("trace stride must be >= 1");
  SampleSink s;
  s.mode_ = SinkMode::kThinnedTrace;
  s.burn_in_ = burn_in;
  s.stride_ = stride;
  s.support_ = all_variables(num_variables);
  return s;
}

void SampleSink::accept(std::span<const int> state) {
  ++recorded_;
  switch (mode_) {
    case SinkMode::kJointHistogram:
      ++joint_.counts[indexer_.index(state)];
      break;
    case SinkMode::kMarginalAccumulator:
      for (std::size_t k = 0; k < subsets_.size(); ++k) {
        const auto& subset = subsets_[k];
        for (std::size_t s = 0; s < subset.size(); ++s) scratch_[s] = state[subset[s]];
        ++marginals_[k].counts[subset_indexers_[k].index(
            std::span<const int>(scratch_.data(), subset.size()))];
      }
      break;
    case SinkMode::kEventCounter:
      for (std::size_t k = 0; k < events_.size(); ++k) {
        if (events_[k].predicate(state)) ++event_counts_[k];
      }
      break;
    case SinkMode::kThinnedTrace:
      trace_.emplace_back(std::vector<int>(state.begin(), state.end()));
      break;
  }
}

SampleSink SampleSink::empty_copy() const {
  SampleSink s = *this;
  s.recorded_ = 0;
  std::fill(s.joint_.counts.begin(), s.joint_.counts.end(), 0);
  for (auto& m : s.marginals_) std::fill(m.counts.begin(), m.counts.end(), 0);
  std::fill(s.event_counts_.begin(), s.event_counts_.end(), 0);
  s.trace_.clear();
  return s;
}

void SampleSink::merge(const SampleSink& other) {
  if (other.mode_ != mode_) throw ConfigError("cannot merge sinks of different modes");
  recorded_ += other.recorded_;
  switch (mode_) {
    case SinkMode::kJointHistogram:
      joint_.merge(other.joint_);
      break;
    case SinkMode::kMarginalAccumulator:
      if (other.marginals_.size() != marginals_.size()) {
        throw ConfigError("cannot merge marginal sinks over different subsets");
      }
      for (std::size_t k = 0; k < marginals_.size(); ++k) marginals_[k].merge(other.marginals_[k]);
      break;
    case SinkMode::kEventCounter:
      if (other.event_counts_.size() != event_counts_.size()) {
        throw ConfigError("cannot merge event sinks with different events");
      }
      for (std::size_t k = 0; k < event_counts_.size(); ++k) {
        event_counts_[k] += other.event_counts_[k];
      }
      break;
    case SinkMode::kThinnedTrace:
      trace_.insert(trace_.end(), other.trace_.begin(), other.trace_.end());
      break;
  }
}

const EmpiricalDistribution& SampleSink::joint() const {
  if (mode_ != SinkMode::kJointHistogram) throw ConfigError("sink is not a joint histogram");
  return joint_;
}

const EmpiricalDistribution& SampleSink::marginal(std::size_t k) const {
  if (mode_ != SinkMode::kMarginalAccumulator) {
    throw ConfigError("sink is not a marginal accumulator");
  }
  return marginals_.at(k);
}

namespace {

std::string subset_label(const std::vector<VarId>& subset) {
  std::string s = "marginal[";
  for (std::size_t k = 0; k < subset.size(); ++k) {
    if (k) s += ';';
    s += std::to_string(subset[k]);
  }
  return s + "]";
}

}  // namespace

void SampleSink::write_csv(std::ostream& out) const {
  out << "state_or_event,count,probability\n";
  auto row = [&](const std::string& label, std::uint64_t count, std::uint64_t total) {
    const double p = total ? static_cast<double>(count) / static_cast<double>(total) : 0.0;
    std::ostringstream line;
    line.precision(17);
    line << label << ',' << count << ',' << p << '\n';
    out << line.str();
  };
  switch (mode_) {
    case SinkMode::kJointHistogram:
      for (std::uint64_t k = 0; k < joint_.counts.size(); ++k) {
        row(state_label(indexer_.decode(k)), joint_.counts[k], recorded_);
      }
      break;
    case SinkMode::kMarginalAccumulator:
      for (std::size_t m = 0; m < marginals_.size(); ++m) {
        const std::string prefix = subset_label(subsets_[m]) + "=";
        for (std::uint64_t k = 0; k < marginals_[m].counts.size(); ++k) {
          row(prefix + state_label(subset_indexers_[m].decode(k)),
              marginals_[m].counts[k], recorded_);
        }
      }
      break;
    case SinkMode::kEventCounter:
      for (std::size_t k = 0; k < events_.size(); ++k) {
        row(events_[k].name, event_counts_[k], recorded_);
      }
      break;
    case SinkMode::kThinnedTrace:
      for (const State& s : trace_) row(state_label(s.values), 1, trace_.size());
      break;
  }
}

nlohmann::json SampleSink::to_json() const {
  nlohmann::json j;
  j["mode"] = to_string(mode_);
  j["burn_in"] = burn_in_;
  j["recorded"] = recorded_;
  switch (mode_) {
    case SinkMode::kJointHistogram: {
      auto& rows = j["states"] = nlohmann::json::array();
      for (std::uint64_t k = 0; k < joint_.counts.size(); ++k) {
        rows.push_back({{"state", indexer_.decode(k)}, {"count", joint_.counts[k]}});
      }
      break;
    }
    case SinkMode::kMarginalAccumulator: {
      auto& rows = j["marginals"] = nlohmann::json::array();
      for (std::size_t m = 0; m < marginals_.size(); ++m) {
        rows.push_back({{"subset", subsets_[m]}, {"counts", marginals_[m].counts}});
      }
      break;
    }
    case SinkMode::kEventCounter: {
      auto& rows = j["events"] = nlohmann::json::array();
      for (std::size_t k = 0; k < events_.size(); ++k) {
        rows.push_back({{"name", events_[k].name}, {"count", event_counts_[k]}});
      }
      break;
    }
    case SinkMode::kThinnedTrace: {
      j["stride"] = stride_;
      auto& rows = j["trace"] = nlohmann::json::array();
      for (const State& s : trace_) rows.push_back(s.values);
      break;
    }
  }
  return j;
}

}  // namespace hogibbs
