#include "hogibbs/state_history.hpp"

#include <algorithm>

#include "hogibbs/errors.hpp"

namespace hogibbs {

StateHistory::StateHistory(State initial, int support_max)
    : current_(std::move(initial)), support_max_(support_max) {
  if (support_max < 0) throw ConfigError("support_max must be >= 0");
  writes_.resize(support_max_ > 0 ? current_.size() : 0);
}

void StateHistory::reset(State initial) {
  current_ = std::move(initial);
  t_ = 0;
  writes_.resize(support_max_ > 0 ? current_.size() : 0);
  for (auto& w : writes_) w.clear();
}

int StateHistory::read(VarId i, int d) const {
  if (d == 0 || support_max_ == 0) return current_[i];
  const std::uint64_t s = t_ - static_cast<std::uint64_t>(d);
  const auto& log = writes_[i];
  if (log.empty() || log.back().time <= s) return current_[i];
  // Earliest write after time s holds the value at time s.
  const auto it = std::upper_bound(
      log.begin(), log.end(), s,
      [](std::uint64_t time, const Write& w) { return time < w.time; });
  return it->previous;
}

void StateHistory::write(VarId i, int value) {
  ++t_;
  if (support_max_ > 0) {
    auto& log = writes_[i];
    const std::uint64_t horizon =
        t_ > static_cast<std::uint64_t>(support_max_) ? t_ - support_max_ : 0;
    if (log.size() >= 8 && log.front().time <= horizon) {
      const auto keep = std::find_if(log.begin(), log.end(),
                                     [&](const Write& w) { return w.time > horizon; });
      log.erase(log.begin(), keep);
    }
    log.push_back({t_, current_[i]});
  }
  current_[i] = value;
}

}  // namespace hogibbs
