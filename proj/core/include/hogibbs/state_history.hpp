#pragma once

#include <cstdint>
#include <vector>

#include "hogibbs/factor_graph.hpp"

namespace hogibbs {

/// Past values of a single-writer chain over a sliding window of
/// support_max writes. The t-th write happens at time t; read(i, d) returns
/// x_{i, t-d}, the value variable i had right after the (t-d)-th write.
///
/// Each variable keeps the previous value of its recent writes, so a read
/// costs O(1) when i was not written in the last d steps (the common case).
class StateHistory {
 public:
  StateHistory(State initial, int support_max);

  std::uint64_t t() const { return t_; }
  int support_max() const { return support_max_; }
  const State& current() const { return current_; }

  /// Requires 0 <= d <= min(t, support_max).
  int read(VarId i, int d) const;

  void write(VarId i, int value);

  void reset(State initial);

 private:
  struct Write {
    std::uint64_t time;
    int previous;
  };

  State current_;
  int support_max_;
  std::uint64_t t_ = 0;
  std::vector<std::vector<Write>> writes_;
};

}  // namespace hogibbs
