#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "hogibbs/factor_graph.hpp"
#include "hogibbs/rng.hpp"

namespace hogibbs {

enum class DelayKind { kZero, kConstant, kIidBernoulli, kMaxEnt, kTwoThreadPattern };

std::string to_string(DelayKind kind);

/// Staleness law for simulated asynchronous execution. The i.i.d. kinds carry
/// a pmf over {0, ..., support_max}; reported_tau bounds the mean delay and
/// reported_tau_star bounds n * (E[exp(delay / n)] - 1) for the configured n.
class DelayModel {
 public:
  static DelayModel zero(std::size_t n = 1);
  static DelayModel constant(int k, std::size_t n);
  /// Delay k with probability rho, else 0.
  static DelayModel iid_bernoulli(double rho, int k, std::size_t n);
  /// Arbitrary i.i.d. law; used for the max-entropy family.
  static DelayModel from_pmf(std::vector<double> pmf, std::size_t n,
                             DelayKind kind = DelayKind::kMaxEnt,
                             double reported_tau_star = -1.0);
  /// Two workers that either update two distinct racing variables from one
  /// snapshot or update one other variable synchronously.
  static DelayModel two_thread_pattern(std::vector<VarId> racing, std::size_t n);

  DelayKind kind() const { return kind_; }
  bool is_iid() const { return kind_ != DelayKind::kTwoThreadPattern; }
  /// False when every draw is a fixed value and no randomness is consumed.
  bool is_random() const { return cumulative_.size() > 1; }
  int support_max() const { return static_cast<int>(pmf_.size()) - 1; }
  std::size_t n() const { return n_; }
  double reported_tau() const { return tau_; }
  double reported_tau_star() const { return tau_star_; }
  const std::vector<double>& pmf() const { return pmf_; }
  const std::vector<bool>& racing() const { return racing_; }

  int sample(RngStream& rng) const;

  std::map<std::string, double> params() const { return params_; }

 private:
  DelayModel() = default;
  void finish_iid(double reported_tau_star);

  DelayKind kind_ = DelayKind::kZero;
  std::size_t n_ = 1;
  std::vector<double> pmf_{1.0};
  // Cumulative mass of the values with nonzero probability, and those values.
  std::vector<double> cumulative_{1.0};
  std::vector<int> values_{0};
  std::vector<bool> racing_;
  double tau_ = 0.0;
  double tau_star_ = 0.0;
  std::map<std::string, double> params_;
};

}  // namespace hogibbs
