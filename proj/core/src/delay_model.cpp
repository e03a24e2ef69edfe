#include "hogibbs/delay_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hogibbs/errors.hpp"

namespace hogibbs {

std::string to_string(DelayKind kind) {
  switch (kind) {
    case DelayKind::kZero: return "zero";
    case DelayKind::kConstant: return "constant";
    case DelayKind::kIidBernoulli: return "iid-bernoulli";
    case DelayKind::kMaxEnt: return "maxent";
    case DelayKind::kTwoThreadPattern: return "two-thread-pattern";
  }
  return "unknown";
}

DelayModel DelayModel::zero(std::size_t n) {
  DelayModel m;
  m.n_ = std::max<std::size_t>(n, 1);
  return m;
}

DelayModel DelayModel::constant(int k, std::size_t n) {
  if (k < 0) throw ConfigError("constant delay must be >= 0");
  DelayModel m;
  m.kind_ = DelayKind::kConstant;
  m.n_ = std::max<std::size_t>(n, 1);
  m.pmf_.assign(static_cast<std::size_t>(k) + 1, 0.0);
  m.pmf_[k] = 1.0;
  m.params_ = {{"k", k}};
  m.finish_iid(-1.0);
  return m;
}

DelayModel DelayModel::iid_bernoulli(double rho, int k, std::size_t n) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw ConfigError("rho must lie in [0, 1]");
  if (k < 0) throw ConfigError("delay k must be >= 0");
  DelayModel m;
  m.kind_ = DelayKind::kIidBernoulli;
  m.n_ = std::max<std::size_t>(n, 1);
  m.pmf_.assign(static_cast<std::size_t>(k) + 1, 0.0);
  m.pmf_[0] += 1.0 - rho;
  m.pmf_[k] += rho;
  m.params_ = {{"rho", rho}, {"k", k}};
  m.finish_iid(-1.0);
  return m;
}

DelayModel DelayModel::from_pmf(std::vector<double> pmf, std::size_t n,
                                DelayKind kind, double reported_tau_star) {
  if (pmf.empty()) throw ConfigError("delay pmf is empty");
  double total = 0.0;
  for (double p : pmf) {
    if (!(p >= 0.0)) throw ConfigError("delay pmf has a negative entry");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("delay pmf does not sum to 1");
  DelayModel m;
  m.kind_ = kind;
  m.n_ = std::max<std::size_t>(n, 1);
  m.pmf_ = std::move(pmf);
  m.params_ = {{"support_max", static_cast<double>(m.pmf_.size() - 1)}};
  m.finish_iid(reported_tau_star);
  return m;
}

DelayModel DelayModel::two_thread_pattern(std::vector<VarId> racing, std::size_t n) {
  if (racing.size() < 2) throw ConfigError("two-thread pattern needs >= 2 racing variables");
  DelayModel m;
  m.kind_ = DelayKind::kTwoThreadPattern;
  m.n_ = std::max<std::size_t>(n, 1);
  m.racing_.assign(m.n_, false);
  for (VarId v : racing) {
    if (v >= m.n_) throw ConfigError("racing variable out of range");
    m.racing_[v] = true;
  }
  // Reads are at most one write stale.
  m.pmf_ = {0.0, 1.0};
  m.cumulative_ = {1.0};
  m.values_ = {1};
  m.tau_ = 1.0;
  const double dn = static_cast<double>(m.n_);
  m.tau_star_ = dn * std::expm1(1.0 / dn);
  m.params_ = {{"racing", static_cast<double>(racing.size())}};
  return m;
}

void DelayModel::finish_iid(double reported_tau_star) {
  cumulative_.clear();
  values_.clear();
  double acc = 0.0;
  double mean = 0.0;
  double exp_moment = 0.0;
  const double dn = static_cast<double>(n_);
  for (std::size_t k = 0; k < pmf_.size(); ++k) {
    if (pmf_[k] <= 0.0) continue;
    acc += pmf_[k];
    cumulative_.push_back(acc);
    values_.push_back(static_cast<int>(k));
    mean += pmf_[k] * static_cast<double>(k);
    exp_moment += pmf_[k] * std::expm1(static_cast<double>(k) / dn);
  }
  cumulative_.back() = 1.0;
  tau_ = mean;
  tau_star_ = reported_tau_star >= 0.0 ? reported_tau_star : dn * exp_moment;
}

int DelayModel::sample(RngStream& rng) const {
  if (cumulative_.size() == 1) return values_.front();
  const double u = rng.uniform();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto idx = static_cast<std::size_t>(
      std::min<std::ptrdiff_t>(it - cumulative_.begin(),
                               static_cast<std::ptrdiff_t>(values_.size()) - 1));
  return values_[idx];
}

}  // namespace hogibbs
