#include "hogibbs/model_zoo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "hogibbs/errors.hpp"

namespace hogibbs {

namespace {

int spin(int v) { return 2 * v - 1; }

double param(const std::map<std::string, double>& params, const std::string& key) {
  const auto it = params.find(key);
  if (it == params.end()) throw ConfigError("builtin factor missing parameter '" + key + "'");
  return it->second;
}

std::vector<VariableSpec> binary_variables(std::size_t n) {
  std::vector<VariableSpec> vars(n);
  for (std::size_t i = 0; i < n; ++i) vars[i] = {static_cast<VarId>(i), 2};
  return vars;
}

/// phi_X = -M1 |sum of spins|.
class BadMixPhiX final : public FactorFunction {
 public:
  explicit BadMixPhiX(double m1) : m1_(m1) {}

  double energy(std::span<const int> vals) const override {
    std::int64_t s = 0;
    for (int v : vals) s += spin(v);
    return -m1_ * static_cast<double>(std::llabs(s));
  }
  std::size_t summary_size() const override { return 1; }
  void add_to_summary(std::size_t, int value, std::int64_t sign,
                      std::span<std::int64_t> summary) const override {
    summary[0] += sign * spin(value);
  }
  double energy_from_summary(std::span<const std::int64_t> s) const override {
    return -m1_ * static_cast<double>(std::llabs(s[0]));
  }
  FactorDescriptor descriptor() const override {
    return {"badmix_phi_x", {{"M1", m1_}}, {}};
  }

 private:
  double m1_;
};

/// Scope is the X bank followed by the Y bank, N each.
class BadMixPhiY final : public FactorFunction {
 public:
  BadMixPhiY(int bank, double beta, double m2) : bank_(bank), beta_(beta), m2_(m2) {}

  double energy(std::span<const int> vals) const override {
    std::int64_t s[2] = {0, 0};
    for (std::size_t k = 0; k < vals.size(); ++k) {
      s[k < static_cast<std::size_t>(bank_) ? 0 : 1] += spin(vals[k]);
    }
    return energy_from_summary(s);
  }
  std::size_t summary_size() const override { return 2; }
  void add_to_summary(std::size_t pos, int value, std::int64_t sign,
                      std::span<std::int64_t> summary) const override {
    summary[pos < static_cast<std::size_t>(bank_) ? 0 : 1] += sign * spin(value);
  }
  double energy_from_summary(std::span<const std::int64_t> s) const override {
    const double y = static_cast<double>(s[1]);
    const double weight = std::llabs(s[0]) == 1 ? beta_ / bank_ : m2_;
    return weight * y * y;
  }
  FactorDescriptor descriptor() const override {
    return {"badmix_phi_y", {{"beta", beta_}, {"M2", m2_}}, {}};
  }

 private:
  int bank_;
  double beta_;
  double m2_;
};

std::shared_ptr<const FactorFunction> bias_table(double penalty) {
  return std::make_shared<TableFactor>(std::vector<int>{2, 2},
                                       std::vector<double>{-penalty, 0.0, 0.0, 0.0},
                                       "bias_example",
                                       std::map<std::string, double>{{"penalty", penalty}});
}

std::shared_ptr<const FactorFunction> ising_edge_table(double beta) {
  return std::make_shared<TableFactor>(std::vector<int>{2, 2},
                                       std::vector<double>{beta, -beta, -beta, beta},
                                       "ising_edge",
                                       std::map<std::string, double>{{"beta", beta}});
}

std::shared_ptr<const FactorFunction> ising_prior_table(double b) {
  return std::make_shared<TableFactor>(std::vector<int>{2}, std::vector<double>{-b, b},
                                       "ising_prior",
                                       std::map<std::string, double>{{"B", b}});
}

}  // namespace

FactorGraph build_bias_example(double penalty) {
  if (!std::isfinite(penalty) || penalty < 0) throw ConfigError("penalty must be finite and >= 0");
  return FactorGraph(binary_variables(2), {Factor{{0, 1}, bias_table(penalty)}});
}

FactorGraph build_badmix_model(int N, double beta, double M1, double M2) {
  if (N < 3 || N % 2 == 0) throw ConfigError("bad-mix bank size N must be odd and >= 3");
  if (M1 < 0 || M2 < 0 || !std::isfinite(M1) || !std::isfinite(M2)) {
    throw ConfigError("M1 and M2 must be finite and >= 0");
  }
  const auto bank = static_cast<std::size_t>(N);
  std::vector<VarId> x(bank), xy(2 * bank);
  std::iota(x.begin(), x.end(), VarId{0});
  std::iota(xy.begin(), xy.end(), VarId{0});
  std::vector<Factor> factors;
  factors.push_back({std::move(x), std::make_shared<BadMixPhiX>(M1)});
  factors.push_back({std::move(xy), std::make_shared<BadMixPhiY>(N, beta, M2)});
  return FactorGraph(binary_variables(2 * bank), std::move(factors));
}

FactorGraph build_ising(std::size_t n, const std::vector<std::pair<VarId, VarId>>& edges,
                        const std::vector<double>& betas,
                        const std::vector<double>& priors) {
  if (betas.size() != edges.size() && betas.size() != 1) {
    throw ConfigError("need one beta per edge or a single shared beta");
  }
  if (!priors.empty() && priors.size() != n) throw ConfigError("need one prior per variable");
  std::vector<Factor> factors;
  factors.reserve(edges.size() + priors.size());
  std::shared_ptr<const FactorFunction> shared;
  if (betas.size() == 1) shared = ising_edge_table(betas.front());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    factors.push_back({{edges[e].first, edges[e].second},
                       shared ? shared : ising_edge_table(betas[e])});
  }
  for (std::size_t i = 0; i < priors.size(); ++i) {
    if (priors[i] != 0.0) {
      factors.push_back({{static_cast<VarId>(i)}, ising_prior_table(priors[i])});
    }
  }
  return FactorGraph(binary_variables(n), std::move(factors));
}

FactorGraph build_single_edge_ising(double beta) {
  return build_ising(2, {{0, 1}}, {beta});
}

std::vector<std::pair<VarId, VarId>> random_regular_edges(std::size_t n, int degree,
                                                          RngStream& rng) {
  if (degree < 0) throw ConfigError("degree must be >= 0");
  const auto d = static_cast<std::size_t>(degree);
  if (d > 0 && d >= n) throw ConfigError("degree must be < n");
  if ((n * d) % 2 != 0) throw ConfigError("n * degree must be even");
  std::vector<std::pair<VarId, VarId>> edges;
  if (d == 0) return edges;

  std::vector<VarId> stubs(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill_n(stubs.begin() + static_cast<std::ptrdiff_t>(i * d), d, static_cast<VarId>(i));
  }
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::shuffle(stubs.begin(), stubs.end(), rng.engine());
    edges.clear();
    bool simple = true;
    for (std::size_t k = 0; k + 1 < stubs.size(); k += 2) {
      VarId a = stubs[k], b = stubs[k + 1];
      if (a == b) {
        simple = false;
        break;
      }
      edges.emplace_back(std::min(a, b), std::max(a, b));
    }
    if (!simple) continue;
    std::sort(edges.begin(), edges.end());
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) continue;
    return edges;
  }
  throw GenerationFailure("no simple " + std::to_string(degree) + "-regular graph on " +
                          std::to_string(n) + " vertices after 1000 pairings");
}

FactorGraph build_random_ising(std::size_t n, int degree, double beta,
                               const std::vector<double>& priors, RngStream& rng) {
  return build_ising(n, random_regular_edges(n, degree, rng), {beta}, priors);
}

std::shared_ptr<const FactorFunction> make_builtin_factor(
    const std::string& name, const std::vector<int>& scope_domain_sizes,
    const std::map<std::string, double>& params) {
  const auto require_binary = [&](std::size_t arity) {
    if (arity != 0 && scope_domain_sizes.size() != arity) {
      throw ConfigError("builtin '" + name + "' expects scope of size " +
                        std::to_string(arity));
    }
    for (int d : scope_domain_sizes) {
      if (d != 2) throw ConfigError("builtin '" + name + "' needs binary variables");
    }
  };
  if (name == "bias_example") {
    require_binary(2);
    return bias_table(param(params, "penalty"));
  }
  if (name == "ising_edge") {
    require_binary(2);
    return ising_edge_table(param(params, "beta"));
  }
  if (name == "ising_prior") {
    require_binary(1);
    return ising_prior_table(param(params, "B"));
  }
  if (name == "badmix_phi_x") {
    require_binary(0);
    return std::make_shared<BadMixPhiX>(param(params, "M1"));
  }
  if (name == "badmix_phi_y") {
    require_binary(0);
    if (scope_domain_sizes.size() % 2 != 0) {
      throw ConfigError("badmix_phi_y scope must hold both banks");
    }
    return std::make_shared<BadMixPhiY>(static_cast<int>(scope_domain_sizes.size() / 2),
                                        param(params, "beta"), param(params, "M2"));
  }
  throw ConfigError("unknown builtin factor '" + name + "'");
}

double MaxEntDelaySpec::constraint_residual() const {
  const double dn = static_cast<double>(n);
  double moment = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    moment += pmf[k] * std::expm1(static_cast<double>(k) / dn);
  }
  return std::abs(moment - target_tau_star / dn);
}

double MaxEntDelaySpec::entropy() const {
  double h = 0.0;
  for (double p : pmf) {
    if (p > 0) h -= p * std::log(p);
  }
  return h;
}

DelayModel MaxEntDelaySpec::delay_model() const {
  return DelayModel::from_pmf(pmf, n, DelayKind::kMaxEnt, target_tau_star);
}

double max_attainable_tau_star(int support_max, std::size_t n) {
  const double dn = static_cast<double>(n);
  return dn * std::expm1(static_cast<double>(support_max) / dn);
}

MaxEntDelaySpec build_maxent_delay(int support_max, double target_tau_star,
                                   std::size_t n) {
  if (support_max < 0) throw ConfigError("support_max must be >= 0");
  if (n < 1) throw ConfigError("n must be >= 1");
  const double top = max_attainable_tau_star(support_max, n);
  if (!(target_tau_star >= 0.0) || target_tau_star > top * (1.0 + 1e-12)) {
    throw UnattainableTauStar("tau* = " + std::to_string(target_tau_star) +
                              " outside [0, " + std::to_string(top) + "]");
  }
  MaxEntDelaySpec spec;
  spec.support_max = support_max;
  spec.target_tau_star = target_tau_star;
  spec.n = n;
  const auto size = static_cast<std::size_t>(support_max) + 1;
  spec.pmf.assign(size, 0.0);

  if (target_tau_star == 0.0 || support_max == 0) {
    spec.lambda = -std::numeric_limits<double>::infinity();
    spec.pmf[0] = 1.0;
    return spec;
  }
  if (target_tau_star >= top) {
    spec.lambda = std::numeric_limits<double>::infinity();
    spec.pmf.back() = 1.0;
    spec.reported_tau = support_max;
    return spec;
  }

  // Work in v_k = n (exp(k/n) - 1), so the constraint reads E[v] = tau* and the
  // tilt exp(lambda exp(k/n)) equals exp(theta v_k) up to normalization with
  // theta = lambda / n.
  const double dn = static_cast<double>(n);
  std::vector<double> v(size);
  for (std::size_t k = 0; k < size; ++k) v[k] = dn * std::expm1(static_cast<double>(k) / dn);
  const double vmax = v.back();

  auto tilted = [&](double theta, std::vector<double>& out) {
    // Shift by the largest exponent for stability.
    const double shift = theta >= 0 ? theta * vmax : 0.0;
    double z = 0.0;
    for (std::size_t k = 0; k < size; ++k) {
      out[k] = std::exp(theta * v[k] - shift);
      z += out[k];
    }
    double mean = 0.0;
    for (std::size_t k = 0; k < size; ++k) {
      out[k] /= z;
      mean += out[k] * v[k];
    }
    return mean;
  };

  std::vector<double> work(size);
  double lo = -1.0, hi = 1.0;
  while (tilted(lo, work) > target_tau_star) lo *= 2.0;
  while (tilted(hi, work) < target_tau_star) hi *= 2.0;
  double theta = 0.5 * (lo + hi);
  for (int iter = 0; iter < 400; ++iter) {
    theta = 0.5 * (lo + hi);
    const double mean = tilted(theta, work);
    if (std::abs(mean - target_tau_star) < 1e-12 * dn) break;
    if (mean < target_tau_star) {
      lo = theta;
    } else {
      hi = theta;
    }
    if (hi - lo <= 1e-15 * std::max(1.0, std::abs(theta))) break;
  }
  tilted(theta, work);
  spec.pmf = work;
  spec.lambda = theta * dn;
  for (std::size_t k = 0; k < size; ++k) {
    spec.reported_tau += spec.pmf[k] * static_cast<double>(k);
  }
  return spec;
}

}  // namespace hogibbs
