#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "hogibbs/delay_model.hpp"
#include "hogibbs/factor_graph.hpp"
#include "hogibbs/rng.hpp"

namespace hogibbs {

/// Energy given to the forbidden (0,0) state of the bias example.
inline constexpr double kBiasExamplePenalty = 40.0;

/// Two binary variables; (0,0) is penalized, the other three states are
/// equally likely.
FactorGraph build_bias_example(double penalty = kBiasExamplePenalty);

/// Slow-mixing model: N spins X and N spins Y (variables 0..N-1 and N..2N-1),
/// with phi_X = -M1 |1'X| and phi_Y = (beta/N)(1'Y)^2 when |1'X| = 1, else
/// M2 (1'Y)^2. Spins are stored as {0,1} with sigma = 2v - 1.
FactorGraph build_badmix_model(int N, double beta, double M1, double M2);

/// Ising model on an explicit edge list: energy beta_e * s(x) s(y) per edge
/// plus optional priors B_x * s(x).
FactorGraph build_ising(std::size_t n, const std::vector<std::pair<VarId, VarId>>& edges,
                        const std::vector<double>& betas,
                        const std::vector<double>& priors = {});

FactorGraph build_single_edge_ising(double beta);

/// Uniform-ish random degree-regular graph from the pairing model with
/// rejection of self-loops and multi-edges (at most 1000 attempts).
std::vector<std::pair<VarId, VarId>> random_regular_edges(std::size_t n, int degree,
                                                          RngStream& rng);

FactorGraph build_random_ising(std::size_t n, int degree, double beta,
                               const std::vector<double>& priors, RngStream& rng);

/// Factor named by a builtin tag, as used in the model JSON format.
std::shared_ptr<const FactorFunction> make_builtin_factor(
    const std::string& name, const std::vector<int>& scope_domain_sizes,
    const std::map<std::string, double>& params);

/// Maximum-entropy law on {0..support_max} subject to
/// E[exp(delay / n)] = 1 + target_tau_star / n. The solution has the tilted
/// form pmf(k) proportional to exp(lambda * exp(k / n)).
struct MaxEntDelaySpec {
  int support_max = 0;
  double target_tau_star = 0.0;
  std::size_t n = 1;
  /// +-infinity for the degenerate endpoint laws.
  double lambda = 0.0;
  std::vector<double> pmf;
  /// Mean delay under pmf.
  double reported_tau = 0.0;

  /// |E[exp(delay / n)] - (1 + target_tau_star / n)|.
  double constraint_residual() const;
  double entropy() const;
  DelayModel delay_model() const;
};

/// Largest tau* the support can realize: n (exp(support_max / n) - 1).
double max_attainable_tau_star(int support_max, std::size_t n);

MaxEntDelaySpec build_maxent_delay(int support_max, double target_tau_star,
                                   std::size_t n);

}  // namespace hogibbs
