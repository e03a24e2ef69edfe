#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hogibbs/delay_model.hpp"
#include "hogibbs/factor_graph.hpp"
#include "hogibbs/rng.hpp"

namespace hogibbs {

/// Draws (a, b) with a ~ p, b ~ q and P(a != b) = TV(p, q): with probability
/// 1 - TV both come from the normalized overlap min(p, q), otherwise each comes
/// from its own normalized residual.
std::pair<int, int> maximal_coupling_sample(std::span<const double> p,
                                            std::span<const double> q, RngStream& rng);

struct CouplingOptions {
  std::uint64_t step_cap = 100'000'000;
  /// Check Y <= X coordinatewise after every write.
  bool verify_order = true;
  /// Extra steps to run after coupling; stayed_coupled reports whether the
  /// chains still agree at every one of them.
  std::uint64_t continue_steps = 0;
};

struct CouplingRun {
  /// First t from which X_s = Y_s for every s >= t (the chains meet and no
  /// stale read can separate them again).
  std::uint64_t coupling_time = 0;
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  std::string delay_model;
  bool censored = false;
  std::uint64_t order_checks = 0;
  bool stayed_coupled = true;
};

/// Throws NonFerromagnetic unless every variable is binary, every factor has
/// scope <= 2 and every pairwise table is supermodular (the monotone coupling
/// needs the conditional of 1 to be nondecreasing in every neighbour).
void require_monotone_model(const FactorGraph& graph);

/// Coupling to the future: X starts all-1, Y all-0 (spins +1 / -1). Each step
/// both chains update the same variable with the same uniform R (new value 1
/// iff R < P(1 | stale view)) and read through the same delays.
CouplingRun run_monotone_coupling_ising(const FactorGraph& graph,
                                        const DelayModel& delay_model, RngStream rng,
                                        const CouplingOptions& options = {});

struct MixingEstimate {
  double epsilon = 0.25;
  /// Smallest t with (#runs with T_c > t) / trials <= epsilon.
  std::uint64_t t_hat = 0;
  std::uint64_t trials = 0;
  /// 95% band from binomial order statistics.
  std::uint64_t band_lo = 0;
  std::uint64_t band_hi = 0;
  std::uint64_t censored = 0;
};

MixingEstimate estimate_mixing_time(std::span<const CouplingRun> runs, double epsilon);

/// Order-statistic estimate from raw coupling times (the same rule as above).
MixingEstimate estimate_mixing_time(std::vector<std::uint64_t> times, double epsilon);

/// Runs `trials` couplings in parallel across `threads` workers. Trial k uses
/// seed derive_seed(master_seed, k), so different delay models see common
/// random numbers.
std::vector<CouplingRun> run_coupling_trials(const FactorGraph& graph,
                                             const DelayModel& delay_model,
                                             std::uint64_t trials,
                                             std::uint64_t master_seed, int threads = 1,
                                             const CouplingOptions& options = {});

struct TauSweepConfig {
  std::vector<double> tau_star_grid{0.0};
  int support_max = 200;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 1;
  double epsilon = 0.25;
  /// Total influence used by the theory column, usually Delta tanh(beta).
  double alpha = 0.0;
  int threads = 1;
  std::uint64_t step_cap = 100'000'000;
};

struct TauSweepRow {
  double tau_star = 0.0;
  double tau = 0.0;  // mean delay of the max-entropy law
  MixingEstimate estimate;
  /// t_hat(tau* = 0) * (1 + alpha tau* / n).
  double theory_prediction = 0.0;
};

std::vector<TauSweepRow> tau_sweep(const FactorGraph& graph, const TauSweepConfig& config);

}  // namespace hogibbs
