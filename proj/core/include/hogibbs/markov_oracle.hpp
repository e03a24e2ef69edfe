#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hogibbs/delay_model.hpp"
#include "hogibbs/factor_graph.hpp"

namespace hogibbs {

/// Dense row-stochastic matrix over a finite state space. Each state also
/// maps to a cell of the joint space of the model (its observable value).
struct FiniteChain {
  std::size_t states = 0;
  std::vector<double> transition;  // row-major, states x states
  std::vector<std::uint64_t> cell;  // state -> joint index
  std::size_t cells = 0;

  double at(std::size_t from, std::size_t to) const {
    return transition[from * states + to];
  }
};

/// Random-scan Gibbs kernel on the joint space (cell = state).
FiniteChain gibbs_transition_matrix(const FactorGraph& graph, std::uint64_t cap = 4096);

/// Simulated asynchronous Gibbs with an i.i.d. delay law on {0..K}, written as
/// an exact chain on the window (x_t, x_{t-1}, ..., x_{t-K}). The observable
/// is x_t. Delay clamping at the first K steps is a transient and is ignored.
FiniteChain hogwild_extended_chain(const FactorGraph& graph, const DelayModel& delay_model,
                                   std::uint64_t cap = 4096);

/// Stationary law of an irreducible chain (linear solve of pi P = pi, sum 1).
std::vector<double> stationary_distribution(const FiniteChain& chain);

/// Stationary law of the observable cells and the asymptotic covariance of
/// the cell-frequency vector: sqrt(N)(hat p - p) -> Normal(0, covariance)
/// for N consecutive steps of the chain.
struct CellStatistics {
  std::vector<double> probabilities;
  std::vector<double> covariance;  // cells x cells, row-major

  double sigma(std::size_t cell, std::uint64_t samples) const;
};

CellStatistics cell_statistics(const FiniteChain& chain);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

/// N d' Sigma^+ d with d = counts / N - p, referred to chi-square with rank(Sigma)
/// degrees of freedom. Reduces to Pearson's test for independent draws.
ChiSquareResult markov_chi_square(std::span<const std::uint64_t> counts,
                                  const CellStatistics& stats);

}  // namespace hogibbs
