#include "hogibbs/markov_oracle.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>

#include "hogibbs/errors.hpp"

namespace hogibbs {

namespace {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const Matrix> as_matrix(const FiniteChain& chain) {
  const auto s = static_cast<Eigen::Index>(chain.states);
  return {chain.transition.data(), s, s};
}

std::uint64_t checked_power(std::uint64_t base, int exponent, std::uint64_t cap) {
  std::uint64_t out = 1;
  for (int e = 0; e < exponent; ++e) {
    if (out > cap / base) {
      throw StateSpaceTooLarge("extended chain exceeds " + std::to_string(cap) + " states");
    }
    out *= base;
  }
  return out;
}

}  // namespace

FiniteChain gibbs_transition_matrix(const FactorGraph& graph, std::uint64_t cap) {
  const std::uint64_t joint = graph.joint_state_count();
  if (joint > cap) {
    throw StateSpaceTooLarge(std::to_string(joint) + " joint states exceed cap " +
                             std::to_string(cap));
  }
  const JointIndexer indexer(graph.domain_sizes());
  const std::size_t n = graph.num_variables();
  FiniteChain chain;
  chain.states = joint;
  chain.cells = joint;
  chain.transition.assign(joint * joint, 0.0);
  chain.cell.resize(joint);
  std::vector<int> x(n);
  for (std::uint64_t s = 0; s < joint; ++s) {
    chain.cell[s] = s;
    indexer.decode(s, x);
    for (std::size_t i = 0; i < n; ++i) {
      const auto p = conditional_distribution(graph, x, static_cast<VarId>(i));
      const int keep = x[i];
      for (std::size_t z = 0; z < p.size(); ++z) {
        x[i] = static_cast<int>(z);
        chain.transition[s * joint + indexer.index(x)] += p[z] / static_cast<double>(n);
      }
      x[i] = keep;
    }
  }
  return chain;
}

FiniteChain hogwild_extended_chain(const FactorGraph& graph, const DelayModel& delay_model,
                                   std::uint64_t cap) {
  if (!delay_model.is_iid()) {
    throw ConfigError("extended chain needs an i.i.d. delay model");
  }
  const int window = delay_model.support_max();
  const std::uint64_t joint = graph.joint_state_count();
  if (joint > cap) throw StateSpaceTooLarge("joint space exceeds cap");
  const std::uint64_t states = checked_power(joint, window + 1, cap);
  const JointIndexer indexer(graph.domain_sizes());
  const std::size_t n = graph.num_variables();
  const auto& pmf = delay_model.pmf();
  std::vector<int> support;
  for (int d = 0; d <= window; ++d) {
    if (pmf[static_cast<std::size_t>(d)] > 0.0) support.push_back(d);
  }

  FiniteChain chain;
  chain.states = states;
  chain.cells = joint;
  chain.transition.assign(states * states, 0.0);
  chain.cell.resize(states);

  // Window index: x_t is the most significant digit (base = joint).
  const std::uint64_t top = states / joint;
  std::vector<std::vector<int>> past(static_cast<std::size_t>(window) + 1,
                                     std::vector<int>(n));
  std::vector<int> view(n), next(n), digits(graph.max_blanket_size());

  for (std::uint64_t s = 0; s < states; ++s) {
    std::uint64_t rest = s;
    for (int k = window; k >= 0; --k) {
      indexer.decode(rest % joint, past[static_cast<std::size_t>(k)]);
      rest /= joint;
    }
    const std::uint64_t current = s / top;
    chain.cell[s] = current;
    // Shifting drops x_{t-K}; the new x_{t+1} becomes the top digit.
    const std::uint64_t shifted = s / joint;

    for (std::size_t i = 0; i < n; ++i) {
      const auto blanket = graph.markov_blanket(static_cast<VarId>(i));
      const std::size_t b = blanket.size();
      std::fill(digits.begin(), digits.begin() + static_cast<std::ptrdiff_t>(b), 0);
      for (;;) {
        double weight = 1.0 / static_cast<double>(n);
        view = past[0];
        for (std::size_t k = 0; k < b; ++k) {
          const int d = support[static_cast<std::size_t>(digits[k])];
          weight *= pmf[static_cast<std::size_t>(d)];
          view[blanket[k]] = past[static_cast<std::size_t>(d)][blanket[k]];
        }
        const auto p = conditional_distribution(graph, view, static_cast<VarId>(i));
        next = past[0];
        for (std::size_t z = 0; z < p.size(); ++z) {
          next[i] = static_cast<int>(z);
          const std::uint64_t target = indexer.index(next) * top + shifted;
          chain.transition[s * states + target] += weight * p[z];
        }
        std::size_t k = 0;
        while (k < b && ++digits[k] == static_cast<int>(support.size())) digits[k++] = 0;
        if (k == b) break;
      }
    }
  }
  return chain;
}

std::vector<double> stationary_distribution(const FiniteChain& chain) {
  const auto s = static_cast<Eigen::Index>(chain.states);
  Matrix a = as_matrix(chain).transpose() - Matrix::Identity(s, s);
  a.row(s - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(s);
  rhs(s - 1) = 1.0;
  Eigen::VectorXd pi = a.fullPivLu().solve(rhs);
  std::vector<double> out(chain.states);
  for (Eigen::Index k = 0; k < s; ++k) out[static_cast<std::size_t>(k)] = std::max(0.0, pi(k));
  return out;
}

double CellStatistics::sigma(std::size_t c, std::uint64_t samples) const {
  const std::size_t m = probabilities.size();
  return std::sqrt(std::max(0.0, covariance[c * m + c]) / static_cast<double>(samples));
}

CellStatistics cell_statistics(const FiniteChain& chain) {
  const auto s = static_cast<Eigen::Index>(chain.states);
  const auto m = static_cast<Eigen::Index>(chain.cells);
  const std::vector<double> pi_vec = stationary_distribution(chain);
  const Eigen::Map<const Eigen::VectorXd> pi(pi_vec.data(), s);

  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(s, m);
  for (Eigen::Index k = 0; k < s; ++k) f(k, static_cast<Eigen::Index>(chain.cell[k])) = 1.0;
  const Eigen::RowVectorXd mean = pi.transpose() * f;
  f.rowwise() -= mean;

  // Poisson equation g = fbar + P g, made unique by the rank-one correction.
  const Matrix fundamental = Matrix::Identity(s, s) - as_matrix(chain) +
                             Eigen::VectorXd::Ones(s) * pi.transpose();
  const Eigen::MatrixXd g = fundamental.fullPivLu().solve(f);

  const Eigen::MatrixXd weighted = pi.asDiagonal() * f;
  const Eigen::MatrixXd cross = weighted.transpose() * g;
  const Eigen::MatrixXd sigma =
      cross + cross.transpose() - weighted.transpose() * f;

  CellStatistics out;
  out.probabilities.resize(chain.cells);
  out.covariance.resize(chain.cells * chain.cells);
  for (Eigen::Index a = 0; a < m; ++a) {
    out.probabilities[static_cast<std::size_t>(a)] = mean(a);
    for (Eigen::Index b = 0; b < m; ++b) {
      out.covariance[static_cast<std::size_t>(a * m + b)] = sigma(a, b);
    }
  }
  return out;
}

ChiSquareResult markov_chi_square(std::span<const std::uint64_t> counts,
                                  const CellStatistics& stats) {
  const std::size_t m = stats.probabilities.size();
  if (counts.size() != m) throw DimensionMismatch("counts do not match cell count");
  double total = 0.0;
  for (std::uint64_t c : counts) total += static_cast<double>(c);
  if (total <= 0.0) throw ConfigError("no samples");

  const auto mm = static_cast<Eigen::Index>(m);
  Eigen::VectorXd d(mm);
  for (Eigen::Index a = 0; a < mm; ++a) {
    d(a) = static_cast<double>(counts[static_cast<std::size_t>(a)]) / total -
           stats.probabilities[static_cast<std::size_t>(a)];
  }
  const Eigen::Map<const Matrix> sigma(stats.covariance.data(), mm, mm);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig{Eigen::MatrixXd(sigma)};
  const double largest = eig.eigenvalues().cwiseAbs().maxCoeff();
  const double floor = largest * 1e-9;

  ChiSquareResult out;
  for (Eigen::Index k = 0; k < mm; ++k) {
    const double lambda = eig.eigenvalues()(k);
    if (lambda <= floor) continue;
    const double proj = eig.eigenvectors().col(k).dot(d);
    out.statistic += total * proj * proj / lambda;
    ++out.dof;
  }
  if (out.dof > 0) {
    const boost::math::chi_squared dist(out.dof);
    out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
  }
  return out;
}

}  // namespace hogibbs
