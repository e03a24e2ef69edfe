#include "hogibbs/distances.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hogibbs/errors.hpp"

namespace hogibbs {

double tv_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw DimensionMismatch("tables of size " + std::to_string(p.size()) + " and " +
                            std::to_string(q.size()));
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) sum += std::abs(p[k] - q[k]);
  return 0.5 * sum;
}

double tv_distance(const JointDistribution& p, const JointDistribution& q) {
  if (p.domain_sizes != q.domain_sizes) throw DimensionMismatch("different product spaces");
  return tv_distance(p.probabilities, q.probabilities);
}

double sparse_variation_distance(const JointDistribution& p, const JointDistribution& q,
                                 int omega) {
  if (p.domain_sizes != q.domain_sizes) throw DimensionMismatch("different product spaces");
  if (p.probabilities.size() != q.probabilities.size()) {
    throw DimensionMismatch("probability tables differ in size");
  }
  const auto n = static_cast<int>(p.domain_sizes.size());
  if (n > 20) throw SubsetSpaceTooLarge(std::to_string(n) + " variables (limit 20)");
  if (omega < 1 || omega > n) throw ConfigError("omega must lie in [1, n]");
  if (omega == n) return tv_distance(p, q);

  const JointIndexer full(p.domain_sizes);
  std::vector<double> diff(p.probabilities.size());
  for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = p.probabilities[k] - q.probabilities[k];
  std::vector<std::vector<int>> decoded(diff.size());
  for (std::uint64_t k = 0; k < diff.size(); ++k) decoded[k] = full.decode(k);

  // Iterate combinations of size omega in lexicographic order.
  std::vector<int> subset(static_cast<std::size_t>(omega));
  std::iota(subset.begin(), subset.end(), 0);
  std::vector<double> table;
  double best = 0.0;
  for (;;) {
    std::vector<std::uint64_t> strides(subset.size());
    std::uint64_t size = 1;
    for (std::size_t s = subset.size(); s-- > 0;) {
      strides[s] = size;
      size *= static_cast<std::uint64_t>(p.domain_sizes[subset[s]]);
    }
    table.assign(size, 0.0);
    for (std::size_t k = 0; k < diff.size(); ++k) {
      std::uint64_t idx = 0;
      for (std::size_t s = 0; s < subset.size(); ++s) {
        idx += strides[s] * static_cast<std::uint64_t>(decoded[k][subset[s]]);
      }
      table[idx] += diff[k];
    }
    double l1 = 0.0;
    for (double v : table) l1 += std::abs(v);
    best = std::max(best, 0.5 * l1);

    int pos = omega - 1;
    while (pos >= 0 && subset[pos] == n - omega + pos) --pos;
    if (pos < 0) break;
    ++subset[pos];
    for (int s = pos + 1; s < omega; ++s) subset[s] = subset[s - 1] + 1;
  }
  return best;
}

}  // namespace hogibbs
