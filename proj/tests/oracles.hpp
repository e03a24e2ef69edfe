#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls into the library's inference code; models are read through the
// public factor interface and evaluated by plain loops.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "hogibbs/factor_graph.hpp"

namespace oracle {

// All joint states, first variable most significant.
inline std::vector<std::vector<int>> all_states(const std::vector<int>& domains) {
  std::vector<std::vector<int>> out;
  std::vector<int> x(domains.size(), 0);
  for (;;) {
    out.push_back(x);
    int k = static_cast<int>(domains.size()) - 1;
    while (k >= 0 && ++x[k] == domains[k]) x[k--] = 0;
    if (k < 0) break;
  }
  return out;
}

inline long double total_energy(const hogibbs::FactorGraph& g, const std::vector<int>& x) {
  long double e = 0;
  for (const auto& f : g.factors()) {
    std::vector<int> vals;
    for (auto v : f.scope) vals.push_back(x[v]);
    e += f.function->energy(vals);
  }
  return e;
}

// Joint law by direct normalization in long double.
inline std::vector<double> joint(const hogibbs::FactorGraph& g) {
  const auto states = all_states(g.domain_sizes());
  std::vector<long double> w;
  long double top = -INFINITY;
  for (const auto& x : states) {
    w.push_back(total_energy(g, x));
    top = std::max(top, w.back());
  }
  long double z = 0;
  for (auto& v : w) z += (v = std::exp(v - top));
  std::vector<double> p;
  for (auto v : w) p.push_back(static_cast<double>(v / z));
  return p;
}

// P(x_i = . | x_{-i}) read off the joint table.
inline std::vector<double> conditional_from_joint(const hogibbs::FactorGraph& g,
                                                  const std::vector<double>& p,
                                                  std::vector<int> x, std::size_t i) {
  const auto& d = g.domain_sizes();
  auto index = [&](const std::vector<int>& s) {
    std::uint64_t k = 0;
    for (std::size_t v = 0; v < d.size(); ++v) k = k * d[v] + s[v];
    return k;
  };
  std::vector<double> out(d[i]);
  double z = 0;
  for (int v = 0; v < d[i]; ++v) {
    x[i] = v;
    out[v] = p[index(x)];
    z += out[v];
  }
  for (auto& v : out) v /= z;
  return out;
}

// Random model with <= 3 variables, domains 2..3, unary and pairwise/ternary
// tables with energies in [-2, 2].
inline hogibbs::FactorGraph random_small_model(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nvar(1, 3), dom(2, 3);
  std::uniform_real_distribution<double> energy(-2.0, 2.0);
  const int n = nvar(rng);
  std::vector<hogibbs::VariableSpec> vars;
  for (int i = 0; i < n; ++i) vars.push_back({static_cast<hogibbs::VarId>(i), dom(rng)});
  std::vector<hogibbs::Factor> factors;
  auto add = [&](std::vector<hogibbs::VarId> scope) {
    std::vector<int> sizes;
    std::size_t cells = 1;
    for (auto v : scope) {
      sizes.push_back(vars[v].domain_size);
      cells *= static_cast<std::size_t>(vars[v].domain_size);
    }
    std::vector<double> table(cells);
    for (auto& t : table) t = energy(rng);
    factors.push_back(
        {scope, std::make_shared<hogibbs::TableFactor>(sizes, std::move(table))});
  };
  for (int i = 0; i < n; ++i) add({static_cast<hogibbs::VarId>(i)});
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) add({static_cast<hogibbs::VarId>(i), static_cast<hogibbs::VarId>(j)});
  }
  if (n == 3) add({0, 1, 2});
  return hogibbs::FactorGraph(std::move(vars), std::move(factors));
}

// Steps until every one of n coordinates has been chosen at least once,
// choosing uniformly with replacement.
inline std::vector<std::uint64_t> coupon_collector_times(int n, int runs, std::uint64_t seed) {
  std::mt19937 rng(static_cast<std::mt19937::result_type>(seed));
  std::uniform_int_distribution<int> pick(0, n - 1);
  std::vector<std::uint64_t> out;
  for (int r = 0; r < runs; ++r) {
    std::vector<char> seen(n, 0);
    int left = n;
    std::uint64_t t = 0;
    while (left > 0) {
      ++t;
      const int k = pick(rng);
      if (!seen[k]) {
        seen[k] = 1;
        --left;
      }
    }
    out.push_back(t);
  }
  return out;
}

// Empirical q-quantile: smallest sample with at least q of the mass at or below.
inline std::uint64_t quantile(std::vector<std::uint64_t> v, double q) {
  std::sort(v.begin(), v.end());
  auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size()) - 1e-9));
  k = std::clamp<std::size_t>(k, 1, v.size());
  return v[k - 1];
}

// Pearson chi-square for independent draws with all expected counts
// positive; returns the statistic only.
inline double pearson(const std::vector<std::uint64_t>& counts, const std::vector<double>& p) {
  double n = 0;
  for (auto c : counts) n += static_cast<double>(c);
  double s = 0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const double e = n * p[k];
    if (e > 0) s += (static_cast<double>(counts[k]) - e) * (static_cast<double>(counts[k]) - e) / e;
  }
  return s;
}

}  // namespace oracle
