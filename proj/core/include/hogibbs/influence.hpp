#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hogibbs/factor_graph.hpp"

namespace hogibbs {

enum class InfluenceMethod { kExactEnumeration, kIsingClosedForm };

std::string to_string(InfluenceMethod method);

/// Total influence alpha = max_i sum_j max_{(X,Y) differing at j} TV of the
/// conditionals of i. Dobrushin's condition is alpha < 1.
struct InfluenceReport {
  double alpha = 0.0;
  InfluenceMethod method = InfluenceMethod::kExactEnumeration;
  /// rows[i] lists (j, influence of j on i) for j in the blanket of i; all
  /// other entries, including j = i, are zero. Empty for closed forms.
  std::vector<std::vector<std::pair<VarId, double>>> rows;
  bool dobrushin_satisfied = true;
  std::size_t n = 0;
  /// Largest number of blanket assignments enumerated for one (i, j) pair.
  std::uint64_t cap_used = 0;

  double row_sum(VarId i) const;
  nlohmann::json to_json() const;
};

/// Exact enumeration. The conditional of i depends only on its Markov
/// blanket, so for each j in the blanket only assignments to the rest of the
/// blanket are enumerated; cap limits that count.
InfluenceReport total_influence_exact(const FactorGraph& graph,
                                      std::uint64_t cap = std::uint64_t{1} << 20);

/// max_degree * tanh(beta).
double ising_influence_bound(int max_degree, double beta);

InfluenceReport ising_influence_report(int max_degree, double beta, std::size_t n);

}  // namespace hogibbs
