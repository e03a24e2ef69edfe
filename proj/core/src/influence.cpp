#include "hogibbs/influence.hpp"

#include <algorithm>
#include <cmath>

#include "hogibbs/distances.hpp"
#include "hogibbs/errors.hpp"

namespace hogibbs {

std::string to_string(InfluenceMethod method) {
  return method == InfluenceMethod::kExactEnumeration ? "exact-enumeration"
                                                      : "ising-closed-form";
}

double InfluenceReport::row_sum(VarId i) const {
  double s = 0.0;
  for (const auto& [j, v] : rows.at(i)) s += v;
  return s;
}

nlohmann::json InfluenceReport::to_json() const {
  return {{"alpha", alpha},
          {"method", to_string(method)},
          {"dobrushin_satisfied", dobrushin_satisfied},
          {"n", n},
          {"cap_used", cap_used}};
}

InfluenceReport total_influence_exact(const FactorGraph& graph, std::uint64_t cap) {
  const std::size_t n = graph.num_variables();
  InfluenceReport report;
  report.method = InfluenceMethod::kExactEnumeration;
  report.n = n;
  report.rows.resize(n);

  std::vector<int> view(n, 0);
  ConditionalWorkspace ws(graph);
  const auto width = static_cast<std::size_t>(graph.max_domain_size());
  std::vector<double> pa(width), pb(width);
  std::vector<std::vector<double>> per_value;

  for (std::size_t ii = 0; ii < n; ++ii) {
    const auto i = static_cast<VarId>(ii);
    const auto di = static_cast<std::size_t>(graph.domain_size(i));
    const auto blanket = graph.markov_blanket(i);
    double row = 0.0;
    for (VarId j : blanket) {
      std::vector<VarId> others;
      std::uint64_t count = 1;
      for (VarId v : blanket) {
        if (v == j) continue;
        others.push_back(v);
        count *= static_cast<std::uint64_t>(graph.domain_size(v));
        if (count > cap) {
          throw StateSpaceTooLarge("influence of " + std::to_string(j) + " on " +
                                   std::to_string(i) + " needs more than " +
                                   std::to_string(cap) + " assignments");
        }
      }
      report.cap_used = std::max(report.cap_used, count);
      const auto dj = static_cast<std::size_t>(graph.domain_size(j));
      per_value.assign(dj, std::vector<double>(di));
      double worst = 0.0;
      for (std::uint64_t a = 0; a < count; ++a) {
        // Odometer over the other blanket variables.
        std::uint64_t rest = a;
        for (VarId v : others) {
          const auto d = static_cast<std::uint64_t>(graph.domain_size(v));
          view[v] = static_cast<int>(rest % d);
          rest /= d;
        }
        for (std::size_t z = 0; z < dj; ++z) {
          view[j] = static_cast<int>(z);
          conditional_into(graph, view, i, ws, per_value[z]);
        }
        // Unordered value pairs at j; TV is symmetric.
        for (std::size_t za = 0; za < dj; ++za) {
          for (std::size_t zb = za + 1; zb < dj; ++zb) {
            worst = std::max(worst, tv_distance(per_value[za], per_value[zb]));
          }
        }
      }
      view[j] = 0;
      for (VarId v : others) view[v] = 0;
      report.rows[i].emplace_back(j, worst);
      row += worst;
    }
    // The j = i term is zero: both states share every other variable.
    report.alpha = std::max(report.alpha, row);
  }
  report.dobrushin_satisfied = report.alpha < 1.0;
  return report;
}

double ising_influence_bound(int max_degree, double beta) {
  if (max_degree < 0) throw ConfigError("max_degree must be >= 0");
  return static_cast<double>(max_degree) * std::tanh(beta);
}

InfluenceReport ising_influence_report(int max_degree, double beta, std::size_t n) {
  InfluenceReport report;
  report.method = InfluenceMethod::kIsingClosedForm;
  report.alpha = ising_influence_bound(max_degree, beta);
  report.dobrushin_satisfied = report.alpha < 1.0;
  report.n = n;
  return report;
}

}  // namespace hogibbs
