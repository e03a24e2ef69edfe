#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hogibbs/errors.hpp"
#include "hogibbs/influence.hpp"
#include "hogibbs/model_zoo.hpp"
#include "oracles.hpp"

using namespace hogibbs;

namespace {

// Influence straight from the definition: for each (i, j), all full states
// X and Y that differ only at j, TV of the conditionals of i.
double brute_influence(const FactorGraph& g) {
  const auto p = oracle::joint(g);
  const auto states = oracle::all_states(g.domain_sizes());
  const std::size_t n = g.num_variables();
  double alpha = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      double worst = 0;
      for (const auto& x : states) {
        for (int v = 0; v < g.domain_size(static_cast<VarId>(j)); ++v) {
          auto y = x;
          y[j] = v;
          const auto a = oracle::conditional_from_joint(g, p, x, i);
          const auto b = oracle::conditional_from_joint(g, p, y, i);
          double tv = 0;
          for (std::size_t z = 0; z < a.size(); ++z) tv += std::abs(a[z] - b[z]);
          worst = std::max(worst, tv / 2);
        }
      }
      row += worst;
    }
    alpha = std::max(alpha, row);
  }
  return alpha;
}

FactorGraph random_small_ising(std::mt19937_64& rng, std::vector<double>& betas,
                               std::vector<std::pair<VarId, VarId>>& edges) {
  std::uniform_real_distribution<double> beta(0.0, 0.5);
  const std::size_t n = 2 + rng() % 3;
  edges.clear();
  betas.clear();
  for (VarId a = 0; a < n; ++a) {
    for (VarId b = a + 1; b < n; ++b) {
      if (rng() % 2) {
        edges.emplace_back(a, b);
        betas.push_back(beta(rng));
      }
    }
  }
  if (edges.empty()) {
    edges.emplace_back(0, 1);
    betas.push_back(beta(rng));
  }
  return build_ising(n, edges, betas);
}

}  // namespace

TEST(TotalInfluence, BiasExampleIsOneHalf) {
  const auto r = total_influence_exact(build_bias_example());
  EXPECT_NEAR(r.alpha, 0.5, 1e-6);
  EXPECT_TRUE(r.dobrushin_satisfied);
  EXPECT_EQ(r.method, InfluenceMethod::kExactEnumeration);
}

TEST(TotalInfluence, FreeVariablesHaveNone) {
  const FactorGraph g({{0, 2}, {1, 3}}, {});
  EXPECT_EQ(total_influence_exact(g).alpha, 0.0);
}

TEST(TotalInfluence, SingleEdgeIsTanhBeta) {
  for (double beta : {0.1, 0.2, 0.5}) {
    EXPECT_NEAR(total_influence_exact(build_single_edge_ising(beta)).alpha, std::tanh(beta),
                1e-9);
  }
  EXPECT_NEAR(std::tanh(0.2), 0.19738, 1e-5);
}

TEST(TotalInfluence, MatchesDefinitionOnRandomModels) {
  std::mt19937_64 rng(31);
  for (int m = 0; m < 25; ++m) {
    const auto g = oracle::random_small_model(rng);
    EXPECT_NEAR(total_influence_exact(g).alpha, brute_influence(g), 1e-12);
  }
}

TEST(TotalInfluence, RowsAndAlphaAgree) {
  std::mt19937_64 rng(32);
  const auto g = oracle::random_small_model(rng);
  const auto r = total_influence_exact(g);
  double best = 0;
  for (std::size_t i = 0; i < g.num_variables(); ++i) best = std::max(best, r.row_sum(static_cast<VarId>(i)));
  EXPECT_DOUBLE_EQ(best, r.alpha);
  EXPECT_EQ(r.dobrushin_satisfied, r.alpha < 1);
  const auto j = r.to_json();
  for (const char* key : {"alpha", "method", "dobrushin_satisfied", "n", "cap_used"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
}

TEST(TotalInfluence, BoundedByBlanketSizeAndEdgeSums) {
  std::mt19937_64 rng(33);
  for (int m = 0; m < 30; ++m) {
    std::vector<double> betas;
    std::vector<std::pair<VarId, VarId>> edges;
    const auto g = random_small_ising(rng, betas, edges);
    const auto r = total_influence_exact(g);
    std::vector<double> incident(g.num_variables(), 0.0);
    for (std::size_t e = 0; e < edges.size(); ++e) {
      incident[edges[e].first] += std::tanh(betas[e]);
      incident[edges[e].second] += std::tanh(betas[e]);
    }
    EXPECT_LE(r.alpha, *std::max_element(incident.begin(), incident.end()) + 1e-9);
    EXPECT_LE(r.alpha, static_cast<double>(g.max_blanket_size()));
  }
}

TEST(TotalInfluence, InvariantUnderEnergyShift) {
  const std::vector<double> table{0.4, -0.1, 1.3, -0.7};
  auto build = [&](double shift) {
    auto t = table;
    for (auto& v : t) v += shift;
    return FactorGraph({{0, 2}, {1, 2}},
                       {{{0, 1}, std::make_shared<TableFactor>(std::vector<int>{2, 2}, t)}});
  };
  EXPECT_NEAR(total_influence_exact(build(0)).alpha, total_influence_exact(build(9.0)).alpha,
              1e-12);
}

TEST(TotalInfluence, IncreasesWithCoupling) {
  double last = -1;
  for (double beta = 0.05; beta < 2.0; beta += 0.15) {
    const double a = total_influence_exact(build_single_edge_ising(beta)).alpha;
    EXPECT_GT(a, last);
    last = a;
  }
}

TEST(TotalInfluence, CapIsEnforced) {
  std::vector<VariableSpec> vars;
  for (VarId i = 0; i < 12; ++i) vars.push_back({i, 2});
  std::vector<VarId> scope;
  for (VarId i = 0; i < 12; ++i) scope.push_back(i);
  auto t = std::make_shared<TableFactor>(std::vector<int>(12, 2), std::vector<double>(4096, 0.0));
  const FactorGraph g(vars, {{scope, t}});
  EXPECT_THROW(total_influence_exact(g, 100), StateSpaceTooLarge);
  EXPECT_NO_THROW(total_influence_exact(g, 2048));
}

TEST(IsingBound, ClosedForm) {
  EXPECT_NEAR(ising_influence_bound(3, 0.2), 3 * std::tanh(0.2), 1e-15);
  EXPECT_NEAR(ising_influence_bound(3, 0.2), 0.59213, 1e-5);
  EXPECT_LE(ising_influence_bound(3, 0.2), 0.6);
  EXPECT_EQ(ising_influence_bound(0, 0.7), 0.0);
  EXPECT_EQ(ising_influence_bound(4, 0.0), 0.0);
  EXPECT_GT(ising_influence_bound(1, 20.0), 0.999999);
  EXPECT_THROW(ising_influence_bound(-1, 0.2), ConfigError);
  const auto r = ising_influence_report(3, 0.2, 1000);
  EXPECT_EQ(r.method, InfluenceMethod::kIsingClosedForm);
  EXPECT_TRUE(r.dobrushin_satisfied);
  EXPECT_FALSE(ising_influence_report(3, 1.0, 10).dobrushin_satisfied);
}
