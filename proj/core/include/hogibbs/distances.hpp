#pragma once

#include <span>
#include <string>

#include <json.hpp>

#include "hogibbs/factor_graph.hpp"

namespace hogibbs {

/// (1/2) sum |p_x - q_x|.
double tv_distance(std::span<const double> p, std::span<const double> q);
double tv_distance(const JointDistribution& p, const JointDistribution& q);

/// Largest TV distance between the marginals of p and q over any omega
/// variables. Only subsets of size exactly omega are enumerated since
/// marginal TV can only grow when variables are added. At most 20 variables.
double sparse_variation_distance(const JointDistribution& p, const JointDistribution& q,
                                 int omega);

struct DistanceResult {
  double value = 0.0;
  std::string kind;  // "tv" or "sparse-variation"
  int omega = 0;     // 0 for plain tv

  nlohmann::json to_json() const {
    return {{"value", value}, {"kind", kind}, {"omega", omega}};
  }
};

}  // namespace hogibbs
