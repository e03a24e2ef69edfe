#include "hogibbs/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "hogibbs/errors.hpp"

namespace hogibbs {

namespace {

double positive_part(double x) { return std::max(0.0, x); }

void require_dobrushin(const BoundInputs& in) {
  if (!(in.alpha < 1.0)) {
    throw DobrushinViolated("alpha = " + std::to_string(in.alpha) + " is not < 1");
  }
}

std::int64_t ceil_nonnegative(double x) {
  return static_cast<std::int64_t>(std::ceil(std::max(0.0, x)));
}

}  // namespace

void BoundInputs::validate() const {
  if (!(n >= 0 && alpha >= 0 && tau >= 0 && tau_star >= 0 && t >= 0)) {
    throw ConfigError("bound inputs must be nonnegative");
  }
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ConfigError("epsilon must lie in (0, 1]");
  if (!(omega >= 1.0 && omega <= n)) throw ConfigError("omega must lie in [1, n]");
}

double seq_sparse_estimation_value(const BoundInputs& in) {
  in.validate();
  require_dobrushin(in);
  return in.n / (1.0 - in.alpha) * std::log(in.omega / in.epsilon);
}

std::int64_t bound_seq_sparse_estimation(const BoundInputs& in) {
  return ceil_nonnegative(seq_sparse_estimation_value(in));
}

double hog_sparse_estimation_min_epsilon(const BoundInputs& in) {
  return 2.0 * in.omega * in.alpha * in.tau / ((1.0 - in.alpha) * in.n);
}

std::int64_t bound_hog_sparse_estimation(const BoundInputs& in) {
  in.validate();
  require_dobrushin(in);
  const double floor_eps = hog_sparse_estimation_min_epsilon(in);
  if (in.epsilon < floor_eps) {
    throw EpsilonTooSmall("epsilon = " + std::to_string(in.epsilon) + " < " +
                          std::to_string(floor_eps));
  }
  const double gap = 1.0 - in.alpha;
  return ceil_nonnegative(seq_sparse_estimation_value(in) +
                          2.0 * in.omega * in.alpha * in.tau / (gap * gap * in.epsilon));
}

double bound_hogwild_bias(const BoundInputs& in) {
  in.validate();
  return in.omega * in.alpha * in.tau * in.t / (in.n * in.n) *
         std::exp(positive_part(in.alpha - 1.0) / in.n * in.t);
}

std::int64_t bound_general_bias_estimation(const BoundInputs& in,
                                           const std::function<double(double)>& seq_bound) {
  in.validate();
  const double eps = in.epsilon;
  // Spot check that seq_bound is decreasing and convex on [eps/2, eps].
  const double fa = seq_bound(0.5 * eps);
  const double fb = seq_bound(0.75 * eps);
  const double fc = seq_bound(eps);
  const double slack = 1e-9 * std::max({1.0, std::abs(fa), std::abs(fc)});
  if (!(fa + slack >= fb && fb + slack >= fc) || fb > 0.5 * (fa + fc) + slack) {
    throw NonConvexBoundFunction("sequential bound is not convex and decreasing near epsilon");
  }
  const double c = fa / in.n;
  const double growth = std::exp(c * positive_part(in.alpha - 1.0));
  const double floor_eps = 2.0 * in.omega * in.alpha * in.tau * c / in.n * growth;
  if (eps < floor_eps) {
    throw EpsilonTooSmall("epsilon = " + std::to_string(eps) + " < " +
                          std::to_string(floor_eps));
  }
  return ceil_nonnegative(fc + 2.0 * in.omega * in.alpha * in.tau * c * c / eps * growth);
}

double bound_mixing(const BoundInputs& in, MixingVariant variant) {
  in.validate();
  require_dobrushin(in);
  const double scale = variant == MixingVariant::kSequential
                           ? in.n
                           : in.n + in.alpha * in.tau_star;
  return scale / (1.0 - in.alpha) * std::log(in.n / in.epsilon);
}

nlohmann::json to_json(const BoundInputs& in) {
  return {{"n", in.n},         {"alpha", in.alpha}, {"tau", in.tau},
          {"tau_star", in.tau_star}, {"omega", in.omega}, {"epsilon", in.epsilon},
          {"t", in.t}};
}

}  // namespace hogibbs
