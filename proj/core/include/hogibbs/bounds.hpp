#pragma once

#include <cstdint>
#include <functional>

#include <json.hpp>

namespace hogibbs {

/// Parameters shared by the closed-form bias and mixing-time bounds. Logs are
/// natural logs throughout.
struct BoundInputs {
  double n = 1.0;         // number of variables
  double alpha = 0.0;     // total influence
  double tau = 0.0;       // bound on the expected delay
  double tau_star = 0.0;  // bound on n (E[exp(delay / n)] - 1)
  double omega = 1.0;     // event sparsity
  double epsilon = 0.25;  // target accuracy, in (0, 1]
  double t = 0.0;         // step count

  /// Throws ConfigError unless all fields are nonnegative, epsilon is in
  /// (0, 1] and omega is in [1, n].
  void validate() const;
};

/// n / (1 - alpha) * ln(omega / epsilon), before rounding up.
double seq_sparse_estimation_value(const BoundInputs& in);

/// ceil(n / (1 - alpha) * ln(omega / epsilon)).
std::int64_t bound_seq_sparse_estimation(const BoundInputs& in);

/// Smallest epsilon the asynchronous estimation bound accepts:
/// 2 omega alpha tau / ((1 - alpha) n).
double hog_sparse_estimation_min_epsilon(const BoundInputs& in);

/// ceil(n / (1 - alpha) ln(omega / epsilon) + 2 omega alpha tau / ((1 - alpha)^2 epsilon)).
std::int64_t bound_hog_sparse_estimation(const BoundInputs& in);

/// (omega alpha tau t / n^2) exp((alpha - 1)_+ t / n).
double bound_hogwild_bias(const BoundInputs& in);

/// Sparse-estimation bound for asynchronous Gibbs built on any convex,
/// decreasing sequential bound seq_bound(epsilon):
///   c = seq_bound(epsilon / 2) / n,
///   ceil(seq_bound(epsilon) + 2 omega alpha tau c^2 / epsilon * exp(c (alpha - 1)_+)),
/// valid when epsilon >= 2 omega alpha tau c / n * exp(c (alpha - 1)_+).
std::int64_t bound_general_bias_estimation(const BoundInputs& in,
                                           const std::function<double(double)>& seq_bound);

enum class MixingVariant { kSequential, kHogwild };

/// n / (1 - alpha) ln(n / epsilon), or (n + alpha tau*) / (1 - alpha) ln(n / epsilon).
double bound_mixing(const BoundInputs& in, MixingVariant variant);

nlohmann::json to_json(const BoundInputs& in);

}  // namespace hogibbs
