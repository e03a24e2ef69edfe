#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace hogibbs {

/// One experiment run. `params` holds experiment-specific keys; unknown keys
/// are rejected so typos fail loudly.
struct ExperimentConfig {
  std::string experiment;
  nlohmann::json params = nlohmann::json::object();
  std::uint64_t seed = 1;
  std::filesystem::path out_dir = ".";
  bool paper_scale = false;
  /// Trial-level worker threads; 0 means hardware concurrency.
  int threads = 0;

  /// Accepts {"experiment": ..., "seed": ..., "threads": ..., "paper_scale": ...,
  /// "params": {...}}.
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

const std::vector<std::string>& experiment_names();

struct ExperimentResult {
  std::string name;
  std::string csv;
  /// Written to <name>.meta.json: config, column schema and summary.
  nlohmann::json meta;
  bool guard_violation = false;
};

ExperimentResult cmd_bias(const ExperimentConfig& config);
ExperimentResult cmd_badmix(const ExperimentConfig& config);
ExperimentResult cmd_tausweep(const ExperimentConfig& config);
ExperimentResult cmd_throughput(const ExperimentConfig& config);
ExperimentResult cmd_bounds_table(const ExperimentConfig& config);
ExperimentResult cmd_influence_report(const ExperimentConfig& config);

/// Dispatches on config.experiment.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Writes <out_dir>/<name>.csv and <out_dir>/<name>.meta.json.
void write_outputs(const ExperimentResult& result, const std::filesystem::path& out_dir);

}  // namespace hogibbs
