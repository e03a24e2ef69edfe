#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "hogibbs/errors.hpp"
#include "hogibbs/experiments.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitGuard = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gibbs sampling experiments"};
  std::string experiment;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::optional<int> threads;
  bool paper_scale = false;
  bool strict = false;

  app.add_option("experiment", experiment, "Experiment to run")
      ->required()
      ->check(CLI::IsMember(hogibbs::experiment_names()));
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--threads", threads, "Worker threads for independent trials");
  app.add_flag("--paper-scale", paper_scale, "Use full-scale sizes and trial counts (N=2001, 10^4 trials)");
  app.add_flag("--strict", strict, "Exit with status 3 when a guard is violated");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    nlohmann::json j = nlohmann::json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw hogibbs::ConfigError("cannot open " + config_path);
      try {
        in >> j;
      } catch (const nlohmann::json::exception& e) {
        throw hogibbs::ConfigError(config_path + ": " + e.what());
      }
    }
    auto config = hogibbs::ExperimentConfig::from_json(j);
    if (!config.experiment.empty() && config.experiment != experiment) {
      throw hogibbs::ConfigError("config is for '" + config.experiment + "', not '" +
                                 experiment + "'");
    }
    config.experiment = experiment;
    if (seed) config.seed = *seed;
    if (threads) config.threads = *threads;
    if (!out_dir.empty()) config.out_dir = out_dir;
    config.paper_scale = config.paper_scale || paper_scale;

    const auto result = hogibbs::run_experiment(config);
    hogibbs::write_outputs(result, config.out_dir);
    std::cout << result.meta["summary"].dump(2) << '\n';
    if (result.guard_violation) {
      std::cerr << "guard violated (see " << result.name << ".meta.json)\n";
      if (strict) return kExitGuard;
    }
    return EXIT_SUCCESS;
  } catch (const hogibbs::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return EXIT_FAILURE;
  }
}
