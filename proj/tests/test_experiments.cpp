#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "hogibbs/errors.hpp"
#include "hogibbs/experiments.hpp"

using namespace hogibbs;
using nlohmann::json;

namespace {

ExperimentConfig make(const std::string& name, json params, std::uint64_t seed = 1) {
  ExperimentConfig c;
  c.experiment = name;
  c.params = std::move(params);
  c.seed = seed;
  c.threads = 1;
  return c;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST(ExperimentConfig, ParsesKnownKeys) {
  const auto c = ExperimentConfig::from_json(json::parse(
      R"({"experiment": "bias", "seed": 9, "threads": 2, "paper_scale": true,
          "out": "somewhere", "params": {"steps": 1000}})"));
  EXPECT_EQ(c.experiment, "bias");
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.threads, 2);
  EXPECT_TRUE(c.paper_scale);
  EXPECT_EQ(c.out_dir, std::filesystem::path("somewhere"));
  EXPECT_EQ(c.params["steps"], 1000);
  EXPECT_EQ(c.to_json()["seed"], 9);
}

TEST(ExperimentConfig, RejectsUnknownKeysAndBadTypes) {
  EXPECT_THROW(ExperimentConfig::from_json(json::parse(R"({"experimnt": "bias"})")),
               ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json(json::parse(R"({"seed": "x"})")), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json(json::parse(R"({"params": [1]})")), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json(json::parse("[]")), ConfigError);
}

TEST(Experiments, UnknownParamsAndNamesAreConfigErrors) {
  EXPECT_THROW(run_experiment(make("bounds-table", {{"alpah", 0.5}})), ConfigError);
  EXPECT_THROW(run_experiment(make("bias", {{"steps", "many"}})), ConfigError);
  EXPECT_THROW(run_experiment(make("nonesuch", json::object())), ConfigError);
  EXPECT_EQ(experiment_names().size(), 6u);
}

TEST(Experiments, BoundsTableRows) {
  const auto r = run_experiment(make("bounds-table", {{"n", 1000}, {"alpha", 0.6},
                                                      {"tau", 1}, {"tau_star", 200},
                                                      {"epsilon", 0.05}}));
  EXPECT_FALSE(r.guard_violation);
  const auto rows = parse_csv(r.csv);
  ASSERT_EQ(rows.size(), 8u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"bound_name", "value", "guard_satisfied",
                                               "violation"}));
  std::map<std::string, double> value;
  for (std::size_t k = 1; k < rows.size(); ++k) value[rows[k][0]] = std::stod(rows[k][1]);
  EXPECT_EQ(value["seq_sparse_estimation"], 7490);
  EXPECT_EQ(value["hog_sparse_estimation"], 7640);
  EXPECT_NEAR(value["mixing_sequential"], 2500 * std::log(1000 / 0.05), 1e-6);
  EXPECT_NEAR(value["mixing_hogwild"] / value["mixing_sequential"], 1 + 0.6 * 200 / 1000, 1e-9);
}

TEST(Experiments, BoundsTableFlagsDobrushinViolation) {
  const auto r = run_experiment(make("bounds-table", {{"alpha", 1.2}}));
  EXPECT_TRUE(r.guard_violation);
  bool saw = false;
  for (const auto& row : r.meta["summary"]["rows"]) {
    if (!row["guard_satisfied"].get<bool>()) {
      saw = true;
      EXPECT_NE(row["violation"].get<std::string>().find("DobrushinViolated"),
                std::string::npos);
      EXPECT_TRUE(row["value"].is_null());
    }
  }
  EXPECT_TRUE(saw);
}

TEST(Experiments, BiasOutputIsReproducible) {
  const auto params = json{{"steps", 20000}};
  const auto a = run_experiment(make("bias", params, 5));
  const auto b = run_experiment(make("bias", params, 5));
  const auto c = run_experiment(make("bias", params, 6));
  EXPECT_EQ(a.csv, b.csv);
  EXPECT_EQ(a.meta.dump(), b.meta.dump());
  EXPECT_NE(a.csv, c.csv);

  const auto dir = std::filesystem::temp_directory_path() / "hogibbs_bias_repro";
  std::filesystem::remove_all(dir);
  write_outputs(a, dir / "one");
  write_outputs(b, dir / "two");
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  EXPECT_EQ(slurp(dir / "one" / "bias.csv"), slurp(dir / "two" / "bias.csv"));
  EXPECT_EQ(slurp(dir / "one" / "bias.meta.json"), slurp(dir / "two" / "bias.meta.json"));
  const auto meta = json::parse(slurp(dir / "one" / "bias.meta.json"));
  EXPECT_EQ(meta["experiment"], "bias");
  EXPECT_EQ(meta["config"]["seed"], 5);
  std::filesystem::remove_all(dir);
}

TEST(Experiments, CsvMatchesDeclaredSchema) {
  const auto r = run_experiment(make("bias", {{"steps", 20000}}));
  const auto rows = parse_csv(r.csv);
  const auto& columns = r.meta["columns"];
  ASSERT_EQ(rows[0].size(), columns.size());
  for (std::size_t k = 0; k < columns.size(); ++k) {
    EXPECT_EQ(rows[0][k], columns[k]["name"].get<std::string>());
  }
  ASSERT_EQ(rows.size(), 5u);
  double exact = 0, seq = 0;
  for (std::size_t r_ = 1; r_ < rows.size(); ++r_) {
    ASSERT_EQ(rows[r_].size(), columns.size());
    for (std::size_t k = 0; k < columns.size(); ++k) {
      if (columns[k]["type"] == "real") {
        EXPECT_NO_THROW(std::stod(rows[r_][k]));
      }
    }
    exact += std::stod(rows[r_][1]);
    seq += std::stod(rows[r_][2]);
  }
  EXPECT_NEAR(exact, 1.0, 1e-9);
  EXPECT_NEAR(seq, 1.0, 1e-9);
  EXPECT_GT(r.meta["summary"]["hogwild"]["mass_00"].get<double>(), 0.0);
}

TEST(Experiments, InfluenceReport) {
  const auto bias = run_experiment(make("influence-report", {{"model", "bias"}}));
  EXPECT_NEAR(bias.meta["summary"]["alpha"].get<double>(), 0.5, 1e-6);
  EXPECT_FALSE(bias.guard_violation);
  const auto edge =
      run_experiment(make("influence-report", {{"model", "single_edge"}, {"beta", 0.2}}));
  EXPECT_NEAR(edge.meta["summary"]["alpha"].get<double>(), std::tanh(0.2), 1e-9);
  const auto strong =
      run_experiment(make("influence-report", {{"model", "ising_bound"}, {"beta", 1.0}}));
  EXPECT_TRUE(strong.guard_violation);
  EXPECT_THROW(run_experiment(make("influence-report", {{"model", "file"}})), ConfigError);
}

TEST(Experiments, TinyTauSweepAndBadMix) {
  const auto sweep = run_experiment(make(
      "tausweep", {{"n", 60}, {"grid", {0, 5}}, {"support_max", 10}, {"trials", 100}}));
  EXPECT_EQ(parse_csv(sweep.csv).size(), 3u);
  const auto badmix = run_experiment(
      make("badmix", {{"N", 5}, {"trials", 4}, {"updates", 1000}, {"checkpoints", 10}}));
  const auto rows = parse_csv(badmix.csv);
  EXPECT_EQ(rows.size(), 11u);
  EXPECT_EQ(rows[0][0], "updates");
}
