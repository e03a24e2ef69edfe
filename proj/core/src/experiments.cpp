#include "hogibbs/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <thread>

#include "hogibbs/bounds.hpp"
#include "hogibbs/coupling.hpp"
#include "hogibbs/distances.hpp"
#include "hogibbs/errors.hpp"
#include "hogibbs/influence.hpp"
#include "hogibbs/markov_oracle.hpp"
#include "hogibbs/model_io.hpp"
#include "hogibbs/model_zoo.hpp"
#include "hogibbs/samplers.hpp"

namespace hogibbs {

using nlohmann::json;

namespace {

// Typed access to the params object that remembers which keys were read.
class Params {
 public:
  explicit Params(const json& j) : j_(j) {
    if (!j_.is_object()) throw ConfigError("params must be a JSON object");
  }

  template <typename T>
  T get(const std::string& key, T fallback) {
    used_.insert(key);
    if (!j_.contains(key)) return fallback;
    try {
      return j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError("param '" + key + "': " + e.what());
    }
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!used_.count(item.key())) throw ConfigError("unknown param '" + item.key() + "'");
    }
  }

 private:
  const json& j_;
  std::set<std::string> used_;
};

struct Column {
  std::string name;
  std::string type;  // "string", "integer" or "real"
};

class CsvTable {
 public:
  explicit CsvTable(std::vector<Column> columns) : columns_(std::move(columns)) {
    out_ << std::setprecision(12);
    for (std::size_t k = 0; k < columns_.size(); ++k) {
      out_ << (k ? "," : "") << columns_[k].name;
    }
    out_ << '\n';
  }

  template <typename... Ts>
  void row(const Ts&... values) {
    static_assert(sizeof...(Ts) > 0);
    std::size_t k = 0;
    ((out_ << (k++ ? "," : "") << values), ...);
    if (k != columns_.size()) throw std::logic_error("csv row width mismatch");
    out_ << '\n';
  }

  std::string str() const { return out_.str(); }

  json schema() const {
    json cols = json::array();
    for (const Column& c : columns_) cols.push_back({{"name", c.name}, {"type", c.type}});
    return cols;
  }

 private:
  std::vector<Column> columns_;
  std::ostringstream out_;
};

int resolve_threads(const ExperimentConfig& config) {
  if (config.threads > 0) return config.threads;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

ExperimentResult finish(const ExperimentConfig& config, const CsvTable& table,
                        json summary) {
  ExperimentResult r;
  r.name = config.experiment;
  r.csv = table.str();
  r.meta = {{"experiment", config.experiment},
            {"config", config.to_json()},
            {"columns", table.schema()},
            {"summary", std::move(summary)}};
  return r;
}

// Runs body(k) for k in [0, count) across worker threads.
template <typename Body>
void parallel_for(std::uint64_t count, int threads, Body body) {
  std::atomic<std::uint64_t> next{0};
  auto work = [&] {
    for (std::uint64_t k; (k = next.fetch_add(1)) < count;) body(k);
  };
  if (threads <= 1) {
    work();
    return;
  }
  std::vector<std::jthread> pool;
  for (int w = 0; w < threads; ++w) pool.emplace_back(work);
}

std::uint64_t as_count(double v, const char* what) {
  if (!(v >= 1.0) || !std::isfinite(v)) {
    throw ConfigError(std::string(what) + " must be >= 1");
  }
  return static_cast<std::uint64_t>(std::llround(v));
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  try {
    for (const auto& item : j.items()) {
      const std::string& key = item.key();
      if (key == "experiment") {
        c.experiment = item.value().get<std::string>();
      } else if (key == "seed") {
        c.seed = item.value().get<std::uint64_t>();
      } else if (key == "threads") {
        c.threads = item.value().get<int>();
      } else if (key == "paper_scale") {
        c.paper_scale = item.value().get<bool>();
      } else if (key == "out") {
        c.out_dir = item.value().get<std::string>();
      } else if (key == "params") {
        c.params = item.value();
      } else {
        throw ConfigError("unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!c.params.is_object()) throw ConfigError("params must be a JSON object");
  return c;
}

json ExperimentConfig::to_json() const {
  return {{"experiment", experiment},
          {"seed", seed},
          {"paper_scale", paper_scale},
          {"params", params}};
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"bias",       "badmix",           "tausweep",
                                              "throughput", "influence-report", "bounds-table"};
  return names;
}

ExperimentResult cmd_bias(const ExperimentConfig& config) {
  Params p(config.params);
  const auto steps = as_count(p.get<double>("steps", 1e6), "steps");
  const double rho = p.get<double>("rho", 0.5);
  const int delay = p.get<int>("delay", 1);
  const double penalty = p.get<double>("penalty", kBiasExamplePenalty);
  const auto burn_in = static_cast<std::uint64_t>(
      p.get<double>("burn_in", static_cast<double>(default_burn_in(steps))));
  p.finish();
  if (burn_in >= steps) throw ConfigError("burn_in must be below steps");

  const FactorGraph graph = build_bias_example(penalty);
  const DelayModel delays = DelayModel::iid_bernoulli(rho, delay, graph.num_variables());
  const ExactDistribution exact = exact_distribution(graph);
  const State start(graph.num_variables(), 1);
  const auto sink = SampleSink::joint_histogram(graph.domain_sizes(), burn_in);

  const SampleRun seq =
      run_sequential(graph, steps, start, RngStream(derive_seed(config.seed, 0)), sink);
  const SampleRun hog = run_hogwild_simulated(graph, steps, start, delays,
                                              RngStream(derive_seed(config.seed, 1)), sink);
  const CellStatistics seq_oracle = cell_statistics(gibbs_transition_matrix(graph));
  const CellStatistics hog_oracle = cell_statistics(hogwild_extended_chain(graph, delays));

  const JointDistribution seq_p = seq.sink.joint().normalized();
  const JointDistribution hog_p = hog.sink.joint().normalized();
  const std::uint64_t samples = hog.sink.joint().total();

  CsvTable table({{"state", "string"},
                  {"exact", "real"},
                  {"sequential", "real"},
                  {"hogwild", "real"},
                  {"hogwild_oracle", "real"},
                  {"hogwild_oracle_sigma", "real"}});
  const JointIndexer indexer(graph.domain_sizes());
  double worst_z = 0.0;
  for (std::uint64_t s = 0; s < indexer.size(); ++s) {
    const auto values = indexer.decode(s);
    const double sigma = hog_oracle.sigma(s, samples);
    const double gap = std::abs(hog_p.probabilities[s] - hog_oracle.probabilities[s]);
    if (sigma > 0) worst_z = std::max(worst_z, gap / sigma);
    table.row(state_label(values), exact.probabilities[s], seq_p.probabilities[s],
              hog_p.probabilities[s], hog_oracle.probabilities[s], sigma);
  }

  const double tv_seq = tv_distance(seq_p, exact);
  const double tv_hog = tv_distance(hog_p, exact);
  const double sv_seq = sparse_variation_distance(seq_p, exact, 1);
  const double sv_hog = sparse_variation_distance(hog_p, exact, 1);
  const auto seq_chi = markov_chi_square(seq.sink.joint().counts, seq_oracle);
  const auto hog_chi = markov_chi_square(hog.sink.joint().counts, hog_oracle);
  const int zero[2] = {0, 0};
  json summary = {
      {"samples", samples},
      {"burn_in", burn_in},
      {"delay_model", {{"kind", to_string(delays.kind())}, {"rho", rho}, {"delay", delay}}},
      {"sequential", {{"tv", tv_seq}, {"sv1", sv_seq}, {"chi2_p", seq_chi.p_value}}},
      {"hogwild",
       {{"tv", tv_hog},
        {"sv1", sv_hog},
        {"mass_00", hog_p.probability(zero)},
        {"oracle_mass_00", hog_oracle.probabilities[indexer.index(zero)]},
        {"oracle_chi2", hog_chi.statistic},
        {"oracle_chi2_dof", hog_chi.dof},
        {"oracle_chi2_p", hog_chi.p_value},
        {"oracle_max_sigma", worst_z}}},
      {"tv_over_sv1", sv_hog > 0 ? tv_hog / sv_hog : INFINITY}};
  return finish(config, table, std::move(summary));
}

ExperimentResult cmd_badmix(const ExperimentConfig& config) {
  Params p(config.params);
  const int N = p.get<int>("N", config.paper_scale ? 2001 : 201);
  const double beta = p.get<double>("beta", 0.3);
  const double M1 = p.get<double>("M1", 1e10);
  const double M2 = p.get<double>("M2", 100.0);
  const auto trials =
      as_count(p.get<double>("trials", config.paper_scale ? 1e4 : 200.0), "trials");
  const auto updates = as_count(p.get<double>("updates", 5e5), "updates");
  const auto checkpoints = as_count(p.get<double>("checkpoints", 50.0), "checkpoints");
  p.finish();
  if (checkpoints > updates) throw ConfigError("more checkpoints than updates");

  const FactorGraph graph = build_badmix_model(N, beta, M1, M2);
  const auto n = static_cast<std::size_t>(2 * N);
  std::vector<VarId> racing(static_cast<std::size_t>(N));
  for (int k = 0; k < N; ++k) racing[static_cast<std::size_t>(k)] = static_cast<VarId>(k);
  const DelayModel pattern = DelayModel::two_thread_pattern(racing, n);
  const State start(n, 1);
  const std::uint64_t stride = updates / checkpoints;
  // Records the state after every stride-th update.
  const auto sink = SampleSink::thinned_trace(n, stride, stride - 1);

  std::vector<std::uint64_t> seq_pos(checkpoints, 0), hog_pos(checkpoints, 0);
  std::vector<std::vector<char>> seq_hits(trials), hog_hits(trials);
  auto positive_y = [N](const State& s) {
    int sum = 0;
    for (std::size_t k = static_cast<std::size_t>(N); k < s.size(); ++k) sum += 2 * s[k] - 1;
    return sum > 0;
  };
  parallel_for(trials, resolve_threads(config), [&](std::uint64_t k) {
    const auto seq = run_sequential(graph, checkpoints * stride, start,
                                    RngStream(derive_seed(config.seed, 2 * k)), sink);
    const auto hog = run_hogwild_simulated(graph, checkpoints * stride, start, pattern,
                                           RngStream(derive_seed(config.seed, 2 * k + 1)),
                                           sink);
    for (const State& s : seq.sink.trace()) seq_hits[k].push_back(positive_y(s));
    for (const State& s : hog.sink.trace()) hog_hits[k].push_back(positive_y(s));
  });
  for (std::uint64_t k = 0; k < trials; ++k) {
    for (std::uint64_t c = 0; c < checkpoints; ++c) {
      seq_pos[c] += static_cast<std::uint64_t>(seq_hits[k][c]);
      hog_pos[c] += static_cast<std::uint64_t>(hog_hits[k][c]);
    }
  }

  CsvTable table({{"updates", "integer"},
                  {"sequential", "real"},
                  {"hogwild", "real"},
                  {"reference", "real"}});
  const double dt = static_cast<double>(trials);
  double hog_min = 1.0;
  for (std::uint64_t c = 0; c < checkpoints; ++c) {
    const double hog_frac = static_cast<double>(hog_pos[c]) / dt;
    hog_min = std::min(hog_min, hog_frac);
    table.row((c + 1) * stride, static_cast<double>(seq_pos[c]) / dt, hog_frac, 0.5);
  }
  json summary = {{"trials", trials},
                  {"updates", checkpoints * stride},
                  {"sequential_final", static_cast<double>(seq_pos.back()) / dt},
                  {"hogwild_final", static_cast<double>(hog_pos.back()) / dt},
                  {"hogwild_min", hog_min},
                  {"reference", 0.5}};
  return finish(config, table, std::move(summary));
}

ExperimentResult cmd_tausweep(const ExperimentConfig& config) {
  Params p(config.params);
  const auto n = static_cast<std::size_t>(p.get<double>("n", 1000.0));
  const int degree = p.get<int>("degree", 3);
  const double beta = p.get<double>("beta", 0.2);
  TauSweepConfig sweep;
  sweep.tau_star_grid = p.get<std::vector<double>>("grid", {0, 50, 100, 150, 200});
  sweep.support_max = p.get<int>("support_max", 200);
  sweep.trials = as_count(p.get<double>("trials", config.paper_scale ? 1e4 : 1000.0), "trials");
  sweep.epsilon = p.get<double>("epsilon", 0.25);
  sweep.step_cap = as_count(p.get<double>("step_cap", 1e8), "step_cap");
  p.finish();

  RngStream graph_rng(derive_seed(config.seed, 0));
  const FactorGraph graph = build_random_ising(n, degree, beta, {}, graph_rng);
  sweep.alpha = ising_influence_bound(degree, beta);
  sweep.seed = derive_seed(config.seed, 1);
  sweep.threads = resolve_threads(config);
  const auto rows = tau_sweep(graph, sweep);

  CsvTable table({{"tau_star", "real"},
                  {"t_hat", "integer"},
                  {"band_lo", "integer"},
                  {"band_hi", "integer"},
                  {"theory_prediction", "real"},
                  {"trials", "integer"},
                  {"censored_count", "integer"},
                  {"mean_delay", "real"}});
  json points = json::array();
  for (const TauSweepRow& r : rows) {
    table.row(r.tau_star, r.estimate.t_hat, r.estimate.band_lo, r.estimate.band_hi,
              r.theory_prediction, r.estimate.trials, r.estimate.censored, r.tau);
    points.push_back({{"tau_star", r.tau_star}, {"t_hat", r.estimate.t_hat}});
  }
  json summary = {{"n", n},
                  {"degree", degree},
                  {"beta", beta},
                  {"alpha", sweep.alpha},
                  {"epsilon", sweep.epsilon},
                  {"points", points}};
  return finish(config, table, std::move(summary));
}

ExperimentResult cmd_throughput(const ExperimentConfig& config) {
  Params p(config.params);
  const auto n = static_cast<std::size_t>(p.get<double>("n", 1e6));
  const int degree = p.get<int>("degree", 3);
  const double beta = p.get<double>("beta", 0.2);
  const auto workers = p.get<std::vector<int>>("workers", {1, 2, 4, 8});
  const auto steps = as_count(p.get<double>("steps", 2e7), "steps");
  p.finish();

  RngStream graph_rng(derive_seed(config.seed, 0));
  const FactorGraph graph = build_random_ising(n, degree, beta, {}, graph_rng);
  const State start(n, 0);
  std::vector<Event> events{{"x0", [](std::span<const int> s) { return s[0] == 1; }, {0}}};
  const auto sink = SampleSink::events(n, events, 0);

  CsvTable table({{"workers", "integer"},
                  {"hogwild_updates_per_second", "real"},
                  {"multimodel_updates_per_second", "real"},
                  {"hogwild_over_multimodel", "real"}});
  json rows = json::array();
  for (int w : workers) {
    const auto hog = run_hogwild_parallel(graph, steps, start, w,
                                          RngStream(derive_seed(config.seed, 1)), sink);
    const auto multi =
        run_multimodel(graph, steps, start, w, RngStream(derive_seed(config.seed, 2)), sink);
    const double ratio = hog.updates_per_second / multi.updates_per_second;
    table.row(w, hog.updates_per_second, multi.updates_per_second, ratio);
    rows.push_back({{"workers", w},
                    {"hogwild", hog.updates_per_second},
                    {"multimodel", multi.updates_per_second},
                    {"multimodel_state_bytes", multi.state_bytes},
                    {"hogwild_state_bytes", hog.state_bytes}});
  }
  json summary = {{"n", n},
                  {"steps", steps},
                  {"hardware_concurrency", std::thread::hardware_concurrency()},
                  {"rows", rows}};
  return finish(config, table, std::move(summary));
}

ExperimentResult cmd_bounds_table(const ExperimentConfig& config) {
  Params p(config.params);
  BoundInputs in;
  in.n = p.get<double>("n", 1000.0);
  if (p.has("degree") || p.has("beta")) {
    in.alpha = ising_influence_bound(p.get<int>("degree", 3), p.get<double>("beta", 0.2));
  } else {
    in.alpha = p.get<double>("alpha", 0.6);
  }
  in.tau = p.get<double>("tau", 0.0);
  in.tau_star = p.get<double>("tau_star", 0.0);
  in.omega = p.get<double>("omega", 1.0);
  in.epsilon = p.get<double>("epsilon", 0.25);
  in.t = p.get<double>("t", in.n);
  p.finish();
  in.validate();

  CsvTable table({{"bound_name", "string"},
                  {"value", "real"},
                  {"guard_satisfied", "integer"},
                  {"violation", "string"}});
  json rows = json::array();
  bool violated = false;
  auto add = [&](const std::string& name, auto compute) {
    double value = NAN;
    std::string violation;
    try {
      value = static_cast<double>(compute());
    } catch (const Error& e) {
      violation = e.what();
      violated = true;
    }
    std::string cell = violation;
    std::replace(cell.begin(), cell.end(), ',', ';');
    table.row(name, value, violation.empty() ? 1 : 0, cell);
    json row = {{"bound_name", name},
                {"inputs", to_json(in)},
                {"guard_satisfied", violation.empty()}};
    row["value"] = violation.empty() ? json(value) : json(nullptr);
    if (!violation.empty()) row["violation"] = violation;
    rows.push_back(std::move(row));
  };
  add("seq_sparse_estimation", [&] { return bound_seq_sparse_estimation(in); });
  add("hog_sparse_estimation_min_epsilon",
      [&] { return hog_sparse_estimation_min_epsilon(in); });
  add("hog_sparse_estimation", [&] { return bound_hog_sparse_estimation(in); });
  add("hogwild_bias", [&] { return bound_hogwild_bias(in); });
  add("general_bias_estimation", [&] {
    return bound_general_bias_estimation(in, [&](double eps) {
      BoundInputs at = in;
      at.epsilon = eps;
      return seq_sparse_estimation_value(at);
    });
  });
  add("mixing_sequential", [&] { return bound_mixing(in, MixingVariant::kSequential); });
  add("mixing_hogwild", [&] { return bound_mixing(in, MixingVariant::kHogwild); });

  ExperimentResult r = finish(config, table, {{"inputs", to_json(in)}, {"rows", rows}});
  r.guard_violation = violated;
  return r;
}

ExperimentResult cmd_influence_report(const ExperimentConfig& config) {
  Params p(config.params);
  const std::string model = p.get<std::string>("model", "bias");
  const double beta = p.get<double>("beta", 0.2);
  const int degree = p.get<int>("degree", 3);
  const auto n = static_cast<std::size_t>(p.get<double>("n", 1000.0));
  const std::string path = p.get<std::string>("path", "");
  const auto cap = static_cast<std::uint64_t>(p.get<double>("cap", 1048576.0));
  p.finish();

  InfluenceReport report;
  if (model == "bias") {
    report = total_influence_exact(build_bias_example(), cap);
  } else if (model == "single_edge") {
    report = total_influence_exact(build_single_edge_ising(beta), cap);
  } else if (model == "random_ising") {
    RngStream rng(derive_seed(config.seed, 0));
    report = total_influence_exact(build_random_ising(n, degree, beta, {}, rng), cap);
  } else if (model == "ising_bound") {
    report = ising_influence_report(degree, beta, n);
  } else if (model == "file") {
    if (path.empty()) throw ConfigError("model 'file' needs a path");
    report = total_influence_exact(load_model(path), cap);
  } else {
    throw ConfigError("unknown influence model '" + model + "'");
  }

  CsvTable table({{"target", "integer"}, {"source", "integer"}, {"influence", "real"}});
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    for (const auto& [j, v] : report.rows[i]) table.row(i, j, v);
  }
  ExperimentResult r = finish(config, table, report.to_json());
  r.guard_violation = !report.dobrushin_satisfied;
  return r;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  const std::string& e = config.experiment;
  if (e == "bias") return cmd_bias(config);
  if (e == "badmix") return cmd_badmix(config);
  if (e == "tausweep") return cmd_tausweep(config);
  if (e == "throughput") return cmd_throughput(config);
  if (e == "bounds-table") return cmd_bounds_table(config);
  if (e == "influence-report") return cmd_influence_report(config);
  throw ConfigError("unknown experiment '" + e + "'");
}

void write_outputs(const ExperimentResult& result, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::ofstream csv(out_dir / (result.name + ".csv"), std::ios::binary);
  csv << result.csv;
  std::ofstream meta(out_dir / (result.name + ".meta.json"), std::ios::binary);
  meta << result.meta.dump(2) << '\n';
  if (!csv || !meta) throw Error("failed to write outputs to " + out_dir.string());
}

}  // namespace hogibbs
