#include "hogibbs/coupling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <optional>
#include <thread>

#include "hogibbs/errors.hpp"
#include "hogibbs/live_state.hpp"
#include "hogibbs/model_zoo.hpp"
#include "hogibbs/state_history.hpp"

namespace hogibbs {

namespace {

constexpr std::uint64_t kDelayStream = 0xde1a7;

int sample_unnormalized(std::span<const double> weights, double total, double u) {
  double acc = 0.0;
  const double target = u * total;
  const int last = static_cast<int>(weights.size()) - 1;
  for (int z = 0; z < last; ++z) {
    acc += weights[z];
    if (target < acc) return z;
  }
  // Skip trailing zero-weight values.
  int z = last;
  while (z > 0 && weights[z] <= 0.0) --z;
  return z;
}

}  // namespace

std::pair<int, int> maximal_coupling_sample(std::span<const double> p,
                                            std::span<const double> q, RngStream& rng) {
  if (p.size() != q.size()) throw DimensionMismatch("coupled vectors differ in length");
  const std::size_t d = p.size();
  std::vector<double> overlap(d), rp(d), rq(d);
  double w = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    overlap[k] = std::min(p[k], q[k]);
    rp[k] = p[k] - overlap[k];
    rq[k] = q[k] - overlap[k];
    w += overlap[k];
  }
  const double residual = std::max(0.0, 1.0 - w);
  if (residual <= 0.0 || rng.uniform() < w) {
    const int z = sample_unnormalized(overlap, w, rng.uniform());
    return {z, z};
  }
  double sp = 0.0, sq = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    sp += rp[k];
    sq += rq[k];
  }
  const int a = sample_unnormalized(rp, sp, rng.uniform());
  const int b = sample_unnormalized(rq, sq, rng.uniform());
  return {a, b};
}

void require_monotone_model(const FactorGraph& graph) {
  for (std::size_t i = 0; i < graph.num_variables(); ++i) {
    if (graph.domain_size(static_cast<VarId>(i)) != 2) {
      throw NonFerromagnetic("variable " + std::to_string(i) + " is not binary");
    }
  }
  for (const Factor& f : graph.factors()) {
    if (f.scope.size() > 2) {
      throw NonFerromagnetic("factor with scope " + std::to_string(f.scope.size()) +
                             " cannot be certified monotone");
    }
    if (f.scope.size() < 2) continue;
    const int both_off[2] = {0, 0}, both_on[2] = {1, 1}, first_on[2] = {1, 0},
              second_on[2] = {0, 1};
    const double interaction = f.energy(both_on) + f.energy(both_off) -
                               f.energy(first_on) - f.energy(second_on);
    if (interaction < 0.0) {
      throw NonFerromagnetic("pairwise factor with negative coupling");
    }
  }
}

namespace {

// One chain of the coupled pair: current state, history and a patchable view.
struct CoupledChain {
  LiveState live;
  StateHistory history;
  std::vector<int> view;

  CoupledChain(const FactorGraph& g, const State& init, int support)
      : live(g, init), history(init, support), view(init.values) {}

  // P(value 1) for variable i reading blanket values delayed by `delays`.
  double prob_one(const FactorGraph& g, VarId i, std::span<const VarId> blanket,
                  std::span<const int> delays, ConditionalWorkspace& ws,
                  std::span<double> probs) {
    bool stale = false;
    for (std::size_t k = 0; k < blanket.size(); ++k) {
      if (delays[k] == 0) continue;
      const int v = history.read(blanket[k], delays[k]);
      if (v != view[blanket[k]]) {
        view[blanket[k]] = v;
        stale = true;
      }
    }
    if (!stale) {
      live.conditional(i, probs);
      return probs[1];
    }
    conditional_into(g, view, i, ws, probs);
    for (VarId j : blanket) view[j] = live[j];
    return probs[1];
  }

  void write(VarId i, int value) {
    live.set(i, value);
    history.write(i, value);
    view[i] = value;
  }
};

}  // namespace

CouplingRun run_monotone_coupling_ising(const FactorGraph& graph,
                                        const DelayModel& delay_model, RngStream rng,
                                        const CouplingOptions& options) {
  require_monotone_model(graph);
  if (!delay_model.is_iid()) {
    throw ConfigError("monotone coupling needs an i.i.d. delay model");
  }
  const std::size_t n = graph.num_variables();
  CouplingRun run;
  run.seed = rng.seed();
  run.delay_model = to_string(delay_model.kind());
  if (n == 0) return run;

  const int window = delay_model.support_max();
  RngStream delay_rng = rng.fork(kDelayStream);
  CoupledChain top(graph, State(n, 1), window);
  CoupledChain bottom(graph, State(n, 0), window);
  ConditionalWorkspace ws(graph);
  std::vector<int> delays(graph.max_blanket_size());
  double probs[2];
  std::uint64_t disagree = n;
  std::uint64_t agree_since = 0;
  bool agreeing = false;

  auto step = [&](std::uint64_t t) {
    const auto i = static_cast<VarId>(rng.index(n));
    const double r = rng.uniform();
    const auto blanket = graph.markov_blanket(i);
    for (std::size_t k = 0; k < blanket.size(); ++k) {
      int d = window > 0 ? delay_model.sample(delay_rng) : 0;
      delays[k] = static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(d), t));
    }
    const std::span<const int> ds(delays.data(), blanket.size());
    const double px = top.prob_one(graph, i, blanket, ds, ws, probs);
    const double py = bottom.prob_one(graph, i, blanket, ds, ws, probs);
    const int nx = r < px ? 1 : 0;
    const int ny = r < py ? 1 : 0;
    if (options.verify_order) {
      ++run.order_checks;
      if (ny > nx) {
        throw std::logic_error("monotone coupling violated the order Y <= X at variable " +
                               std::to_string(i));
      }
    }
    const bool was_diff = top.live[i] != bottom.live[i];
    top.write(i, nx);
    bottom.write(i, ny);
    const bool now_diff = nx != ny;
    if (was_diff && !now_diff) --disagree;
    if (!was_diff && now_diff) ++disagree;
  };

  std::uint64_t t = 0;
  for (;;) {
    if (t >= options.step_cap) {
      run.coupling_time = options.step_cap;
      run.censored = true;
      return run;
    }
    step(t);
    ++t;
    if (disagree == 0) {
      if (!agreeing) {
        agreeing = true;
        agree_since = t;
      }
      if (t - agree_since >= static_cast<std::uint64_t>(window)) break;
    } else {
      agreeing = false;
    }
  }
  run.coupling_time = agree_since;
  for (std::uint64_t extra = 0; extra < options.continue_steps; ++extra) {
    step(t++);
    if (disagree != 0) run.stayed_coupled = false;
  }
  return run;
}

MixingEstimate estimate_mixing_time(std::vector<std::uint64_t> times, double epsilon) {
  if (times.size() < 100) {
    throw InsufficientTrials(std::to_string(times.size()) + " runs (need >= 100)");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
  std::sort(times.begin(), times.end());
  const auto m = static_cast<std::uint64_t>(times.size());
  const double dm = static_cast<double>(m);
  // Need m - k <= epsilon m, where k runs lie at or below the answer.
  auto rank = static_cast<std::uint64_t>(std::ceil(dm * (1.0 - epsilon) - 1e-9));
  rank = std::clamp<std::uint64_t>(rank, 1, m);
  MixingEstimate est;
  est.epsilon = epsilon;
  est.trials = m;
  est.t_hat = times[rank - 1];
  const double q = 1.0 - epsilon;
  const double half = 1.96 * std::sqrt(dm * q * (1.0 - q));
  const auto lo = static_cast<std::int64_t>(std::floor(dm * q - half));
  const auto hi = static_cast<std::int64_t>(std::ceil(dm * q + half)) + 1;
  est.band_lo = times[static_cast<std::size_t>(std::clamp<std::int64_t>(lo, 1, m) - 1)];
  est.band_hi = times[static_cast<std::size_t>(std::clamp<std::int64_t>(hi, 1, m) - 1)];
  return est;
}

MixingEstimate estimate_mixing_time(std::span<const CouplingRun> runs, double epsilon) {
  std::vector<std::uint64_t> times;
  times.reserve(runs.size());
  std::uint64_t censored = 0;
  for (const CouplingRun& r : runs) {
    times.push_back(r.coupling_time);
    censored += r.censored ? 1 : 0;
  }
  MixingEstimate est = estimate_mixing_time(std::move(times), epsilon);
  est.censored = censored;
  return est;
}

std::vector<CouplingRun> run_coupling_trials(const FactorGraph& graph,
                                             const DelayModel& delay_model,
                                             std::uint64_t trials,
                                             std::uint64_t master_seed, int threads,
                                             const CouplingOptions& options) {
  require_monotone_model(graph);
  std::vector<CouplingRun> runs(trials);
  std::atomic<std::uint64_t> next{0};
  auto body = [&] {
    for (;;) {
      const std::uint64_t k = next.fetch_add(1);
      if (k >= trials) break;
      runs[k] = run_monotone_coupling_ising(graph, delay_model,
                                            RngStream(derive_seed(master_seed, k), 0),
                                            options);
      runs[k].trial = k;
    }
  };
  const int workers = std::max(1, threads);
  if (workers == 1) {
    body();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  }
  return runs;
}

std::vector<TauSweepRow> tau_sweep(const FactorGraph& graph, const TauSweepConfig& config) {
  if (config.tau_star_grid.empty()) throw ConfigError("tau* grid is empty");
  const std::size_t n = graph.num_variables();
  CouplingOptions options;
  options.step_cap = config.step_cap;
  options.verify_order = false;

  auto measure = [&](double tau_star, double& mean_delay) {
    const MaxEntDelaySpec spec = build_maxent_delay(config.support_max, tau_star, n);
    mean_delay = spec.reported_tau;
    const auto runs = run_coupling_trials(graph, spec.delay_model(), config.trials,
                                          config.seed, config.threads, options);
    return estimate_mixing_time(runs, config.epsilon);
  };

  std::vector<TauSweepRow> rows;
  std::optional<MixingEstimate> baseline;
  for (double tau_star : config.tau_star_grid) {
    TauSweepRow row;
    row.tau_star = tau_star;
    row.estimate = measure(tau_star, row.tau);
    if (tau_star == 0.0 && !baseline) baseline = row.estimate;
    rows.push_back(row);
  }
  if (!baseline) {
    double unused = 0.0;
    baseline = measure(0.0, unused);
  }
  const double base = static_cast<double>(baseline->t_hat);
  for (TauSweepRow& row : rows) {
    row.theory_prediction =
        base * (1.0 + config.alpha * row.tau_star / static_cast<double>(n));
  }
  return rows;
}

}  // namespace hogibbs
