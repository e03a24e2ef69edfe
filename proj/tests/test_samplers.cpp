#include <cmath>
#include <random>
#include <sstream>
#include <thread>

#include <gtest/gtest.h>

#include "hogibbs/errors.hpp"
#include "hogibbs/markov_oracle.hpp"
#include "hogibbs/model_zoo.hpp"
#include "hogibbs/samplers.hpp"
#include "hogibbs/state_history.hpp"
#include "oracles.hpp"

using namespace hogibbs;

namespace {

FactorGraph independent_graph(int n) {
  std::vector<VariableSpec> vars;
  for (int i = 0; i < n; ++i) vars.push_back({static_cast<VarId>(i), 2});
  return FactorGraph(vars, {});
}

SampleSink histogram(const FactorGraph& g, std::uint64_t burn_in = 1000) {
  return SampleSink::joint_histogram(g.domain_sizes(), burn_in);
}

}  // namespace

TEST(RngStream, SameSeedAndStreamReproduce) {
  RngStream a(42, 3), b(42, 3), c(42, 4);
  bool differs = false;
  for (int k = 0; k < 100; ++k) {
    const double x = a.uniform();
    EXPECT_EQ(x, b.uniform());
    differs = differs || x != c.uniform();
  }
  EXPECT_TRUE(differs);
}

TEST(Sequential, RunsExactStepCountAndRespectsBurnIn) {
  const auto g = build_bias_example();
  const auto run = run_sequential(g, 5000, State(2, 1), RngStream(1), histogram(g, 1000));
  EXPECT_EQ(run.steps, 5000u);
  EXPECT_EQ(run.sink.joint().total(), 4000u);
  EXPECT_THROW(run_sequential(g, 0, State(2, 1), RngStream(1), histogram(g)), ConfigError);
}

TEST(Sequential, DeterministicGivenSeed) {
  const auto g = build_single_edge_ising(0.3);
  const auto a = run_sequential(g, 20000, State(2, 0), RngStream(9), histogram(g));
  const auto b = run_sequential(g, 20000, State(2, 0), RngStream(9), histogram(g));
  EXPECT_EQ(a.sink.joint().counts, b.sink.joint().counts);
  EXPECT_EQ(a.final_state, b.final_state);
}

TEST(Sequential, SingleFreeVariableIsFair) {
  const auto g = independent_graph(1);
  const std::uint64_t steps = 100000;
  const auto run = run_sequential(g, steps, State(1, 0), RngStream(4), histogram(g, 0));
  const double p1 = static_cast<double>(run.sink.joint().counts[1]) / steps;
  EXPECT_NEAR(p1, 0.5, 3 * std::sqrt(0.25 / steps));
}

TEST(Sequential, SingleEdgeAgreeMass) {
  const auto g = build_single_edge_ising(0.2);
  const auto run = run_sequential(g, 1000000, State(2, 0), RngStream(5), histogram(g));
  const auto stats = cell_statistics(gibbs_transition_matrix(g));
  const auto& counts = run.sink.joint().counts;
  const std::uint64_t total = run.sink.joint().total();
  const double agree = std::exp(0.2) / (2 * std::exp(0.2) + 2 * std::exp(-0.2));
  EXPECT_NEAR(static_cast<double>(counts[3]) / total, agree, 3 * stats.sigma(3, total));
}

TEST(Sequential, BiasExampleMatchesPi) {
  const auto g = build_bias_example();
  const auto run = run_sequential(g, 1000000, State(2, 1), RngStream(6), histogram(g));
  const auto stats = cell_statistics(gibbs_transition_matrix(g));
  const std::uint64_t total = run.sink.joint().total();
  for (int s = 1; s < 4; ++s) {
    EXPECT_NEAR(static_cast<double>(run.sink.joint().counts[s]) / total, 1.0 / 3.0,
                3 * stats.sigma(s, total));
  }
  EXPECT_EQ(run.sink.joint().counts[0], 0u);
}

TEST(Sequential, PassesChiSquareOnRandomModels) {
  std::mt19937_64 rng(77);
  for (int m = 0; m < 5; ++m) {
    const auto g = oracle::random_small_model(rng);
    const auto run =
        run_sequential(g, 200000, State(g.num_variables(), 0), RngStream(m), histogram(g));
    const auto chi = markov_chi_square(run.sink.joint().counts,
                                       cell_statistics(gibbs_transition_matrix(g)));
    EXPECT_GT(chi.p_value, 0.001) << "model " << m;
  }
}

TEST(HogwildSimulated, ZeroDelayIsBitIdenticalToSequential) {
  const auto g = build_bias_example();
  const auto seq = run_sequential(g, 100000, State(2, 1), RngStream(3, 2), histogram(g));
  const auto hog = run_hogwild_simulated(g, 100000, State(2, 1), DelayModel::zero(2),
                                         RngStream(3, 2), histogram(g));
  EXPECT_EQ(seq.sink.joint().counts, hog.sink.joint().counts);
  EXPECT_EQ(seq.final_state, hog.final_state);
  const auto hog0 = run_hogwild_simulated(g, 100000, State(2, 1), DelayModel::constant(0, 2),
                                          RngStream(3, 2), histogram(g));
  EXPECT_EQ(seq.sink.joint().counts, hog0.sink.joint().counts);
}

TEST(HogwildSimulated, DelaysDoNotMatterWithoutInteractions) {
  const auto g = independent_graph(3);
  const auto a = run_hogwild_simulated(g, 50000, State(3, 0), DelayModel::constant(0, 3),
                                       RngStream(8), histogram(g));
  const auto b = run_hogwild_simulated(g, 50000, State(3, 0), DelayModel::constant(4, 3),
                                       RngStream(8), histogram(g));
  EXPECT_EQ(a.sink.joint().counts, b.sink.joint().counts);
}

TEST(HogwildSimulated, RealizedDelaysAreClampedAndBounded) {
  const auto g = build_single_edge_ising(0.4);
  const auto early = run_hogwild_simulated(g, 3, State(2, 0), DelayModel::constant(50, 2),
                                           RngStream(1), histogram(g, 0));
  EXPECT_LE(early.max_realized_delay, 2);
  const auto longer = run_hogwild_simulated(g, 10000, State(2, 0),
                                            DelayModel::iid_bernoulli(0.3, 7, 2),
                                            RngStream(1), histogram(g, 0));
  EXPECT_LE(longer.max_realized_delay, 7);
  EXPECT_EQ(longer.max_realized_delay, 7);
}

TEST(HogwildSimulated, BiasExampleProducesForbiddenState) {
  const auto g = build_bias_example();
  const auto run = run_hogwild_simulated(g, 100000, State(2, 1),
                                         DelayModel::iid_bernoulli(0.5, 1, 2), RngStream(2),
                                         histogram(g));
  EXPECT_GT(run.sink.joint().counts[0], 0u);
}

TEST(HogwildSimulated, TwoThreadPatternUpdatesRacingPairsFromOneSnapshot) {
  // From (1,1) both racers see a partner at 1 and flip with probability 1/2
  // each, so (0,0) appears at rate about 1/4 per pair.
  const auto g = build_bias_example();
  const auto pattern = DelayModel::two_thread_pattern({0, 1}, 2);
  const auto run =
      run_hogwild_simulated(g, 200000, State(2, 1), pattern, RngStream(12), histogram(g));
  EXPECT_EQ(run.steps, 200000u);
  EXPECT_EQ(run.max_realized_delay, 1);
  const double mass00 =
      static_cast<double>(run.sink.joint().counts[0]) / run.sink.joint().total();
  EXPECT_GT(mass00, 0.03);
  EXPECT_THROW(DelayModel::two_thread_pattern({0}, 2), ConfigError);
}

TEST(StateHistory, AgreesWithFullLog) {
  std::mt19937_64 rng(99);
  const int n = 7, window = 12;
  std::vector<std::vector<int>> log{std::vector<int>(n, 0)};
  StateHistory h(State(n, 0), window);
  for (int t = 0; t < 100000; ++t) {
    const int i = static_cast<int>(rng() % n);
    const int v = static_cast<int>(rng() % 3);
    h.write(static_cast<VarId>(i), v);
    log.push_back(log.back());
    log.back()[i] = v;
    const auto now = static_cast<int>(h.t());
    for (int probe = 0; probe < 3; ++probe) {
      const int j = static_cast<int>(rng() % n);
      const int d = static_cast<int>(rng() % (std::min(now, window) + 1));
      ASSERT_EQ(h.read(static_cast<VarId>(j), d), log[now - d][j]) << "t=" << now;
    }
  }
}

TEST(DelayModel, MomentsRespectReportedBounds) {
  const std::size_t n = 1000;
  const std::vector<DelayModel> models{
      DelayModel::zero(n), DelayModel::constant(3, n), DelayModel::iid_bernoulli(0.5, 1, n),
      build_maxent_delay(200, 100.0, n).delay_model()};
  for (const auto& m : models) {
    RngStream rng(17);
    const int draws = 1000000;
    double sum = 0, sum2 = 0, esum = 0, esum2 = 0;
    for (int k = 0; k < draws; ++k) {
      const int d = m.sample(rng);
      ASSERT_GE(d, 0);
      ASSERT_LE(d, m.support_max());
      sum += d;
      sum2 += static_cast<double>(d) * d;
      const double e = std::exp(static_cast<double>(d) / n);
      esum += e;
      esum2 += e * e;
    }
    const double mean = sum / draws;
    const double sd = std::sqrt(std::max(0.0, sum2 / draws - mean * mean) / draws);
    EXPECT_LE(mean, m.reported_tau() + 3 * sd + 1e-12);
    const double emean = esum / draws;
    const double esd = std::sqrt(std::max(0.0, esum2 / draws - emean * emean) / draws);
    EXPECT_LE(emean, 1 + m.reported_tau_star() / n + 3 * esd + 1e-12);
  }
}

TEST(Parallel, RejectsZeroWorkers) {
  const auto g = build_bias_example();
  EXPECT_THROW(run_hogwild_parallel(g, 10, State(2, 1), 0, RngStream(1), histogram(g)),
               ConfigError);
  EXPECT_THROW(run_multimodel(g, 10, State(2, 1), 0, RngStream(1), histogram(g)),
               ConfigError);
}

TEST(Parallel, OneWorkerMatchesPi) {
  const auto g = build_bias_example();
  const auto run = run_hogwild_parallel(g, 1000000, State(2, 1), 1, RngStream(21), histogram(g));
  EXPECT_EQ(run.sink.joint().total(), 1000000u - 1000u);
  EXPECT_GT(run.updates_per_second, 0.0);
  const auto chi =
      markov_chi_square(run.sink.joint().counts, cell_statistics(gibbs_transition_matrix(g)));
  EXPECT_GT(chi.p_value, 0.01);
}

TEST(Parallel, TwoWorkersRaceOnBiasExample) {
  if (std::thread::hardware_concurrency() < 2) {
    GTEST_SKIP() << "needs at least 2 hardware threads for real races";
  }
  const auto g = build_bias_example();
  const auto run = run_hogwild_parallel(g, 1000000, State(2, 1), 2, RngStream(22), histogram(g));
  EXPECT_GT(run.sink.joint().counts[0], 0u);
}

TEST(Multimodel, OneWorkerIsSequential) {
  const auto g = build_single_edge_ising(0.5);
  const auto seq = run_sequential(g, 30000, State(2, 0), RngStream(7, 1), histogram(g));
  const auto multi = run_multimodel(g, 30000, State(2, 0), 1, RngStream(7, 1), histogram(g));
  EXPECT_EQ(seq.sink.joint().counts, multi.sink.joint().counts);
  EXPECT_EQ(seq.final_state, multi.final_state);
}

TEST(Multimodel, FourWorkersMatchPiAndScaleMemory) {
  const auto g = build_bias_example();
  const auto run = run_multimodel(g, 1000000, State(2, 1), 4, RngStream(23), histogram(g));
  const auto stats = cell_statistics(gibbs_transition_matrix(g));
  const std::uint64_t total = run.sink.joint().total();
  EXPECT_EQ(total, 1000000u - 4 * 1000u);
  for (int s = 1; s < 4; ++s) {
    EXPECT_NEAR(static_cast<double>(run.sink.joint().counts[s]) / total, 1.0 / 3.0,
                3 * stats.sigma(s, total));
  }
  EXPECT_EQ(run.state_bytes, 4 * 2 * sizeof(int));
  const auto one = run_multimodel(g, 1000, State(2, 1), 1, RngStream(23), histogram(g, 0));
  EXPECT_EQ(one.state_bytes, 2 * sizeof(int));
}

TEST(SampleSink, CountsAndCsv) {
  auto sink = SampleSink::joint_histogram({2, 2}, 2);
  const std::vector<int> a{0, 1}, b{1, 1};
  sink.record(0, a);
  sink.record(1, a);
  sink.record(2, a);
  sink.record(3, b);
  EXPECT_EQ(sink.joint().total(), 2u);
  std::ostringstream out;
  sink.write_csv(out);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "state_or_event,count,probability");
  EXPECT_NE(out.str().find("0:1,1,0.5"), std::string::npos);
  auto other = sink.empty_copy();
  other.record(5, b);
  sink.merge(other);
  EXPECT_EQ(sink.joint().counts[3], 2u);
}

TEST(SampleSink, MarginalsEventsAndTrace) {
  const std::vector<VarId> first{0};
  auto marg = SampleSink::marginals({2, 3}, {first}, 0);
  auto events = SampleSink::events(
      2, {{"sum2", [](std::span<const int> s) { return s[0] + s[1] == 2; }, {0, 1}}}, 0);
  auto trace = SampleSink::thinned_trace(2, 3, 1);
  const std::vector<std::vector<int>> states{{0, 2}, {1, 1}, {1, 2}, {0, 0}, {1, 0}};
  for (std::size_t t = 0; t < states.size(); ++t) {
    marg.record(t, states[t]);
    events.record(t, states[t]);
    trace.record(t, states[t]);
  }
  EXPECT_EQ(marg.marginal(0).counts, (std::vector<std::uint64_t>{2, 3}));
  EXPECT_EQ(events.event_count(0), 2u);
  ASSERT_EQ(trace.trace().size(), 2u);
  EXPECT_EQ(trace.trace()[1], State(std::vector<int>{1, 0}));
}
