// Copyright 2026 The mnlkb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mnlkb/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>

#include <gtest/gtest.h>

#include "mnlkb/io.hpp"
#include "test_util.hpp"

namespace mnlkb {
namespace {

using testing::make_instance;
using testing::vec;

PolicyEntry entry(PolicyKind kind) {
  PolicyEntry e;
  e.kind = kind;
  e.label = to_string(kind);
  return e;
}

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.instance = make_instance(vec({1.0, 0.6, 0.8}), vec({0.3, 0.7, 0.5}),
                               {30, 30, 30}, 2, 150);
  cfg.replications = 6;
  cfg.seed = 17;
  cfg.policies = {entry(PolicyKind::kUcbKnapsack),
                  entry(PolicyKind::kUcbUnconstrained),
                  entry(PolicyKind::kOracleStatic)};
  return cfg;
}

class ThreadEnv {
 public:
  explicit ThreadEnv(const char* value) { setenv("MNLKB_THREADS", value, 1); }
  ~ThreadEnv() { unsetenv("MNLKB_THREADS"); }
};

TEST(ReplicationSeedTest, DistinctAndStable) {
  EXPECT_EQ(replication_seed(5, 3), replication_seed(5, 3));
  EXPECT_NE(replication_seed(5, 3), replication_seed(5, 4));
  EXPECT_NE(replication_seed(5, 3), replication_seed(6, 3));
}

TEST(WorkerCountTest, HonoursTheEnvironment) {
  ThreadEnv env("3");
  EXPECT_EQ(worker_count(), 3);
}

TEST(GeneratorTest, SameSeedSameMarketAcrossHorizons) {
  InstanceGenerator g;
  g.n_products = 4;
  g.cardinality_cap = 2;
  g.horizon = 100;
  g.inventory_fraction = 1.0;
  const auto a = g.sample(100, 9);
  const auto b = g.sample(400, 9);
  EXPECT_EQ(a.utilities, b.utilities);
  EXPECT_EQ(a.revenues, b.revenues);
  EXPECT_EQ(a.inventories, std::vector<std::int64_t>(4, 25));
  EXPECT_EQ(b.inventories, std::vector<std::int64_t>(4, 100));
  EXPECT_NE(g.sample(100, 10).utilities, a.utilities);
}

TEST(GeneratorTest, FixedVectorsOverrideSamplers) {
  InstanceGenerator g;
  g.n_products = 2;
  g.cardinality_cap = 1;
  g.revenues = vec({0.9, 0.5});
  g.utilities = vec({0.2, 0.4});
  g.inventories = std::vector<std::int64_t>{3, 7};
  const auto inst = g.sample(50, 1);
  EXPECT_EQ(inst.revenues, vec({0.9, 0.5}));
  EXPECT_EQ(inst.utilities, vec({0.2, 0.4}));
  EXPECT_EQ(inst.inventories, (std::vector<std::int64_t>{3, 7}));
}

TEST(RunExperimentTest, ZeroUtilitiesHaveZeroRegret) {
  auto cfg = small_config();
  cfg.instance->utilities.setZero();
  const auto res = run_experiment(cfg);
  EXPECT_EQ(res.opt, 0.0);
  for (const auto& s : res.stats) {
    EXPECT_EQ(s.mean_revenue, 0.0);
    EXPECT_EQ(s.mean_regret, 0.0);
    EXPECT_EQ(s.feasibility_violations, 0);
  }
}

TEST(RunExperimentTest, StaticBenchmarkDoesNotBeatOpt) {
  auto cfg = small_config();
  cfg.replications = 200;
  cfg.policies = {entry(PolicyKind::kOracleStatic)};
  const auto res = run_experiment(cfg);
  const auto& s = res.stats[0];
  EXPECT_LE(s.mean_revenue, res.opt + 3.0 * s.se_revenue);
  EXPECT_LE(s.mean_expected_revenue, res.opt + 3.0 * s.se_expected_revenue);
}

TEST(RunExperimentTest, RowsAndAggregatesLineUp) {
  const auto cfg = small_config();
  const auto res = run_experiment(cfg);
  ASSERT_EQ(res.runs.size(), 18u);
  ASSERT_EQ(res.stats.size(), 3u);
  for (std::size_t p = 0; p < 3; ++p) {
    double sum = 0.0;
    for (int r = 0; r < 6; ++r) {
      const auto& row = res.runs[p * 6 + r];
      EXPECT_EQ(row.replication, r);
      EXPECT_EQ(row.policy, cfg.policies[p].label);
      EXPECT_NEAR(row.regret, res.opt - row.revenue, 1e-12);
      sum += row.revenue;
    }
    EXPECT_NEAR(res.stats[p].mean_revenue, sum / 6.0, 1e-12);
    EXPECT_EQ(res.stats[p].feasibility_violations, 0);
  }
}

TEST(RunExperimentTest, OutputIsIndependentOfThreadCount) {
  const auto cfg = small_config();
  std::string one, many;
  {
    ThreadEnv env("1");
    one = runs_csv(run_experiment(cfg));
  }
  {
    ThreadEnv env("4");
    many = runs_csv(run_experiment(cfg));
  }
  EXPECT_EQ(one, many);
  EXPECT_EQ(one, runs_csv(run_experiment(cfg)));
}

TEST(RunExperimentTest, EpochRowsOnlyWhenRequested) {
  auto cfg = small_config();
  EXPECT_TRUE(run_experiment(cfg).epochs.empty());
  cfg.write_epochs = true;
  EXPECT_FALSE(run_experiment(cfg).epochs.empty());
}

TEST(AggregateTest, InvariantUnderReplicationOrder) {
  const auto inst = make_instance(vec({1.0, 0.6}), vec({0.3, 0.7}), {20, 20}, 2, 80);
  std::vector<Trace> traces;
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    Rng rng(seed);
    traces.push_back(run_unconstrained_ucb(inst, PolicyConfig{}, rng));
  }
  const auto a = aggregate("p", inst, 30.0, traces);
  std::reverse(traces.begin(), traces.end());
  std::rotate(traces.begin(), traces.begin() + 5, traces.end());
  const auto b = aggregate("p", inst, 30.0, traces);
  EXPECT_NEAR(a.mean_revenue, b.mean_revenue, 1e-12);
  EXPECT_NEAR(a.se_revenue, b.se_revenue, 1e-12);
  EXPECT_NEAR(a.mean_stop_time, b.mean_stop_time, 1e-12);
  EXPECT_NEAR(a.mean_regret, b.mean_regret, 1e-12);
  for (int i = 0; i < 2; ++i) {
    EXPECT_NEAR(a.mean_consumption[i], b.mean_consumption[i], 1e-12);
  }
}

TEST(LogLogSlopeTest, RecoversPowerLaws) {
  EXPECT_NEAR(log_log_slope({1, 4, 16}, {1, 2, 4}), 0.5, 1e-12);
  EXPECT_NEAR(log_log_slope({2, 3, 5}, {4, 9, 25}), 2.0, 1e-12);
  EXPECT_TRUE(std::isnan(log_log_slope({2}, {3})));
  EXPECT_TRUE(std::isnan(log_log_slope({2, 3}, {-1, 0})));
}

TEST(RegretScalingTest, OneRowPerHorizon) {
  ExperimentConfig cfg;
  InstanceGenerator g;
  g.n_products = 3;
  g.cardinality_cap = 2;
  g.horizon = 100;
  cfg.generator = g;
  cfg.replications = 3;
  cfg.policies = {entry(PolicyKind::kUcbKnapsack)};
  const auto single = regret_scaling(cfg, {100});
  ASSERT_EQ(single.rows.size(), 1u);
  EXPECT_EQ(single.rows[0].horizon, 100);
  EXPECT_TRUE(std::isnan(single.slope));
  const auto two = regret_scaling(cfg, {100, 200});
  ASSERT_EQ(two.rows.size(), 2u);
  EXPECT_GT(two.rows[1].opt, two.rows[0].opt);
}

TEST(SimulateEpochTest, LengthIsGeometric) {
  const auto inst = make_instance(vec({1.0, 1.0}), vec({0.5, 1.0}), {5, 5}, 2, 10);
  Rng rng(21);
  const Assortment s({0, 1});
  const int m = 20000;
  double total = 0.0;
  for (int k = 0; k < m; ++k) {
    const auto ep = simulate_epoch(inst, s, rng);
    ep.validate();
    total += static_cast<double>(ep.length);
  }
  EXPECT_NEAR(total / m, 2.5, 4.0 * std::sqrt(1.5 * 2.5 / m));
}

ExperimentConfig diagnostics_config() {
  ExperimentConfig cfg;
  cfg.instance = make_instance(vec({1.0, 0.8, 0.6}), vec({0.5, 1.0, 0.0}),
                               {300, 300, 300}, 2, 1000);
  cfg.seed = 5;
  cfg.policies = {entry(PolicyKind::kUcbKnapsack)};
  cfg.diagnostics.unbiasedness = true;
  cfg.diagnostics.epoch_length = true;
  cfg.diagnostics.coverage = true;
  cfg.diagnostics.zero_utility = true;
  cfg.diagnostics.coverage_replications = 2;
  return cfg;
}

TEST(DiagnosticsTest, HealthyEstimatorPasses) {
  const auto report = diagnostics(diagnostics_config());
  EXPECT_TRUE(report.all_passed());
  // Two unbiasedness checks, epoch length, zero utility, coverage.
  EXPECT_EQ(report.checks.size(), 5u);
}

TEST(DiagnosticsTest, DoubledCountsAreCaught) {
  auto cfg = diagnostics_config();
  cfg.policies[0].config.count_multiplier = 2;
  const auto report = diagnostics(cfg);
  EXPECT_FALSE(report.all_passed());
  for (const auto& c : report.checks) {
    if (c.name.rfind("unbiasedness", 0) == 0) EXPECT_FALSE(c.passed);
  }
}

TEST(DiagnosticsTest, NoTogglesNoChecks) {
  auto cfg = diagnostics_config();
  cfg.diagnostics = DiagnosticsToggles{};
  const auto report = diagnostics(cfg);
  EXPECT_TRUE(report.checks.empty());
  EXPECT_TRUE(report.all_passed());
}

TEST(ExperimentConfigTest, RejectsAmbiguousInstanceSource) {
  auto cfg = small_config();
  cfg.generator = InstanceGenerator{};
  EXPECT_ANY_THROW(cfg.validate());
  cfg.generator.reset();
  cfg.instance.reset();
  EXPECT_ANY_THROW(cfg.validate());
}

}  // namespace
}  // namespace mnlkb
