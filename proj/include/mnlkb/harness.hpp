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

#ifndef MNLKB_HARNESS_HPP_
#define MNLKB_HARNESS_HPP_

// Replicated experiments, regret against the fluid benchmark, and the
// statistical diagnostics for the estimator.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mnlkb/estimation.hpp"
#include "mnlkb/mnl_model.hpp"
#include "mnlkb/policy.hpp"

namespace mnlkb {

// Draws instances. Revenues and utilities are either fixed vectors or
// uniform on a range; inventories are either fixed or
// q_i = max(1, floor(inventory_fraction * T / N)).
struct InstanceGenerator {
  int n_products = 5;
  int cardinality_cap = 2;
  int horizon = 1000;
  double v_max = 1.0;
  double inventory_fraction = 1.0;
  std::optional<std::vector<std::int64_t>> inventories;
  std::optional<Eigen::VectorXd> revenues;
  std::pair<double, double> revenue_range{0.1, 1.0};
  std::optional<Eigen::VectorXd> utilities;
  std::pair<double, double> utility_range{0.0, 1.0};

  void validate() const;
  // Revenue and utility draws depend on the seed only, so every horizon of a
  // scaling study sees the same market.
  Instance sample(int horizon, std::uint64_t seed) const;
};

enum class PolicyKind { kUcbKnapsack, kUcbUnconstrained, kOracleStatic };

std::string to_string(PolicyKind kind);
PolicyKind parse_policy_kind(const std::string& text);

struct PolicyEntry {
  std::string label;
  PolicyKind kind = PolicyKind::kUcbKnapsack;
  PolicyConfig config;
};

struct DiagnosticsToggles {
  bool unbiasedness = false;
  bool epoch_length = false;
  bool coverage = false;
  bool zero_utility = false;
  std::int64_t epochs = 10000;
  int coverage_replications = 5;
  // 0-based products offered in the fixed-assortment checks; absent means
  // the first K products.
  std::optional<Assortment> assortment;

  bool any() const {
    return unbiasedness || epoch_length || coverage || zero_utility;
  }
};

struct ExperimentConfig {
  std::optional<Instance> instance;
  std::optional<InstanceGenerator> generator;
  int replications = 1;
  std::vector<PolicyEntry> policies;
  std::uint64_t seed = 0;
  std::vector<int> horizons;  // regret-scaling study when non-empty
  DiagnosticsToggles diagnostics;
  bool write_epochs = false;

  void validate() const;
  Instance base_instance() const;
  // Explicit instances keep their inventories; generated ones rescale.
  Instance instance_for_horizon(int horizon) const;
};

struct RunRow {
  int replication = 0;
  std::string policy;
  double revenue = 0.0;
  double expected_revenue = 0.0;
  std::int64_t stop_time = 0;
  double regret = 0.0;  // OPT - realized revenue
};

struct EpochRow {
  int replication = 0;
  std::string policy;
  EpochRecord record;
};

struct AggregateStats {
  std::string policy;
  int replications = 0;
  double mean_revenue = 0.0;
  double se_revenue = 0.0;
  double mean_expected_revenue = 0.0;
  double se_expected_revenue = 0.0;
  double mean_regret = 0.0;           // from realized revenue
  double mean_regret_expected = 0.0;  // from sum_t R(S_t)
  double mean_stop_time = 0.0;
  int feasibility_violations = 0;
  std::vector<double> mean_consumption;
  std::int64_t coverage_hits = 0;
  std::int64_t coverage_total = 0;
  int omega_clamped_runs = 0;
};

struct ExperimentResult {
  Instance instance;
  double opt_lp_value = 0.0;
  double opt = 0.0;
  std::vector<AggregateStats> stats;  // one per policy entry
  std::vector<RunRow> runs;           // policy-major, replication order
  std::vector<EpochRow> epochs;       // only when write_epochs
};

// Seed of replication `index`: splitmix64 of (seed + index).
std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t index);

// Worker count: MNLKB_THREADS if set and positive, else the hardware count.
int worker_count();

ExperimentResult run_experiment(const ExperimentConfig& cfg);
// Same, on a given instance (used per horizon by the scaling study).
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const Instance& inst);

AggregateStats aggregate(const std::string& policy, const Instance& inst,
                         double opt, const std::vector<Trace>& traces);

struct ScalingRow {
  int horizon = 0;
  double opt = 0.0;
  double mean_regret = 0.0;  // expected-revenue estimator
  double se_regret = 0.0;
  double mean_revenue = 0.0;
};

struct ScalingResult {
  std::string policy;
  std::vector<ScalingRow> rows;
  double slope = 0.0;  // NaN unless two or more positive means
};

// Runs the first policy entry (or the default knapsack policy) at each
// horizon.
ScalingResult regret_scaling(const ExperimentConfig& cfg,
                             const std::vector<int>& horizons);

// Least-squares slope of log(y) on log(x) over positive pairs.
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

// One epoch of a fixed assortment, run until the no-purchase.
EpochOutcome simulate_epoch(const Instance& inst, const Assortment& s,
                            Rng& rng);

struct DiagnosticCheck {
  std::string name;
  bool passed = false;
  double statistic = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::string detail;
};

struct DiagnosticReport {
  std::vector<DiagnosticCheck> checks;
  bool all_passed() const;
};

DiagnosticReport diagnostics(const ExperimentConfig& cfg);

}  // namespace mnlkb

#endif  // MNLKB_HARNESS_HPP_
