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

#ifndef MNLKB_POLICY_HPP_
#define MNLKB_POLICY_HPP_

// Epoch-based exploration/exploitation policy and its baselines.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mnlkb/estimation.hpp"
#include "mnlkb/mnl_model.hpp"
#include "mnlkb/planner.hpp"

namespace mnlkb {

enum class OmegaMode { kPaper, kClamped, kManual };

struct PolicyConfig {
  // Target approximation level; absent means 1 / T.
  std::optional<double> epsilon_target;
  OracleMode oracle_mode = OracleMode::kExact;
  // Precision of the DP oracle. The literal min(0.05, eps / (16 T)) is far
  // below anything the guess grids can hold, so the default is 0.05.
  double eps_oracle = 0.05;
  OmegaMode omega_mode = OmegaMode::kClamped;
  double omega_manual = 0.0;
  double omega_cap = 0.5;
  double c_const = kDefaultAnalysisConstant;
  std::uint64_t seed = 0;

  // Test hooks. `count_multiplier` scales the purchase counts fed to the
  // estimator (a deliberately corrupted estimator); `oracle_bounds` plans
  // with lcb = ucb = v throughout.
  std::int64_t count_multiplier = 1;
  bool oracle_bounds = false;

  // Keep per-period records; harness runs at scale switch this off.
  bool record_periods = true;

  void validate() const;
};

struct OmegaChoice {
  double value = 0.0;
  double raw = 0.0;
  bool clamped = false;
};

// Applies omega_mode; throws ConfigError in paper mode when raw >= 1.
OmegaChoice resolve_omega(const Instance& inst, const PolicyConfig& cfg);

struct PeriodRecord {
  std::int64_t t = 0;
  std::int64_t epoch = 0;
  Assortment assortment;
  int choice = kNoPurchase;
  double revenue = 0.0;
  double expected_revenue = 0.0;
};

struct EpochRecord {
  std::int64_t epoch = 0;
  std::int64_t start = 0;  // first period of the epoch
  EpochOutcome outcome;
  bool complete = false;  // ended with a no-purchase
};

enum class StopCause { kHorizon, kStockout };

struct Trace {
  std::vector<PeriodRecord> periods;
  std::vector<EpochRecord> epochs;
  double total_revenue = 0.0;
  double total_expected_revenue = 0.0;
  std::int64_t stop_time = 0;
  StopCause stop_cause = StopCause::kHorizon;
  int stockout_product = -1;
  std::vector<std::int64_t> consumption;

  // Pairs (i, epoch) with v_i inside the bounds used to plan that epoch.
  std::int64_t coverage_hits = 0;
  std::int64_t coverage_total = 0;

  OmegaChoice omega;
  int plans_solved = 0;
};

// Throws FeasibilityError if any product was sold beyond its inventory.
void check_feasibility(const Instance& inst, const Trace& trace);

Assortment sample_assortment(const SparseDistribution& dist, Rng& rng);

Trace run_ucb_knapsack(const Instance& inst, const PolicyConfig& cfg, Rng& rng);

// Plays argmax_S R_ucb(S) every epoch, ignoring the capacity rows.
Trace run_unconstrained_ucb(const Instance& inst, const PolicyConfig& cfg,
                            Rng& rng);

// Samples every period from the benchmark distribution.
Trace run_oracle_static(const Instance& inst, const SparseDistribution& dist,
                        Rng& rng, bool record_periods = true);
Trace run_oracle_static(const Instance& inst, Rng& rng);

std::string to_string(StopCause cause);
std::string to_string(OmegaMode mode);
OmegaMode parse_omega_mode(const std::string& text);
std::string to_string(OracleMode mode);
OracleMode parse_oracle_mode(const std::string& text);

}  // namespace mnlkb

#endif  // MNLKB_POLICY_HPP_
