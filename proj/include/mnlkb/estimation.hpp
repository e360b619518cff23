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

#ifndef MNLKB_ESTIMATION_HPP_
#define MNLKB_ESTIMATION_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "mnlkb/mnl_model.hpp"

namespace mnlkb {

// What one completed epoch revealed: the offered set, how often each offered
// product was bought, and the number of periods including the terminating
// no-purchase.
struct EpochOutcome {
  Assortment assortment;
  std::vector<std::int64_t> purchase_counts;  // aligned with assortment.items()
  std::int64_t length = 1;

  // Throws std::invalid_argument if sum(counts) != length - 1 or the counts
  // are misaligned.
  void validate() const;
};

// Per-product sampling statistics and confidence bounds.
struct EstimatorState {
  std::int64_t epoch_index = 0;  // completed epochs
  double v_max = 1.0;
  std::vector<std::int64_t> offered_epochs;
  std::vector<std::int64_t> count_sum;
  std::vector<std::optional<double>> mean;  // absent until first offered
  Eigen::VectorXd ucb;
  Eigen::VectorXd lcb;

  int n_products() const { return static_cast<int>(offered_epochs.size()); }
};

EstimatorState init_state(const Instance& inst);

// sqrt(mean * A) + A with A = 48 log(sqrt(n) ell^4 + 1) / t_i.
double confidence_radius(double mean, std::int64_t t_i, std::int64_t ell,
                         int n);

// Folds a completed epoch into the statistics of the products it offered and
// refreshes their bounds; bounds of other products are untouched.
void record_epoch(EstimatorState& state, const EpochOutcome& outcome);

}  // namespace mnlkb

#endif  // MNLKB_ESTIMATION_HPP_
