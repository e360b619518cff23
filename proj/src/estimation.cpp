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

#include "mnlkb/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mnlkb {

void EpochOutcome::validate() const {
  if (static_cast<int>(purchase_counts.size()) != assortment.size()) {
    throw std::invalid_argument("purchase counts misaligned with assortment");
  }
  if (length < 1) throw std::invalid_argument("epoch length must be >= 1");
  std::int64_t total = 0;
  for (auto c : purchase_counts) {
    if (c < 0) throw std::invalid_argument("negative purchase count");
    total += c;
  }
  if (total != length - 1) {
    throw std::invalid_argument("purchase counts must sum to length - 1");
  }
}

EstimatorState init_state(const Instance& inst) {
  const int n = inst.n_products;
  EstimatorState state;
  state.v_max = inst.v_max;
  state.offered_epochs.assign(n, 0);
  state.count_sum.assign(n, 0);
  state.mean.assign(n, std::nullopt);
  state.ucb = Eigen::VectorXd::Constant(n, inst.v_max);
  state.lcb = Eigen::VectorXd::Zero(n);
  return state;
}

double confidence_radius(double mean, std::int64_t t_i, std::int64_t ell,
                         int n) {
  if (t_i < 1) throw std::invalid_argument("confidence_radius needs t_i >= 1");
  if (ell < 1) throw std::invalid_argument("confidence_radius needs ell >= 1");
  if (n < 1) throw std::invalid_argument("confidence_radius needs n >= 1");
  const double l = static_cast<double>(ell);
  const double a = 48.0 * std::log(std::sqrt(static_cast<double>(n)) *
                                       l * l * l * l +
                                   1.0) /
                   static_cast<double>(t_i);
  return std::sqrt(std::max(mean, 0.0) * a) + a;
}

void record_epoch(EstimatorState& state, const EpochOutcome& outcome) {
  outcome.validate();
  const int n = state.n_products();
  // The epoch being closed is ell = epoch_index + 1.
  const std::int64_t ell = state.epoch_index + 1;
  const auto& items = outcome.assortment.items();
  for (std::size_t k = 0; k < items.size(); ++k) {
    const int i = items[k];
    if (i >= n) throw std::invalid_argument("unknown product in epoch");
    state.offered_epochs[i] += 1;
    state.count_sum[i] += outcome.purchase_counts[k];
    const double m = static_cast<double>(state.count_sum[i]) /
                     static_cast<double>(state.offered_epochs[i]);
    state.mean[i] = m;
    const double radius = confidence_radius(m, state.offered_epochs[i], ell, n);
    state.ucb(i) = std::min(m + radius, state.v_max);
    state.lcb(i) = std::max(m - radius, 0.0);
    // Keep lcb <= ucb when the sample mean itself exceeds v_max.
    state.lcb(i) = std::min(state.lcb(i), state.ucb(i));
  }
  state.epoch_index = ell;
}

}  // namespace mnlkb
