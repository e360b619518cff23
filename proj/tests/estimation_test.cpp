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

#include <cmath>

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace mnlkb {
namespace {

using testing::make_instance;
using testing::vec;

Instance three_products() {
  return make_instance(vec({1.0, 1.0, 1.0}), vec({0.2, 0.5, 0.8}), {9, 9, 9},
                       2, 100, 0.9);
}

EpochOutcome outcome(std::vector<int> items, std::vector<std::int64_t> counts) {
  EpochOutcome o;
  o.assortment = Assortment(std::move(items));
  o.purchase_counts = std::move(counts);
  o.length = 1;
  for (auto c : o.purchase_counts) o.length += c;
  return o;
}

TEST(InitStateTest, StartsFromTheUninformativeBox) {
  const auto state = init_state(three_products());
  EXPECT_EQ(state.epoch_index, 0);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(state.ucb(i), 0.9);
    EXPECT_EQ(state.lcb(i), 0.0);
    EXPECT_EQ(state.offered_epochs[i], 0);
    EXPECT_FALSE(state.mean[i].has_value());
  }
}

TEST(ConfidenceRadiusTest, ZeroMeanLeavesTheAdditiveTerm) {
  const double a = 48.0 * std::log(std::sqrt(3.0) * 16.0 + 1.0) / 7.0;
  EXPECT_NEAR(confidence_radius(0.0, 7, 2, 3), a, 1e-12);
}

TEST(ConfidenceRadiusTest, QuarterMeanWithHundredthAdditiveTerm) {
  // Choose t_i so that A = 0.01 for ell = 1, n = 1: A = 48 log 2 / t_i.
  // t_i is an integer, so instead check the formula at the integer t_i and
  // the target case through the closed form sqrt(0.25 * A) + A.
  const std::int64_t t_i = 3327;  // 48 log 2 / 3327 ~= 0.0100002
  const double a = 48.0 * std::log(2.0) / static_cast<double>(t_i);
  EXPECT_NEAR(a, 0.01, 1e-5);
  EXPECT_NEAR(confidence_radius(0.25, t_i, 1, 1), std::sqrt(0.25 * a) + a,
              1e-15);
  EXPECT_NEAR(confidence_radius(0.25, t_i, 1, 1), 0.06, 2e-5);
}

TEST(ConfidenceRadiusTest, NonincreasingInSampleCount) {
  for (double mean : {0.0, 0.3, 1.0}) {
    double prev = confidence_radius(mean, 1, 5, 4);
    for (std::int64_t t = 2; t < 200; ++t) {
      const double r = confidence_radius(mean, t, 5, 4);
      EXPECT_LE(r, prev);
      prev = r;
    }
  }
}

TEST(ConfidenceRadiusTest, RejectsEmptySample) {
  EXPECT_THROW(confidence_radius(0.1, 0, 1, 1), std::invalid_argument);
}

TEST(EpochOutcomeTest, CountsMustMatchLength) {
  auto o = outcome({0, 1}, {1, 2});
  EXPECT_NO_THROW(o.validate());
  o.length = 2;
  EXPECT_THROW(o.validate(), std::invalid_argument);
  o.purchase_counts = {1};
  EXPECT_THROW(o.validate(), std::invalid_argument);
}

TEST(RecordEpochTest, FirstEpochWithoutPurchaseClampsToVmax) {
  const auto inst = make_instance(vec({1.0}), vec({0.5}), {9}, 1, 100);
  auto state = init_state(inst);
  record_epoch(state, outcome({0}, {0}));
  EXPECT_EQ(state.epoch_index, 1);
  EXPECT_EQ(*state.mean[0], 0.0);
  EXPECT_EQ(state.lcb(0), 0.0);
  EXPECT_EQ(state.ucb(0), inst.v_max);
}

TEST(RecordEpochTest, OnlyOfferedProductsMove) {
  auto state = init_state(three_products());
  record_epoch(state, outcome({1}, {2}));
  EXPECT_EQ(state.offered_epochs[0], 0);
  EXPECT_EQ(state.offered_epochs[2], 0);
  EXPECT_EQ(state.ucb(0), 0.9);
  EXPECT_EQ(state.lcb(2), 0.0);
  EXPECT_FALSE(state.mean[0].has_value());
  EXPECT_EQ(state.offered_epochs[1], 1);
}

TEST(RecordEpochTest, MeanIsTheAverageCount) {
  const auto inst = make_instance(vec({1.0}), vec({0.5}), {9}, 1, 100);
  auto state = init_state(inst);
  record_epoch(state, outcome({0}, {1}));
  record_epoch(state, outcome({0}, {3}));
  EXPECT_EQ(*state.mean[0], 2.0);
  EXPECT_EQ(state.count_sum[0], 4);
}

TEST(RecordEpochTest, BoundsUseTheClosingEpochIndex) {
  const auto inst = three_products();
  auto state = init_state(inst);
  for (int k = 0; k < 400; ++k) record_epoch(state, outcome({0}, {0}));
  record_epoch(state, outcome({1}, {1}));
  // Product 2 was sampled once, at epoch 401.
  const double r = confidence_radius(1.0, 1, 401, 3);
  EXPECT_EQ(state.ucb(1), std::min(1.0 + r, 0.9));
  EXPECT_EQ(state.lcb(1), 0.0);
  // Product 1: 400 epochs without purchases; the radius at ell = 400.
  EXPECT_EQ(state.ucb(0), std::min(confidence_radius(0.0, 400, 400, 3), 0.9));
}

TEST(RecordEpochTest, BoundsStayOrderedInsideTheBox) {
  const auto inst = three_products();
  auto state = init_state(inst);
  Rng rng(5);
  for (int k = 0; k < 3000; ++k) {
    const int a = static_cast<int>(rng() % 3);
    const int b = (a + 1 + static_cast<int>(rng() % 2)) % 3;
    record_epoch(state, outcome({a, b}, {static_cast<std::int64_t>(rng() % 4),
                                         static_cast<std::int64_t>(rng() % 3)}));
    for (int i = 0; i < 3; ++i) {
      ASSERT_LE(0.0, state.lcb(i));
      ASSERT_LE(state.lcb(i), state.ucb(i));
      ASSERT_LE(state.ucb(i), inst.v_max);
    }
  }
}

TEST(RecordEpochTest, LongSamplingYieldsInformativeBounds) {
  const auto inst = make_instance(vec({1.0}), vec({1.0}), {9}, 1, 100);
  auto state = init_state(inst);
  // Mean 1 observed over many epochs: the lower bound turns positive once
  // the radius drops below the mean.
  for (int k = 0; k < 20000; ++k) record_epoch(state, outcome({0}, {1}));
  EXPECT_GT(state.lcb(0), 0.0);
  EXPECT_LT(state.lcb(0), 1.0);
}

}  // namespace
}  // namespace mnlkb
