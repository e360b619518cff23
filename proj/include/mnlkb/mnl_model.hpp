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

#ifndef MNLKB_MNL_MODEL_HPP_
#define MNLKB_MNL_MODEL_HPP_

#include <compare>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mnlkb {

using Rng = std::mt19937_64;

// Products are 0-based internally; kNoPurchase stands for the outside option.
// Human-facing output (CSV, CLI) uses 1-based product ids with 0 = no purchase.
inline constexpr int kNoPurchase = -1;

// A set of offered products, kept as a strictly increasing index list.
class Assortment {
 public:
  Assortment() = default;
  // Sorts the input; throws std::invalid_argument on duplicates or negatives.
  explicit Assortment(std::vector<int> items);

  const std::vector<int>& items() const { return items_; }
  int size() const { return static_cast<int>(items_.size()); }
  bool empty() const { return items_.empty(); }
  bool contains(int product) const;

  // "{1 3}" with 1-based ids; "{}" for the empty set.
  std::string to_string() const;

  // Lexicographic order on the item lists.
  auto operator<=>(const Assortment&) const = default;
  bool operator==(const Assortment&) const = default;

 private:
  std::vector<int> items_;
};

// Parses the to_string() format.
Assortment parse_assortment(const std::string& text);

// Ground-truth market. Immutable once validated; safe to share across
// replications.
struct Instance {
  int n_products = 0;
  int cardinality_cap = 0;
  int horizon = 0;
  Eigen::VectorXd revenues;
  std::vector<std::int64_t> inventories;
  Eigen::VectorXd utilities;
  double v_max = 1.0;
  static constexpr double kOutsideUtility = 1.0;

  // Throws std::invalid_argument if any field breaks the model assumptions.
  void validate() const;
  std::int64_t min_inventory() const;
};

// Throws std::invalid_argument unless every product is in [0, n) and
// |s| <= cap.
void check_assortment(const Assortment& s, int n_products, int cap);

// Sum of utilities over the offered set.
template <typename Derived>
double total_utility(const Eigen::MatrixBase<Derived>& utilities,
                     const Assortment& s) {
  double sum = 0.0;
  for (int i : s.items()) sum += utilities(i);
  return sum;
}

// MNL purchase probability with an explicit outside-option utility.
// `choice` is a product index or kNoPurchase.
double choice_prob_with_outside(const Eigen::VectorXd& utilities,
                                double outside_utility, const Assortment& s,
                                int choice);

double choice_prob(const Instance& inst, const Assortment& s, int choice);

// Expected single-period revenue R(S).
double revenue(const Instance& inst, const Assortment& s);

// Draws the customer's choice; kNoPurchase for the outside option.
int sample_choice(const Instance& inst, const Assortment& s, Rng& rng);

}  // namespace mnlkb

#endif  // MNLKB_MNL_MODEL_HPP_
