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

#include "mnlkb/mnl_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mnlkb {

Assortment::Assortment(std::vector<int> items) : items_(std::move(items)) {
  std::sort(items_.begin(), items_.end());
  if (std::adjacent_find(items_.begin(), items_.end()) != items_.end()) {
    throw std::invalid_argument("assortment contains duplicate products");
  }
  if (!items_.empty() && items_.front() < 0) {
    throw std::invalid_argument("assortment contains a negative index");
  }
}

bool Assortment::contains(int product) const {
  return std::binary_search(items_.begin(), items_.end(), product);
}

std::string Assortment::to_string() const {
  std::string out = "{";
  for (std::size_t k = 0; k < items_.size(); ++k) {
    if (k > 0) out += ' ';
    out += std::to_string(items_[k] + 1);
  }
  out += '}';
  return out;
}

Assortment parse_assortment(const std::string& text) {
  if (text.size() < 2 || text.front() != '{' || text.back() != '}') {
    throw std::invalid_argument("malformed assortment: " + text);
  }
  std::istringstream in(text.substr(1, text.size() - 2));
  std::vector<int> items;
  int id = 0;
  while (in >> id) {
    if (id < 1) throw std::invalid_argument("product ids are 1-based");
    items.push_back(id - 1);
  }
  if (!in.eof()) throw std::invalid_argument("malformed assortment: " + text);
  return Assortment(std::move(items));
}

void Instance::validate() const {
  const auto n = static_cast<Eigen::Index>(n_products);
  if (n_products < 1) throw std::invalid_argument("n_products must be >= 1");
  if (cardinality_cap < 1 || cardinality_cap > n_products) {
    throw std::invalid_argument("cardinality_cap must lie in [1, N]");
  }
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (revenues.size() != n || utilities.size() != n ||
      static_cast<int>(inventories.size()) != n_products) {
    throw std::invalid_argument("per-product vectors must have length N");
  }
  if (!(v_max > 0.0 && v_max <= kOutsideUtility)) {
    throw std::invalid_argument("v_max must lie in (0, 1]");
  }
  for (int i = 0; i < n_products; ++i) {
    if (!(revenues(i) > 0.0) || !std::isfinite(revenues(i))) {
      throw std::invalid_argument("revenues must be positive and finite");
    }
    if (inventories[i] < 1) {
      throw std::invalid_argument("inventories must be >= 1");
    }
    if (!(utilities(i) >= 0.0 && utilities(i) <= v_max)) {
      throw std::invalid_argument("utilities must lie in [0, v_max]");
    }
  }
}

std::int64_t Instance::min_inventory() const {
  return *std::min_element(inventories.begin(), inventories.end());
}

void check_assortment(const Assortment& s, int n_products, int cap) {
  if (s.size() > cap) {
    throw std::invalid_argument("assortment exceeds the cardinality cap");
  }
  if (!s.empty() && s.items().back() >= n_products) {
    throw std::invalid_argument("assortment references an unknown product");
  }
}

double choice_prob_with_outside(const Eigen::VectorXd& utilities,
                                double outside_utility, const Assortment& s,
                                int choice) {
  const double denom = outside_utility + total_utility(utilities, s);
  if (choice == kNoPurchase) return outside_utility / denom;
  if (choice < 0 || choice >= utilities.size()) {
    throw std::invalid_argument("choice index out of range");
  }
  return s.contains(choice) ? utilities(choice) / denom : 0.0;
}

double choice_prob(const Instance& inst, const Assortment& s, int choice) {
  check_assortment(s, inst.n_products, inst.n_products);
  return choice_prob_with_outside(inst.utilities, Instance::kOutsideUtility, s,
                                  choice);
}

double revenue(const Instance& inst, const Assortment& s) {
  double numer = 0.0;
  for (int i : s.items()) numer += inst.revenues(i) * inst.utilities(i);
  return numer / (Instance::kOutsideUtility + total_utility(inst.utilities, s));
}

int sample_choice(const Instance& inst, const Assortment& s, Rng& rng) {
  if (s.empty()) return kNoPurchase;
  const double total =
      Instance::kOutsideUtility + total_utility(inst.utilities, s);
  std::uniform_real_distribution<double> unif(0.0, total);
  double u = unif(rng);
  for (int i : s.items()) {
    const double v = inst.utilities(i);
    if (u < v) return i;
    u -= v;
  }
  return kNoPurchase;
}

}  // namespace mnlkb
