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

#ifndef MNLKB_PLANNER_HPP_
#define MNLKB_PLANNER_HPP_

// Per-epoch optimistic program and the fluid benchmark.
//
// The optimistic program over distributions y on assortments |S| <= K is
//
//   max  sum_S y_S R_ucb(S)
//   s.t. sum_S y_S p_lcb(i, S) <= (1 - omega) q_i / T   for all i,
//        sum_S y_S = 1,  y >= 0,
//
// with R_ucb(S) = sum_{i in S} r_i ucb_i / (1 + sum_{j in S} lcb_j) and
// p_lcb(i, S) = lcb_i / (1 + sum_{j in S} ucb_j). Dividing each capacity row
// by lcb_i / ucb_i turns it into sum_S y_S pi_ucb(i, S) <= q~_i, a plain
// MNL share, so the dual's separation problem is a difference of two MNL
// revenues and is handled by the diff-assort oracles.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mnlkb/diff_assort.hpp"
#include "mnlkb/mnl_model.hpp"

namespace mnlkb {

struct OptimisticBounds {
  Eigen::VectorXd ucb;
  Eigen::VectorXd lcb;
};

struct ReducedProgram {
  int n_products = 0;
  int cardinality_cap = 1;
  double omega = 0.0;
  Eigen::VectorXd rewards;        // r_i, weighting ucb_i in the revenue term
  Eigen::VectorXd reduced_caps;   // q~_i; +inf on the zero-lcb set
  std::vector<int> zero_lcb_set;  // products with lcb_i = 0, no capacity row
  std::vector<int> constrained;   // the complement, in increasing order
  OptimisticBounds bounds;
};

struct DualPoint {
  double lambda = 0.0;
  Eigen::VectorXd thetas;  // zero on the zero-lcb set
};

class SparseDistribution {
 public:
  struct Atom {
    Assortment assortment;
    double weight;
  };
  SparseDistribution() = default;
  // Throws std::invalid_argument unless weights are > 0 and sum to 1.
  explicit SparseDistribution(std::vector<Atom> support);

  const std::vector<Atom>& support() const { return support_; }
  std::size_t size() const { return support_.size(); }

 private:
  std::vector<Atom> support_;
};

enum class OracleMode { kExact, kDp };

struct PlannerConfig {
  OracleMode oracle_mode = OracleMode::kExact;
  double eps_oracle = 0.05;
  double tol_cut = 1e-7;
  // Iteration cap is max_cuts_per_product * N.
  int max_cuts_per_product = 50;
  DiffAssortOptions oracle;
  // Enumeration LPs are built when the number of assortments is at most this.
  long enumeration_limit = 20000;
};

// Raised when column generation hits its iteration cap; carries the best
// feasible distribution found.
class SolverStallError : public std::runtime_error {
 public:
  SolverStallError(const std::string& what, SparseDistribution best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const SparseDistribution& best() const { return best_; }

 private:
  SparseDistribution best_;
};

// Raw shrinkage factor; may exceed 1.
double compute_omega(const Instance& inst, double c_const);

// Analysis constant: 2 max(sqrt(72) + sqrt(24), 144).
inline constexpr double kDefaultAnalysisConstant = 288.0;

ReducedProgram reduce(const Instance& inst, const OptimisticBounds& bounds,
                      double omega);

// Optimistic revenue and per-product shares of one assortment.
double optimistic_revenue(const ReducedProgram& reduced, const Assortment& s);
double ucb_share(const ReducedProgram& reduced, int i, const Assortment& s);
// Lower-confidence consumption lcb_i / (1 + sum ucb).
double lcb_consumption(const ReducedProgram& reduced, int i,
                       const Assortment& s);

// Separation instance at a dual point: rewards r, numerator utilities ucb,
// denominator utilities lcb, penalties theta with utilities ucb.
DiffAssortInstance separation_instance(const ReducedProgram& reduced,
                                       const DualPoint& dual);

struct SeparationResult {
  Assortment assortment;
  double value = 0.0;
  double violation = 0.0;  // value - lambda
};

SeparationResult separation(const ReducedProgram& reduced,
                            const DualPoint& dual, OracleMode mode, double eps,
                            const DiffAssortOptions& opts = {});

struct PlanResult {
  SparseDistribution distribution;
  double value = 0.0;         // objective of the distribution
  double dual_value = 0.0;    // restricted dual objective
  double upper_bound = 0.0;   // Lagrangian bound from the last oracle call
  DualPoint dual;
  int oracle_calls = 0;
};

PlanResult solve_optimistic(const ReducedProgram& reduced,
                            const PlannerConfig& config = {});

// One LP over every assortment; throws CapabilityError above the limits.
PlanResult exact_solve_optimistic(const ReducedProgram& reduced,
                                  const PlannerConfig& config = {});

struct OptLpResult {
  double value = 0.0;  // OPT-LP per period
  double opt = 0.0;    // T * value
  SparseDistribution distribution;
};

OptLpResult solve_opt_lp(const Instance& inst, const PlannerConfig& config = {});

// Number of assortments with 1 <= |S| <= k over n products, saturating.
long count_assortments(int n, int k);

}  // namespace mnlkb

#endif  // MNLKB_PLANNER_HPP_
