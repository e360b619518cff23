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

#ifndef MNLKB_DIFF_ASSORT_HPP_
#define MNLKB_DIFF_ASSORT_HPP_

// Assortment problems whose objective is the difference of two MNL
// revenues:
//
//   R~(S) = sum_{i in S} w_i / (1 + sum_{j in S} a_j)
//         - sum_{i in S} theta_i b_i / (1 + sum_{j in S} b_j),
//
// where w_i = pos_reward_i * pos_numerator_i. With pos_numerator equal to
// pos_utility the first term is a plain MNL revenue; the planner uses a
// numerator utility above the denominator utility to express optimistic
// revenues.

#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "mnlkb/mnl_model.hpp"

namespace mnlkb {

struct DiffAssortInstance {
  Eigen::VectorXd pos_reward;
  Eigen::VectorXd pos_numerator;
  Eigen::VectorXd pos_utility;
  Eigen::VectorXd penalty;
  Eigen::VectorXd neg_utility;
  int cap = 1;

  int size() const { return static_cast<int>(pos_reward.size()); }
  void validate() const;
};

// Plain two-MNL instance: the positive term's numerator utilities equal its
// denominator utilities.
DiffAssortInstance make_diff_assort(Eigen::VectorXd pos_reward,
                                    Eigen::VectorXd pos_utility,
                                    Eigen::VectorXd penalty,
                                    Eigen::VectorXd neg_utility, int cap);

double objective(const DiffAssortInstance& inst, const Assortment& s);

// sum_{i in S} theta_i * b_i / (1 + sum_{j in S} b_j).
double penalty_term(const DiffAssortInstance& inst, const Assortment& s);

struct OracleResult {
  Assortment assortment;
  double value = 0.0;
};

struct DiffAssortOptions {
  int enumeration_cap = 14;
  long max_states = 4'000'000;
};

// Brute force over all |S| <= cap; ties go to the lexicographically
// smallest item list. Throws CapabilityError above the enumeration cap.
OracleResult exact_solve(const DiffAssortInstance& inst,
                         const DiffAssortOptions& opts = {});

inline constexpr double kMaxGridEps = 0.125;

// Geometric guess grids for the numerators (gamma) and denominators (delta).
struct GuessGrids {
  std::vector<double> gamma;
  std::vector<double> delta;
  double eps = 0.0;
  double u = 0.0;  // smallest utility (after zero replacement)
  double big_u = 0.0;
  double r = 0.0;  // smallest positive reward or penalty
  double big_r = 0.0;
};

GuessGrids build_grids(const DiffAssortInstance& inst, double eps);

// One guess (h1, h2, g1, g2): reward numerator, penalty numerator, and the
// two denominators.
struct Guess {
  double h1 = 0.0;
  double h2 = 0.0;
  double g1 = 0.0;
  double g2 = 0.0;
};

inline constexpr int kInfiniteCardinality = std::numeric_limits<int>::max();

// Minimum-cardinality table over discretized sums for one guess. Sums are
// integer multiples of guess-scaled units; the reward and ucb-denominator
// axes saturate at their targets, and states whose lcb-denominator or
// penalty sums exceed their targets are infeasible and dropped. Only
// finite entries are stored, one slice per prefix length p.
class DpTable {
 public:
  struct Targets {
    long reward_min = 0;   // i1 axis
    long ucb_min = 0;      // i2 axis
    long lcb_max = 0;      // j1 axis
    long penalty_max = 0;  // j2 axis
  };

  DpTable(const DiffAssortInstance& inst, const Guess& guess, double eps,
          long max_states);

  int n() const { return static_cast<int>(slices_.size()) - 1; }
  const Targets& targets() const { return targets_; }

  // F(i1, i2, j1, j2, p); the i-axes are clamped to their saturation targets.
  int min_cardinality(long i1, long i2, long j1, long j2, int p) const;
  std::optional<Assortment> witness(long i1, long i2, long j1, long j2,
                                    int p) const;

  const std::vector<long>& reward_units() const { return reward_units_; }
  const std::vector<long>& ucb_units() const { return ucb_units_; }
  const std::vector<long>& lcb_units() const { return lcb_units_; }
  const std::vector<long>& penalty_units() const { return penalty_units_; }
  long lcb_outside_units() const { return lcb_outside_; }
  long ucb_outside_units() const { return ucb_outside_; }
  long state_count() const { return state_count_; }

 private:
  struct State {
    long reward, ucb, lcb, penalty;
    int card;
    int prev;
    bool took;
  };
  int find_best(long i1, long i2, long j1, long j2, int p) const;

  Targets targets_;
  std::vector<long> reward_units_, ucb_units_, lcb_units_, penalty_units_;
  long lcb_outside_ = 0;
  long ucb_outside_ = 0;
  long state_count_ = 0;
  std::vector<std::vector<State>> slices_;
};

// Returns a set of cardinality <= cap satisfying the four relaxed guess
// inequalities, or nothing when the table has no such entry.
std::optional<Assortment> dp_solve(const DiffAssortInstance& inst,
                                   const Guess& guess, double eps,
                                   const DiffAssortOptions& opts = {});

// Guess-grid approximation with the weak guarantee
//   R~(S) >= (1 - 4 eps) R~(S*) - 16 eps sum_{i in S*} theta_i pi_ucb(i, S*).
// Denominator guesses come from the delta grid; for each pair, one pass of
// the same recursion keeps the largest reward numerator per discretized
// state, with penalty numerators trimmed on a (1 + eps/(n+1)) geometric
// grid. The empty set is always a candidate.
OracleResult approx_solve(const DiffAssortInstance& inst, double eps,
                          const DiffAssortOptions& opts = {});

}  // namespace mnlkb

#endif  // MNLKB_DIFF_ASSORT_HPP_
