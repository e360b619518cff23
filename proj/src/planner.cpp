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

#include "mnlkb/planner.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "mnlkb/errors.hpp"
#include "mnlkb/lp.hpp"

namespace mnlkb {
namespace {

constexpr double kWeightFloor = 1e-12;

LpOptions planner_lp_options() {
  LpOptions opts;
  opts.max_nonzeros = 50'000'000;
  return opts;
}

// Products whose bounds are both zero and earn nothing; masked products fall
// here and are never offered.
bool is_inert(const ReducedProgram& reduced, int i) {
  return reduced.bounds.ucb(i) == 0.0 && reduced.bounds.lcb(i) == 0.0;
}

struct Master {
  std::vector<Assortment> columns;
  LpSolution<double> solution;
};

// Restricted primal over `columns`: capacity rows first, then sum y = 1.
LpSolution<double> solve_master(const ReducedProgram& reduced,
                                const std::vector<Assortment>& columns) {
  const auto n_cols = static_cast<Eigen::Index>(columns.size());
  LinearProgram<double> lp(n_cols, Sense::kMaximize);
  for (Eigen::Index c = 0; c < n_cols; ++c) {
    lp.objective(c) = optimistic_revenue(reduced, columns[c]);
  }
  for (int i : reduced.constrained) {
    Eigen::VectorXd row(n_cols);
    for (Eigen::Index c = 0; c < n_cols; ++c) {
      row(c) = ucb_share(reduced, i, columns[c]);
    }
    lp.add_constraint(std::move(row), Relation::kLessEqual,
                      reduced.reduced_caps(i));
  }
  lp.add_constraint(Eigen::VectorXd::Ones(n_cols), Relation::kEqual, 1.0);
  auto sol = solve(lp, planner_lp_options());
  if (sol.status != LpStatus::kOptimal) {
    throw std::runtime_error("restricted master is not optimal");
  }
  return sol;
}

SparseDistribution to_distribution(const std::vector<Assortment>& columns,
                                   const Eigen::VectorXd& y) {
  double total = 0.0;
  for (Eigen::Index c = 0; c < y.size(); ++c) {
    if (y(c) > kWeightFloor) total += y(c);
  }
  std::vector<SparseDistribution::Atom> atoms;
  for (Eigen::Index c = 0; c < y.size(); ++c) {
    if (y(c) > kWeightFloor) atoms.push_back({columns[c], y(c) / total});
  }
  return SparseDistribution(std::move(atoms));
}

double distribution_value(const ReducedProgram& reduced,
                          const SparseDistribution& dist) {
  double v = 0.0;
  for (const auto& atom : dist.support()) {
    v += atom.weight * optimistic_revenue(reduced, atom.assortment);
  }
  return v;
}

DualPoint dual_point(const ReducedProgram& reduced,
                     const LpSolution<double>& sol) {
  DualPoint dual;
  dual.thetas = Eigen::VectorXd::Zero(reduced.n_products);
  for (std::size_t k = 0; k < reduced.constrained.size(); ++k) {
    dual.thetas(reduced.constrained[k]) =
        std::max(sol.dual(static_cast<Eigen::Index>(k)), 0.0);
  }
  dual.lambda = sol.dual(static_cast<Eigen::Index>(reduced.constrained.size()));
  return dual;
}

double dual_objective(const ReducedProgram& reduced, const DualPoint& dual) {
  double v = dual.lambda;
  for (int i : reduced.constrained) v += dual.thetas(i) * reduced.reduced_caps(i);
  return v;
}

}  // namespace

SparseDistribution::SparseDistribution(std::vector<Atom> support)
    : support_(std::move(support)) {
  double total = 0.0;
  for (const auto& atom : support_) {
    if (!(atom.weight > 0.0)) {
      throw std::invalid_argument("distribution weights must be positive");
    }
    total += atom.weight;
  }
  if (support_.empty() || std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("distribution weights must sum to 1");
  }
}

double compute_omega(const Instance& inst, double c_const) {
  const double k = inst.cardinality_cap;
  const double t = inst.horizon;
  const double n = inst.n_products;
  const double v_max = inst.v_max;
  const double log_t = std::log(t);
  const double t_quarter = std::pow(t, 0.25);
  const double sum =
      (k + 1.0) * t_quarter +
      8.0 * (k + 1.0) * std::sqrt((k + 1.0) * t_quarter) * log_t +
      5.0 * std::sqrt(v_max * t * log_t) + 3.0 * log_t +
      2.0 * c_const * std::log(std::sqrt(n) * std::pow(t, 4.0) + 1.0) *
          (n + std::sqrt(k * n * t * v_max)) +
      (k + 1.0) * std::sqrt(6.0 * (k + 1.0) * t) * log_t;
  return sum / static_cast<double>(inst.min_inventory());
}

ReducedProgram reduce(const Instance& inst, const OptimisticBounds& bounds,
                      double omega) {
  if (!(omega >= 0.0 && omega < 1.0)) {
    throw std::invalid_argument("omega must lie in [0, 1)");
  }
  const int n = inst.n_products;
  if (bounds.ucb.size() != n || bounds.lcb.size() != n) {
    throw std::invalid_argument("bounds must have one entry per product");
  }
  for (int i = 0; i < n; ++i) {
    if (!(bounds.lcb(i) >= 0.0 && bounds.lcb(i) <= bounds.ucb(i) &&
          bounds.ucb(i) <= inst.v_max * (1.0 + 1e-12))) {
      throw std::invalid_argument("bounds must satisfy 0 <= lcb <= ucb <= v_max");
    }
  }
  ReducedProgram out;
  out.n_products = n;
  out.cardinality_cap = inst.cardinality_cap;
  out.omega = omega;
  out.rewards = inst.revenues;
  out.bounds = bounds;
  out.reduced_caps = Eigen::VectorXd::Constant(
      n, std::numeric_limits<double>::infinity());
  const double t = inst.horizon;
  for (int i = 0; i < n; ++i) {
    if (bounds.lcb(i) == 0.0) {
      out.zero_lcb_set.push_back(i);
    } else {
      out.constrained.push_back(i);
      out.reduced_caps(i) = (1.0 - omega) * static_cast<double>(inst.inventories[i]) *
                            bounds.ucb(i) / (t * bounds.lcb(i));
    }
  }
  return out;
}

double optimistic_revenue(const ReducedProgram& reduced, const Assortment& s) {
  double numer = 0.0, denom = 1.0;
  for (int i : s.items()) {
    numer += reduced.rewards(i) * reduced.bounds.ucb(i);
    denom += reduced.bounds.lcb(i);
  }
  return numer / denom;
}

double ucb_share(const ReducedProgram& reduced, int i, const Assortment& s) {
  if (!s.contains(i)) return 0.0;
  return reduced.bounds.ucb(i) /
         (1.0 + total_utility(reduced.bounds.ucb, s));
}

double lcb_consumption(const ReducedProgram& reduced, int i,
                       const Assortment& s) {
  if (!s.contains(i)) return 0.0;
  return reduced.bounds.lcb(i) /
         (1.0 + total_utility(reduced.bounds.ucb, s));
}

DiffAssortInstance separation_instance(const ReducedProgram& reduced,
                                       const DualPoint& dual) {
  const int n = reduced.n_products;
  if (dual.thetas.size() != n) {
    throw std::invalid_argument("dual point has the wrong dimension");
  }
  DiffAssortInstance inst;
  inst.pos_reward = reduced.rewards;
  inst.pos_numerator = reduced.bounds.ucb;
  inst.pos_utility = reduced.bounds.lcb;
  inst.penalty = dual.thetas.cwiseMax(0.0);
  for (int i : reduced.zero_lcb_set) inst.penalty(i) = 0.0;
  inst.neg_utility = reduced.bounds.ucb;
  inst.cap = reduced.cardinality_cap;
  return inst;
}

SeparationResult separation(const ReducedProgram& reduced,
                            const DualPoint& dual, OracleMode mode, double eps,
                            const DiffAssortOptions& opts) {
  const DiffAssortInstance inst = separation_instance(reduced, dual);
  const OracleResult r = mode == OracleMode::kExact
                             ? exact_solve(inst, opts)
                             : approx_solve(inst, eps, opts);
  return {r.assortment, r.value, r.value - dual.lambda};
}

PlanResult solve_optimistic(const ReducedProgram& reduced,
                            const PlannerConfig& config) {
  std::vector<Assortment> columns{Assortment{}};
  const int max_cuts =
      std::max(1, config.max_cuts_per_product * reduced.n_products);
  PlanResult out;
  for (int iter = 0;; ++iter) {
    const auto sol = solve_master(reduced, columns);
    out.distribution = to_distribution(columns, sol.primal);
    out.value = distribution_value(reduced, out.distribution);
    out.dual = dual_point(reduced, sol);
    out.dual_value = dual_objective(reduced, out.dual);

    const auto sep = separation(reduced, out.dual, config.oracle_mode,
                                config.eps_oracle, config.oracle);
    ++out.oracle_calls;
    out.upper_bound = out.dual_value + std::max(sep.violation, 0.0);
    if (sep.violation <= config.tol_cut) break;
    // A known column cannot price out positively at an exact master optimum.
    if (std::find(columns.begin(), columns.end(), sep.assortment) !=
        columns.end()) {
      break;
    }
    if (iter + 1 >= max_cuts) {
      throw SolverStallError("column generation hit its cut limit",
                             out.distribution);
    }
    columns.push_back(sep.assortment);
  }
  return out;
}

long count_assortments(int n, int k) {
  long total = 0;
  long binom = 1;
  for (int j = 1; j <= std::min(n, k); ++j) {
    // binom = C(n, j)
    const long num = static_cast<long>(n - j + 1);
    if (binom > std::numeric_limits<long>::max() / num) {
      return std::numeric_limits<long>::max();
    }
    binom = binom * num / j;
    if (total > std::numeric_limits<long>::max() - binom) {
      return std::numeric_limits<long>::max();
    }
    total += binom;
  }
  return total;
}

PlanResult exact_solve_optimistic(const ReducedProgram& reduced,
                                  const PlannerConfig& config) {
  std::vector<int> active;
  for (int i = 0; i < reduced.n_products; ++i) {
    if (!is_inert(reduced, i)) active.push_back(i);
  }
  const int n = static_cast<int>(active.size());
  if (n > config.oracle.enumeration_cap ||
      count_assortments(n, reduced.cardinality_cap) > config.enumeration_limit) {
    throw CapabilityError("exact_solve_optimistic: too many assortments");
  }
  std::vector<Assortment> columns{Assortment{}};
  std::vector<int> current;
  std::function<void(int)> grow = [&](int from) {
    if (static_cast<int>(current.size()) >= reduced.cardinality_cap) return;
    for (int k = from; k < n; ++k) {
      current.push_back(active[k]);
      columns.emplace_back(current);
      grow(k + 1);
      current.pop_back();
    }
  };
  grow(0);
  const auto sol = solve_master(reduced, columns);
  PlanResult out;
  out.distribution = to_distribution(columns, sol.primal);
  out.value = distribution_value(reduced, out.distribution);
  out.dual = dual_point(reduced, sol);
  out.dual_value = dual_objective(reduced, out.dual);
  out.upper_bound = out.dual_value;
  return out;
}

OptLpResult solve_opt_lp(const Instance& inst, const PlannerConfig& config) {
  inst.validate();
  const OptimisticBounds truth{inst.utilities, inst.utilities};
  const ReducedProgram reduced = reduce(inst, truth, 0.0);
  int active = 0;
  for (int i = 0; i < inst.n_products; ++i) active += inst.utilities(i) > 0.0;

  PlanResult plan;
  if (active <= config.oracle.enumeration_cap &&
      count_assortments(active, inst.cardinality_cap) <= config.enumeration_limit) {
    plan = exact_solve_optimistic(reduced, config);
  } else {
    PlannerConfig cg = config;
    cg.oracle_mode = inst.n_products <= config.oracle.enumeration_cap
                         ? OracleMode::kExact
                         : OracleMode::kDp;
    plan = solve_optimistic(reduced, cg);
  }
  OptLpResult out;
  out.value = plan.value;
  out.opt = plan.value * inst.horizon;
  out.distribution = plan.distribution;
  return out;
}

}  // namespace mnlkb
