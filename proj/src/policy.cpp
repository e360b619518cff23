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

#include "mnlkb/policy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <utility>

#include "mnlkb/diff_assort.hpp"
#include "mnlkb/errors.hpp"

namespace mnlkb {
namespace {

using Chooser = std::function<Assortment(const OptimisticBounds&, Rng&)>;

PlannerConfig planner_config(const PolicyConfig& cfg) {
  PlannerConfig pc;
  pc.oracle_mode = cfg.oracle_mode;
  pc.eps_oracle = cfg.eps_oracle;
  return pc;
}

bool same_bounds(const OptimisticBounds& a, const OptimisticBounds& b) {
  return a.ucb.size() == b.ucb.size() && a.ucb == b.ucb && a.lcb == b.lcb;
}

// The epoch loop shared by the optimistic policies: plan at each epoch
// start, offer the chosen set until a no-purchase, stop at the horizon or at
// the first stockout.
Trace run_epochs(const Instance& inst, const PolicyConfig& cfg, Rng& rng,
                 const Chooser& choose) {
  inst.validate();
  cfg.validate();
  const int n = inst.n_products;
  EstimatorState est = init_state(inst);
  std::vector<std::int64_t> remaining = inst.inventories;
  Trace trace;
  trace.consumption.assign(n, 0);

  bool in_epoch = false;
  EpochRecord rec;
  std::int64_t ell = 0;
  for (std::int64_t t = 1; t <= inst.horizon; ++t) {
    if (!in_epoch) {
      ++ell;
      OptimisticBounds bounds = cfg.oracle_bounds
                                    ? OptimisticBounds{inst.utilities,
                                                       inst.utilities}
                                    : OptimisticBounds{est.ucb, est.lcb};
      for (int i = 0; i < n; ++i) {
        const double v = inst.utilities(i);
        trace.coverage_hits += bounds.lcb(i) <= v && v <= bounds.ucb(i);
        ++trace.coverage_total;
        if (remaining[i] == 0) bounds.ucb(i) = bounds.lcb(i) = 0.0;
      }
      rec = EpochRecord{};
      rec.epoch = ell;
      rec.start = t;
      rec.outcome.assortment = choose(bounds, rng);
      rec.outcome.purchase_counts.assign(rec.outcome.assortment.size(), 0);
      rec.outcome.length = 0;
      in_epoch = true;
    }
    const Assortment& s = rec.outcome.assortment;
    const int choice = sample_choice(inst, s, rng);
    const double expected = revenue(inst, s);
    double earned = 0.0;
    ++rec.outcome.length;
    if (choice != kNoPurchase) {
      earned = inst.revenues(choice);
      --remaining[choice];
      ++trace.consumption[choice];
      const auto& items = s.items();
      const auto pos = std::lower_bound(items.begin(), items.end(), choice);
      ++rec.outcome.purchase_counts[pos - items.begin()];
    }
    trace.total_revenue += earned;
    trace.total_expected_revenue += expected;
    trace.stop_time = t;
    if (cfg.record_periods) {
      trace.periods.push_back({t, ell, s, choice, earned, expected});
    }
    if (choice == kNoPurchase) {
      rec.complete = true;
      EpochOutcome fed = rec.outcome;
      if (cfg.count_multiplier != 1) {
        for (auto& c : fed.purchase_counts) c *= cfg.count_multiplier;
        fed.length = (fed.length - 1) * cfg.count_multiplier + 1;
      }
      record_epoch(est, fed);
      trace.epochs.push_back(std::move(rec));
      in_epoch = false;
    } else if (remaining[choice] == 0) {
      trace.stop_cause = StopCause::kStockout;
      trace.stockout_product = choice;
      break;
    }
  }
  // A truncated final epoch is kept in the trace but never reaches the
  // estimator; its length counts the periods it actually ran.
  if (in_epoch) trace.epochs.push_back(std::move(rec));
  check_feasibility(inst, trace);
  return trace;
}

}  // namespace

void PolicyConfig::validate() const {
  if (epsilon_target && !(*epsilon_target > 0.0)) {
    throw ConfigError("epsilon_target must be positive");
  }
  if (!(eps_oracle > 0.0 && eps_oracle <= kMaxGridEps)) {
    throw ConfigError("eps_oracle must lie in (0, 0.125]");
  }
  if (!(omega_manual >= 0.0 && omega_manual < 1.0)) {
    throw ConfigError("manual omega must lie in [0, 1)");
  }
  if (!(omega_cap >= 0.0 && omega_cap < 1.0)) {
    throw ConfigError("omega_cap must lie in [0, 1)");
  }
  if (!(c_const > 0.0)) throw ConfigError("c_const must be positive");
  if (count_multiplier < 1) throw ConfigError("count_multiplier must be >= 1");
}

OmegaChoice resolve_omega(const Instance& inst, const PolicyConfig& cfg) {
  OmegaChoice out;
  out.raw = compute_omega(inst, cfg.c_const);
  switch (cfg.omega_mode) {
    case OmegaMode::kPaper:
      if (!(out.raw < 1.0)) {
        throw ConfigError(
            "shrinkage factor is " + std::to_string(out.raw) +
            " >= 1 for this instance; use omega_mode \"clamped\" or "
            "\"manual\"");
      }
      out.value = out.raw;
      break;
    case OmegaMode::kClamped:
      out.value = std::min(out.raw, cfg.omega_cap);
      out.clamped = out.raw > cfg.omega_cap;
      break;
    case OmegaMode::kManual:
      out.value = cfg.omega_manual;
      break;
  }
  return out;
}

void check_feasibility(const Instance& inst, const Trace& trace) {
  for (int i = 0; i < inst.n_products; ++i) {
    if (trace.consumption[i] > inst.inventories[i]) {
      throw FeasibilityError("product " + std::to_string(i + 1) + " sold " +
                             std::to_string(trace.consumption[i]) +
                             " units with inventory " +
                             std::to_string(inst.inventories[i]));
    }
  }
}

Assortment sample_assortment(const SparseDistribution& dist, Rng& rng) {
  const auto& support = dist.support();
  double total = 0.0;
  for (const auto& atom : support) total += atom.weight;
  if (support.empty() || std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("distribution weights must sum to 1");
  }
  const double u = std::uniform_real_distribution<double>(0.0, total)(rng);
  double acc = 0.0;
  for (const auto& atom : support) {
    acc += atom.weight;
    if (u < acc) return atom.assortment;
  }
  return support.back().assortment;
}

Trace run_ucb_knapsack(const Instance& inst, const PolicyConfig& cfg,
                       Rng& rng) {
  const OmegaChoice omega = resolve_omega(inst, cfg);
  const PlannerConfig pc = planner_config(cfg);
  std::optional<OptimisticBounds> cached_bounds;
  SparseDistribution cached;
  int plans = 0;
  Chooser choose = [&](const OptimisticBounds& bounds, Rng& r) {
    if (!cached_bounds || !same_bounds(*cached_bounds, bounds)) {
      const ReducedProgram reduced = reduce(inst, bounds, omega.value);
      try {
        cached = solve_optimistic(reduced, pc).distribution;
      } catch (const SolverStallError& e) {
        throw std::runtime_error(std::string("planner stalled: ") + e.what());
      }
      cached_bounds = bounds;
      ++plans;
    }
    return sample_assortment(cached, r);
  };
  Trace trace = run_epochs(inst, cfg, rng, choose);
  trace.omega = omega;
  trace.plans_solved = plans;
  return trace;
}

Trace run_unconstrained_ucb(const Instance& inst, const PolicyConfig& cfg,
                            Rng& rng) {
  int plans = 0;
  Chooser choose = [&](const OptimisticBounds& bounds, Rng&) {
    DiffAssortInstance d;
    d.pos_reward = inst.revenues;
    d.pos_numerator = bounds.ucb;
    d.pos_utility = bounds.lcb;
    d.penalty = Eigen::VectorXd::Zero(inst.n_products);
    d.neg_utility = bounds.ucb;
    d.cap = inst.cardinality_cap;
    ++plans;
    return cfg.oracle_mode == OracleMode::kExact
               ? exact_solve(d).assortment
               : approx_solve(d, cfg.eps_oracle).assortment;
  };
  Trace trace = run_epochs(inst, cfg, rng, choose);
  trace.plans_solved = plans;
  return trace;
}

Trace run_oracle_static(const Instance& inst, const SparseDistribution& dist,
                        Rng& rng, bool record_periods) {
  inst.validate();
  std::vector<std::int64_t> remaining = inst.inventories;
  Trace trace;
  trace.consumption.assign(inst.n_products, 0);
  for (std::int64_t t = 1; t <= inst.horizon; ++t) {
    const Assortment s = sample_assortment(dist, rng);
    const int choice = sample_choice(inst, s, rng);
    const double expected = revenue(inst, s);
    double earned = 0.0;
    if (choice != kNoPurchase) {
      earned = inst.revenues(choice);
      --remaining[choice];
      ++trace.consumption[choice];
    }
    trace.total_revenue += earned;
    trace.total_expected_revenue += expected;
    trace.stop_time = t;
    if (record_periods) trace.periods.push_back({t, t, s, choice, earned, expected});
    if (choice != kNoPurchase && remaining[choice] == 0) {
      trace.stop_cause = StopCause::kStockout;
      trace.stockout_product = choice;
      break;
    }
  }
  check_feasibility(inst, trace);
  return trace;
}

Trace run_oracle_static(const Instance& inst, Rng& rng) {
  return run_oracle_static(inst, solve_opt_lp(inst).distribution, rng);
}

std::string to_string(StopCause cause) {
  return cause == StopCause::kHorizon ? "horizon" : "stockout";
}

std::string to_string(OmegaMode mode) {
  switch (mode) {
    case OmegaMode::kPaper: return "paper";
    case OmegaMode::kClamped: return "clamped";
    case OmegaMode::kManual: return "manual";
  }
  return "?";
}

OmegaMode parse_omega_mode(const std::string& text) {
  if (text == "paper") return OmegaMode::kPaper;
  if (text == "clamped") return OmegaMode::kClamped;
  if (text == "manual") return OmegaMode::kManual;
  throw ConfigError("unknown omega_mode \"" + text + "\"");
}

std::string to_string(OracleMode mode) {
  return mode == OracleMode::kExact ? "exact" : "dp";
}

OracleMode parse_oracle_mode(const std::string& text) {
  if (text == "exact") return OracleMode::kExact;
  if (text == "dp") return OracleMode::kDp;
  throw ConfigError("unknown oracle_mode \"" + text + "\"");
}

}  // namespace mnlkb
