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

#include "mnlkb/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "mnlkb/errors.hpp"
#include "mnlkb/planner.hpp"

namespace mnlkb {
namespace {

constexpr std::uint64_t kGeneratorStream = 0x6a09e667f3bcc909ULL;

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) /
         static_cast<double>(xs.size());
}

double standard_error(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  if (n < 2) return 0.0;
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
}

// Runs body(0..count-1) on the worker pool. Exceptions are rethrown in index
// order so failures do not depend on scheduling.
template <typename Body>
void parallel_for(std::size_t count, const Body& body) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < count; k = next++) {
      try {
        body(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(
      count, static_cast<std::size_t>(std::max(1, worker_count())));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

Trace run_policy(const PolicyEntry& entry, const Instance& inst,
                 const SparseDistribution& benchmark, Rng& rng) {
  PolicyConfig cfg = entry.config;
  cfg.record_periods = false;
  switch (entry.kind) {
    case PolicyKind::kUcbKnapsack:
      return run_ucb_knapsack(inst, cfg, rng);
    case PolicyKind::kUcbUnconstrained:
      return run_unconstrained_ucb(inst, cfg, rng);
    case PolicyKind::kOracleStatic:
      return run_oracle_static(inst, benchmark, rng, false);
  }
  throw std::logic_error("unknown policy kind");
}

PolicyEntry default_knapsack_entry() {
  PolicyEntry e;
  e.label = "ucb_knapsack";
  e.kind = PolicyKind::kUcbKnapsack;
  return e;
}

const PolicyEntry* first_of_kind(const ExperimentConfig& cfg, PolicyKind k) {
  for (const auto& e : cfg.policies) {
    if (e.kind == k) return &e;
  }
  return nullptr;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace

void InstanceGenerator::validate() const {
  if (n_products < 1) throw ConfigError("generator: n_products must be >= 1");
  if (cardinality_cap < 1) {
    throw ConfigError("generator: cardinality_cap must be >= 1");
  }
  if (horizon < 1) throw ConfigError("generator: horizon must be >= 1");
  if (!(v_max > 0.0)) throw ConfigError("generator: v_max must be positive");
  if (!(inventory_fraction > 0.0)) {
    throw ConfigError("generator: inventory_fraction must be positive");
  }
  auto check_len = [&](auto size, const char* what) {
    if (static_cast<int>(size) != n_products) {
      throw ConfigError(std::string("generator: ") + what +
                        " must have n_products entries");
    }
  };
  if (inventories) check_len(inventories->size(), "inventories");
  if (revenues) check_len(revenues->size(), "revenues");
  if (utilities) check_len(utilities->size(), "utilities");
  if (!(revenue_range.first >= 0.0 &&
        revenue_range.first <= revenue_range.second)) {
    throw ConfigError("generator: bad revenue_range");
  }
  if (!(utility_range.first >= 0.0 &&
        utility_range.first <= utility_range.second &&
        utility_range.second <= v_max)) {
    throw ConfigError("generator: utility_range must lie in [0, v_max]");
  }
}

Instance InstanceGenerator::sample(int horizon_value,
                                   std::uint64_t seed) const {
  validate();
  Rng rng(replication_seed(seed, kGeneratorStream));
  Instance inst;
  inst.n_products = n_products;
  inst.cardinality_cap = cardinality_cap;
  inst.horizon = horizon_value;
  inst.v_max = v_max;
  std::uniform_real_distribution<double> rev(revenue_range.first,
                                             revenue_range.second);
  std::uniform_real_distribution<double> util(utility_range.first,
                                              utility_range.second);
  inst.revenues = Eigen::VectorXd(n_products);
  for (int i = 0; i < n_products; ++i) inst.revenues(i) = rev(rng);
  inst.utilities = Eigen::VectorXd(n_products);
  for (int i = 0; i < n_products; ++i) inst.utilities(i) = util(rng);
  if (revenues) inst.revenues = *revenues;
  if (utilities) inst.utilities = *utilities;
  if (inventories) {
    inst.inventories = *inventories;
  } else {
    const auto q = static_cast<std::int64_t>(
        std::floor(inventory_fraction * horizon_value / n_products));
    inst.inventories.assign(n_products, std::max<std::int64_t>(1, q));
  }
  inst.validate();
  return inst;
}

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kUcbKnapsack: return "ucb_knapsack";
    case PolicyKind::kUcbUnconstrained: return "ucb_unconstrained";
    case PolicyKind::kOracleStatic: return "oracle_static";
  }
  return "?";
}

PolicyKind parse_policy_kind(const std::string& text) {
  if (text == "ucb_knapsack") return PolicyKind::kUcbKnapsack;
  if (text == "ucb_unconstrained") return PolicyKind::kUcbUnconstrained;
  if (text == "oracle_static") return PolicyKind::kOracleStatic;
  throw ConfigError("unknown policy \"" + text + "\"");
}

void ExperimentConfig::validate() const {
  if (instance.has_value() == generator.has_value()) {
    throw ConfigError("exactly one of instance and generator must be given");
  }
  if (instance) {
    try {
      instance->validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("instance: ") + e.what());
    }
  }
  if (generator) generator->validate();
  if (replications < 1) throw ConfigError("replications must be >= 1");
  for (const auto& p : policies) p.config.validate();
  for (int t : horizons) {
    if (t < 1) throw ConfigError("horizons must be positive");
  }
  if (diagnostics.epochs < 1) throw ConfigError("diagnostics.epochs must be >= 1");
  if (diagnostics.coverage_replications < 1) {
    throw ConfigError("diagnostics.coverage_replications must be >= 1");
  }
}

Instance ExperimentConfig::base_instance() const {
  if (instance) return *instance;
  return generator->sample(generator->horizon, seed);
}

Instance ExperimentConfig::instance_for_horizon(int horizon) const {
  if (instance) {
    Instance inst = *instance;
    inst.horizon = horizon;
    inst.validate();
    return inst;
  }
  return generator->sample(horizon, seed);
}

std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finalizer.
  std::uint64_t z = seed + index + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

int worker_count() {
  if (const char* env = std::getenv("MNLKB_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

AggregateStats aggregate(const std::string& policy, const Instance& inst,
                         double opt, const std::vector<Trace>& traces) {
  AggregateStats s;
  s.policy = policy;
  s.replications = static_cast<int>(traces.size());
  std::vector<double> realized, expected;
  s.mean_consumption.assign(inst.n_products, 0.0);
  double stop = 0.0;
  for (const auto& tr : traces) {
    realized.push_back(tr.total_revenue);
    expected.push_back(tr.total_expected_revenue);
    stop += static_cast<double>(tr.stop_time);
    for (int i = 0; i < inst.n_products; ++i) {
      s.mean_consumption[i] += static_cast<double>(tr.consumption[i]);
      s.feasibility_violations += tr.consumption[i] > inst.inventories[i];
    }
    s.coverage_hits += tr.coverage_hits;
    s.coverage_total += tr.coverage_total;
    s.omega_clamped_runs += tr.omega.clamped;
  }
  const double n = std::max<double>(1.0, static_cast<double>(traces.size()));
  for (auto& c : s.mean_consumption) c /= n;
  s.mean_stop_time = stop / n;
  s.mean_revenue = mean_of(realized);
  s.se_revenue = standard_error(realized);
  s.mean_expected_revenue = mean_of(expected);
  s.se_expected_revenue = standard_error(expected);
  s.mean_regret = opt - s.mean_revenue;
  s.mean_regret_expected = opt - s.mean_expected_revenue;
  return s;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  return run_experiment(cfg, cfg.base_instance());
}

ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const Instance& inst) {
  cfg.validate();
  inst.validate();
  ExperimentResult out;
  out.instance = inst;
  const OptLpResult bench = solve_opt_lp(inst);
  out.opt_lp_value = bench.value;
  out.opt = bench.opt;

  const std::size_t n_pol = cfg.policies.size();
  const auto reps = static_cast<std::size_t>(cfg.replications);
  std::vector<Trace> traces(n_pol * reps);
  parallel_for(traces.size(), [&](std::size_t k) {
    const std::size_t p = k / reps, r = k % reps;
    Rng rng(replication_seed(cfg.seed, r));
    try {
      traces[k] = run_policy(cfg.policies[p], inst, bench.distribution, rng);
    } catch (const FeasibilityError& e) {
      throw FeasibilityError(cfg.policies[p].label + " replication " +
                             std::to_string(r) + ": " + e.what());
    }
    if (!cfg.write_epochs) traces[k].epochs.clear();
  });

  for (std::size_t p = 0; p < n_pol; ++p) {
    const auto& label = cfg.policies[p].label;
    std::vector<Trace> slice(std::make_move_iterator(traces.begin() + p * reps),
                             std::make_move_iterator(traces.begin() + (p + 1) * reps));
    out.stats.push_back(aggregate(label, inst, out.opt, slice));
    for (std::size_t r = 0; r < reps; ++r) {
      const Trace& tr = slice[r];
      out.runs.push_back({static_cast<int>(r), label, tr.total_revenue,
                          tr.total_expected_revenue, tr.stop_time,
                          out.opt - tr.total_revenue});
      for (const auto& ep : tr.epochs) {
        out.epochs.push_back({static_cast<int>(r), label, ep});
      }
    }
  }
  return out;
}

double log_log_slope(const std::vector<double>& x,
                     const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < std::min(x.size(), y.size()); ++k) {
    if (x[k] > 0.0 && y[k] > 0.0) {
      lx.push_back(std::log(x[k]));
      ly.push_back(std::log(y[k]));
    }
  }
  if (lx.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double mx = mean_of(lx), my = mean_of(ly);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxy += (lx[k] - mx) * (ly[k] - my);
    sxx += (lx[k] - mx) * (lx[k] - mx);
  }
  if (sxx == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / sxx;
}

ScalingResult regret_scaling(const ExperimentConfig& cfg,
                             const std::vector<int>& horizons) {
  cfg.validate();
  ExperimentConfig one = cfg;
  const PolicyEntry* chosen = cfg.policies.empty() ? nullptr : &cfg.policies[0];
  one.policies = {chosen ? *chosen : default_knapsack_entry()};
  one.write_epochs = false;
  ScalingResult out;
  out.policy = one.policies[0].label;
  std::vector<double> xs, ys;
  for (int t : horizons) {
    const Instance inst = cfg.instance_for_horizon(t);
    const ExperimentResult res = run_experiment(one, inst);
    const AggregateStats& s = res.stats[0];
    out.rows.push_back({t, res.opt, s.mean_regret_expected,
                        s.se_expected_revenue, s.mean_expected_revenue});
    xs.push_back(t);
    ys.push_back(s.mean_regret_expected);
  }
  out.slope = log_log_slope(xs, ys);
  return out;
}

EpochOutcome simulate_epoch(const Instance& inst, const Assortment& s,
                            Rng& rng) {
  EpochOutcome out;
  out.assortment = s;
  out.purchase_counts.assign(s.size(), 0);
  out.length = 1;
  const auto& items = s.items();
  for (int c = sample_choice(inst, s, rng); c != kNoPurchase;
       c = sample_choice(inst, s, rng)) {
    const auto pos = std::lower_bound(items.begin(), items.end(), c);
    ++out.purchase_counts[pos - items.begin()];
    ++out.length;
  }
  return out;
}

bool DiagnosticReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const DiagnosticCheck& c) { return c.passed; });
}

DiagnosticReport diagnostics(const ExperimentConfig& cfg) {
  cfg.validate();
  DiagnosticReport report;
  const auto& tog = cfg.diagnostics;
  if (!tog.any()) return report;
  const Instance inst = cfg.base_instance();
  const PolicyEntry* knap = first_of_kind(cfg, PolicyKind::kUcbKnapsack);
  const PolicyEntry entry = knap ? *knap : default_knapsack_entry();
  const auto mult = static_cast<double>(entry.config.count_multiplier);
  const std::int64_t m = tog.epochs;
  const double md = static_cast<double>(m);

  Assortment fixed = tog.assortment.value_or(Assortment{});
  if (!tog.assortment) {
    std::vector<int> first;
    for (int i = 0; i < std::min(inst.n_products, inst.cardinality_cap); ++i) {
      first.push_back(i);
    }
    fixed = Assortment(first);
  }
  check_assortment(fixed, inst.n_products, inst.cardinality_cap);

  if (tog.unbiasedness || tog.epoch_length) {
    Rng rng(replication_seed(cfg.seed, 0x5eed0001ULL));
    std::vector<double> sums(fixed.size(), 0.0);
    double length_sum = 0.0;
    for (std::int64_t e = 0; e < m; ++e) {
      const EpochOutcome ep = simulate_epoch(inst, fixed, rng);
      length_sum += static_cast<double>(ep.length);
      for (int k = 0; k < fixed.size(); ++k) {
        sums[k] += mult * static_cast<double>(ep.purchase_counts[k]);
      }
    }
    if (tog.unbiasedness) {
      for (int k = 0; k < fixed.size(); ++k) {
        const int i = fixed.items()[k];
        const double v = inst.utilities(i);
        const double band = 4.0 * std::sqrt(v * (1.0 + v) / md);
        const double stat = sums[k] / md;
        report.checks.push_back(
            {"unbiasedness[" + std::to_string(i + 1) + "]",
             std::abs(stat - v) <= band, stat, v - band, v + band,
             "mean estimate over " + std::to_string(m) + " epochs"});
      }
    }
    if (tog.epoch_length) {
      const double big_v = total_utility(inst.utilities, fixed);
      const double band = 4.0 * std::sqrt(big_v * (1.0 + big_v) / md);
      const double stat = length_sum / md;
      report.checks.push_back({"epoch_length",
                               std::abs(stat - (1.0 + big_v)) <= band, stat,
                               1.0 + big_v - band, 1.0 + big_v + band,
                               "offered " + fixed.to_string()});
    }
  }

  if (tog.zero_utility) {
    std::vector<int> zeros;
    for (int i = 0; i < inst.n_products; ++i) {
      if (inst.utilities(i) == 0.0 &&
          static_cast<int>(zeros.size()) < inst.cardinality_cap) {
        zeros.push_back(i);
      }
    }
    double max_estimate = 0.0;
    if (!zeros.empty()) {
      const Assortment s(zeros);
      Rng rng(replication_seed(cfg.seed, 0x5eed0002ULL));
      std::vector<double> sums(s.size(), 0.0);
      for (std::int64_t e = 0; e < m; ++e) {
        const EpochOutcome ep = simulate_epoch(inst, s, rng);
        for (int k = 0; k < s.size(); ++k) {
          sums[k] += mult * static_cast<double>(ep.purchase_counts[k]);
        }
      }
      for (double x : sums) max_estimate = std::max(max_estimate, x / md);
    }
    report.checks.push_back(
        {"zero_utility", max_estimate == 0.0, max_estimate, 0.0, 0.0,
         zeros.empty() ? "no zero-utility products"
                       : std::to_string(zeros.size()) + " products checked"});
  }

  if (tog.coverage) {
    std::vector<Trace> traces(static_cast<std::size_t>(tog.coverage_replications));
    PolicyConfig pc = entry.config;
    pc.record_periods = false;
    parallel_for(traces.size(), [&](std::size_t r) {
      Rng rng(replication_seed(cfg.seed, r));
      traces[r] = run_ucb_knapsack(inst, pc, rng);
    });
    std::int64_t hits = 0, total = 0;
    for (const auto& tr : traces) {
      hits += tr.coverage_hits;
      total += tr.coverage_total;
    }
    const double freq =
        total > 0 ? static_cast<double>(hits) / static_cast<double>(total) : 1.0;
    report.checks.push_back({"coverage", freq >= 0.99, freq, 0.99, 1.0,
                             std::to_string(total) + " (product, epoch) pairs; " +
                                 fmt(freq)});
  }
  return report;
}

}  // namespace mnlkb
