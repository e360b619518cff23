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

#include "mnlkb/diff_assort.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <unordered_map>

#include "mnlkb/errors.hpp"

namespace mnlkb {
namespace {

constexpr double kRoundTol = 1e-9;

void check_eps(double eps) {
  if (!(eps > 0.0 && eps <= kMaxGridEps)) {
    throw std::invalid_argument("eps must lie in (0, 1/8]");
  }
}

long floor_units(double x, long cap) {
  const double f = std::floor(x + kRoundTol);
  return f >= static_cast<double>(cap) ? cap : static_cast<long>(f);
}

long ceil_units(double x, long cap) {
  const double c = std::ceil(x - kRoundTol);
  return c >= static_cast<double>(cap) ? cap : std::max(0L, static_cast<long>(c));
}

// Products that change neither numerator nor denominator of either term.
bool is_noop(const DiffAssortInstance& inst, int i) {
  return inst.pos_reward(i) * inst.pos_numerator(i) == 0.0 &&
         inst.pos_utility(i) == 0.0 && inst.neg_utility(i) == 0.0;
}

struct Sums {
  double reward = 0.0, pos_denom = 1.0, penalty = 0.0, neg_denom = 1.0;
  double value() const { return reward / pos_denom - penalty / neg_denom; }
};

Sums sums_of(const DiffAssortInstance& inst, const Assortment& s) {
  Sums out;
  for (int i : s.items()) {
    out.reward += inst.pos_reward(i) * inst.pos_numerator(i);
    out.pos_denom += inst.pos_utility(i);
    out.penalty += inst.penalty(i) * inst.neg_utility(i);
    out.neg_denom += inst.neg_utility(i);
  }
  return out;
}

bool better(double value, const Assortment& s, double best_value,
            const Assortment& best) {
  const double tol = 1e-12 * (1.0 + std::abs(best_value));
  if (value > best_value + tol) return true;
  if (value < best_value - tol) return false;
  return s < best;
}

}  // namespace

void DiffAssortInstance::validate() const {
  const auto n = pos_reward.size();
  if (pos_numerator.size() != n || pos_utility.size() != n ||
      penalty.size() != n || neg_utility.size() != n) {
    throw std::invalid_argument("diff-assort vectors must share one length");
  }
  if (cap < 1) throw std::invalid_argument("cardinality cap must be >= 1");
  auto nonneg = [](const Eigen::VectorXd& v) {
    return v.allFinite() && (v.array() >= 0.0).all();
  };
  if (!nonneg(pos_reward) || !nonneg(pos_numerator) || !nonneg(pos_utility) ||
      !nonneg(penalty) || !nonneg(neg_utility)) {
    throw std::invalid_argument("diff-assort data must be finite and >= 0");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (pos_utility(i) > neg_utility(i) * (1.0 + 1e-12) + 1e-15) {
      throw std::invalid_argument("pos_utility must not exceed neg_utility");
    }
  }
}

DiffAssortInstance make_diff_assort(Eigen::VectorXd pos_reward,
                                    Eigen::VectorXd pos_utility,
                                    Eigen::VectorXd penalty,
                                    Eigen::VectorXd neg_utility, int cap) {
  DiffAssortInstance inst;
  inst.pos_reward = std::move(pos_reward);
  inst.pos_numerator = pos_utility;
  inst.pos_utility = std::move(pos_utility);
  inst.penalty = std::move(penalty);
  inst.neg_utility = std::move(neg_utility);
  inst.cap = cap;
  inst.validate();
  return inst;
}

double objective(const DiffAssortInstance& inst, const Assortment& s) {
  check_assortment(s, inst.size(), inst.cap);
  return sums_of(inst, s).value();
}

double penalty_term(const DiffAssortInstance& inst, const Assortment& s) {
  check_assortment(s, inst.size(), inst.size());
  const Sums sums = sums_of(inst, s);
  return sums.penalty / sums.neg_denom;
}

OracleResult exact_solve(const DiffAssortInstance& inst,
                         const DiffAssortOptions& opts) {
  inst.validate();
  const int n = inst.size();
  if (n > opts.enumeration_cap) {
    throw CapabilityError("exact_solve: N above the enumeration cap");
  }
  std::vector<int> active;
  for (int i = 0; i < n; ++i) {
    if (!is_noop(inst, i)) active.push_back(i);
  }
  OracleResult best;  // empty set, value 0
  std::vector<int> current;
  // Depth-first in lexicographic order of item lists.
  std::function<void(std::size_t, Sums)> visit = [&](std::size_t from,
                                                     Sums sums) {
    if (static_cast<int>(current.size()) >= inst.cap) return;
    for (std::size_t k = from; k < active.size(); ++k) {
      const int i = active[k];
      Sums next = sums;
      next.reward += inst.pos_reward(i) * inst.pos_numerator(i);
      next.pos_denom += inst.pos_utility(i);
      next.penalty += inst.penalty(i) * inst.neg_utility(i);
      next.neg_denom += inst.neg_utility(i);
      current.push_back(i);
      const double v = next.value();
      Assortment s(current);
      if (better(v, s, best.value, best.assortment)) {
        best.value = v;
        best.assortment = std::move(s);
      }
      visit(k + 1, next);
      current.pop_back();
    }
  };
  visit(0, Sums{});
  return best;
}

GuessGrids build_grids(const DiffAssortInstance& inst, double eps) {
  check_eps(eps);
  inst.validate();
  const int n = inst.size();
  GuessGrids g;
  g.eps = eps;
  double u = std::numeric_limits<double>::infinity(), big_u = 0.0;
  double r = std::numeric_limits<double>::infinity(), big_r = 0.0;
  bool zero_pos_utility = false;
  for (int i = 0; i < n; ++i) {
    for (double v : {inst.pos_utility(i), inst.pos_numerator(i),
                     inst.neg_utility(i)}) {
      if (v > 0.0) {
        u = std::min(u, v);
        big_u = std::max(big_u, v);
      }
    }
    for (double w : {inst.pos_reward(i), inst.penalty(i)}) {
      if (w > 0.0) {
        r = std::min(r, w);
        big_r = std::max(big_r, w);
      }
    }
    if (inst.pos_utility(i) == 0.0 && !is_noop(inst, i)) {
      zero_pos_utility = true;
    }
  }
  if (big_u == 0.0) u = big_u = 1.0;
  if (big_r == 0.0) r = big_r = 1.0;
  if (zero_pos_utility) u = std::min(u, eps * u * r / (n * big_r));
  g.u = u;
  g.big_u = big_u;
  g.r = r;
  g.big_r = big_r;

  auto geometric = [eps](double start, double top) {
    std::vector<double> out;
    double x = start;
    while (true) {
      out.push_back(x);
      if (x >= top) break;
      x *= 1.0 + eps;
    }
    return out;
  };
  const double nn = static_cast<double>(std::max(n, 1));
  g.gamma = geometric(r * u, nn * big_r * big_u * (1.0 + eps));
  g.delta = geometric(u, (1.0 + nn * big_u) * (1.0 + eps));
  return g;
}

DpTable::DpTable(const DiffAssortInstance& inst, const Guess& guess,
                 double eps, long max_states) {
  check_eps(eps);
  inst.validate();
  if (!(guess.h1 > 0 && guess.h2 > 0 && guess.g1 > 0 && guess.g2 > 0)) {
    throw std::invalid_argument("guess values must be positive");
  }
  const int n = inst.size();
  const double nn = static_cast<double>(n);
  targets_.reward_min =
      static_cast<long>(std::ceil(nn / eps - kRoundTol)) - n;
  targets_.ucb_min =
      static_cast<long>(std::ceil((nn + 1.0) / eps - kRoundTol)) - (n + 1);
  targets_.lcb_max =
      static_cast<long>(std::floor((nn + 1.0) / eps + kRoundTol)) + n + 1;
  targets_.penalty_max = targets_.lcb_max;

  const double reward_unit = eps * guess.h1 / nn;
  const double lcb_unit = eps * guess.g1 / (nn + 1.0);
  const double penalty_unit = eps * guess.h2 / (nn + 1.0);
  const double ucb_unit = eps * guess.g2 / (nn + 1.0);
  const long over_lcb = targets_.lcb_max + 1;
  const long over_pen = targets_.penalty_max + 1;
  for (int i = 0; i < n; ++i) {
    reward_units_.push_back(floor_units(
        inst.pos_reward(i) * inst.pos_numerator(i) / reward_unit,
        targets_.reward_min));
    lcb_units_.push_back(ceil_units(inst.pos_utility(i) / lcb_unit, over_lcb));
    penalty_units_.push_back(ceil_units(
        inst.penalty(i) * inst.neg_utility(i) / penalty_unit, over_pen));
    ucb_units_.push_back(
        floor_units(inst.neg_utility(i) / ucb_unit, targets_.ucb_min));
  }
  lcb_outside_ = ceil_units(1.0 / lcb_unit, over_lcb);
  ucb_outside_ = floor_units(1.0 / ucb_unit, targets_.ucb_min);

  struct KeyHash {
    std::size_t operator()(const std::array<long, 4>& k) const {
      std::size_t h = 0;
      for (long x : k) h = h * 1000003u ^ std::hash<long>()(x);
      return h;
    }
  };

  slices_.resize(n + 1);
  if (lcb_outside_ <= targets_.lcb_max) {
    slices_[0].push_back({0, ucb_outside_, lcb_outside_, 0, 0, -1, false});
  }
  state_count_ = static_cast<long>(slices_[0].size());
  for (int p = 1; p <= n; ++p) {
    const auto& prev = slices_[p - 1];
    auto& next = slices_[p];
    std::unordered_map<std::array<long, 4>, int, KeyHash> index;
    auto insert = [&](State s) {
      const std::array<long, 4> key{s.reward, s.ucb, s.lcb, s.penalty};
      auto [it, fresh] = index.emplace(key, static_cast<int>(next.size()));
      if (fresh) {
        next.push_back(s);
      } else if (s.card < next[it->second].card) {
        next[it->second] = s;
      }
    };
    const int item = p - 1;
    for (int k = 0; k < static_cast<int>(prev.size()); ++k) {
      State s = prev[k];
      s.prev = k;
      s.took = false;
      insert(s);
    }
    for (int k = 0; k < static_cast<int>(prev.size()); ++k) {
      const State& s = prev[k];
      State t;
      t.reward = std::min(s.reward + reward_units_[item], targets_.reward_min);
      t.ucb = std::min(s.ucb + ucb_units_[item], targets_.ucb_min);
      t.lcb = s.lcb + lcb_units_[item];
      t.penalty = s.penalty + penalty_units_[item];
      if (t.lcb > targets_.lcb_max || t.penalty > targets_.penalty_max) continue;
      t.card = s.card + 1;
      t.prev = k;
      t.took = true;
      insert(t);
    }
    state_count_ += static_cast<long>(next.size());
    if (state_count_ > max_states) {
      throw CapabilityError("DP table exceeds the configured state cap");
    }
  }
}

int DpTable::find_best(long i1, long i2, long j1, long j2, int p) const {
  if (p < 0 || p > n()) throw std::invalid_argument("DP slice out of range");
  i1 = std::min(i1, targets_.reward_min);
  i2 = std::min(i2, targets_.ucb_min);
  int best = -1;
  const auto& slice = slices_[p];
  for (int k = 0; k < static_cast<int>(slice.size()); ++k) {
    const State& s = slice[k];
    if (s.reward >= i1 && s.ucb >= i2 && s.lcb <= j1 && s.penalty <= j2 &&
        (best < 0 || s.card < slice[best].card)) {
      best = k;
    }
  }
  return best;
}

int DpTable::min_cardinality(long i1, long i2, long j1, long j2, int p) const {
  const int k = find_best(i1, i2, j1, j2, p);
  return k < 0 ? kInfiniteCardinality : slices_[p][k].card;
}

std::optional<Assortment> DpTable::witness(long i1, long i2, long j1, long j2,
                                           int p) const {
  int k = find_best(i1, i2, j1, j2, p);
  if (k < 0) return std::nullopt;
  std::vector<int> items;
  for (int q = p; q > 0; --q) {
    const State& s = slices_[q][k];
    if (s.took) items.push_back(q - 1);
    k = s.prev;
  }
  return Assortment(std::move(items));
}

std::optional<Assortment> dp_solve(const DiffAssortInstance& inst,
                                   const Guess& guess, double eps,
                                   const DiffAssortOptions& opts) {
  DpTable table(inst, guess, eps, opts.max_states);
  const auto& t = table.targets();
  const int n = table.n();
  if (table.min_cardinality(t.reward_min, t.ucb_min, t.lcb_max,
                            t.penalty_max, n) > inst.cap) {
    return std::nullopt;
  }
  return table.witness(t.reward_min, t.ucb_min, t.lcb_max, t.penalty_max, n);
}

namespace {

// One denominator guess pair (g1, g2) of the approximation scheme.
class DenominatorPass {
 public:
  DenominatorPass(const DiffAssortInstance& inst, const std::vector<int>& active,
                  double eps, double min_penalty)
      : inst_(inst), active_(active), eps_(eps), min_penalty_(min_penalty) {
    const double nn = static_cast<double>(active.size());
    lcb_max_ = static_cast<long>(std::floor((nn + 1.0) / eps + kRoundTol)) +
               static_cast<long>(active.size()) + 1;
    ucb_min_ = static_cast<long>(std::ceil((nn + 1.0) / eps - kRoundTol)) -
               (static_cast<long>(active.size()) + 1);
    log_trim_ = std::log1p(eps / (nn + 1.0));
  }

  // Returns the best final state as (value, items), or nothing.
  std::optional<OracleResult> run(double g1, double g2, long max_states) {
    const double nn = static_cast<double>(active_.size());
    const double lcb_unit = eps_ * g1 / (nn + 1.0);
    const double ucb_unit = eps_ * g2 / (nn + 1.0);
    const long lcb0 = ceil_units(1.0 / lcb_unit, lcb_max_ + 1);
    if (lcb0 > lcb_max_) return std::nullopt;
    const long ucb0 = floor_units(1.0 / ucb_unit, ucb_min_);

    slices_.assign(active_.size() + 1, {});
    slices_[0].push_back({lcb0, ucb0, 0, -1, Sums{}, -1, false});
    long total = 1;
    for (std::size_t p = 1; p <= active_.size(); ++p) {
      const int i = active_[p - 1];
      const long lcb_i = ceil_units(inst_.pos_utility(i) / lcb_unit, lcb_max_ + 1);
      const long ucb_i = floor_units(inst_.neg_utility(i) / ucb_unit, ucb_min_);
      const double w = inst_.pos_reward(i) * inst_.pos_numerator(i);
      const double b = inst_.penalty(i) * inst_.neg_utility(i);
      const auto& prev = slices_[p - 1];
      auto& next = slices_[p];
      index_.clear();
      for (int k = 0; k < static_cast<int>(prev.size()); ++k) {
        State s = prev[k];
        s.prev = k;
        s.took = false;
        insert(next, s);
      }
      for (int k = 0; k < static_cast<int>(prev.size()); ++k) {
        const State& s = prev[k];
        if (s.card >= inst_.cap) continue;
        State t;
        t.lcb = s.lcb + lcb_i;
        if (t.lcb > lcb_max_) continue;
        t.ucb = std::min(s.ucb + ucb_i, ucb_min_);
        t.card = s.card + 1;
        t.sums = s.sums;
        t.sums.reward += w;
        t.sums.pos_denom += inst_.pos_utility(i);
        t.sums.penalty += b;
        t.sums.neg_denom += inst_.neg_utility(i);
        t.bucket = bucket(t.sums.penalty);
        t.prev = k;
        t.took = true;
        insert(next, t);
      }
      total += static_cast<long>(next.size());
      if (total > max_states) {
        throw CapabilityError("approx_solve exceeds the configured state cap");
      }
    }

    const auto& last = slices_.back();
    int best = -1;
    double best_value = 0.0;
    Assortment best_set;
    for (int k = 0; k < static_cast<int>(last.size()); ++k) {
      const State& s = last[k];
      if (s.card == 0 || s.ucb < ucb_min_) continue;
      const double v = s.sums.value();
      if (best >= 0 && v < best_value - 1e-12 * (1.0 + std::abs(best_value))) {
        continue;
      }
      Assortment items = reconstruct(k);
      if (best < 0 || better(v, items, best_value, best_set)) {
        best = k;
        best_value = v;
        best_set = std::move(items);
      }
    }
    if (best < 0) return std::nullopt;
    return OracleResult{std::move(best_set), best_value};
  }

 private:
  struct State {
    long lcb, ucb;
    int card;
    long bucket;  // -1 for a zero penalty numerator
    Sums sums;
    int prev;
    bool took;
  };
  struct Key {
    long lcb, ucb, bucket;
    int card;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::size_t h = std::hash<long>()(k.lcb);
      h = h * 1000003u ^ std::hash<long>()(k.ucb);
      h = h * 1000003u ^ std::hash<long>()(k.bucket);
      return h * 1000003u ^ std::hash<int>()(k.card);
    }
  };

  long bucket(double penalty) const {
    if (penalty <= 0.0) return -1;
    return static_cast<long>(
        std::floor(std::log(penalty / min_penalty_) / log_trim_ + kRoundTol));
  }

  // Keeps the larger reward numerator per key; equal numerators keep the
  // smaller penalty numerator.
  void insert(std::vector<State>& next, const State& s) {
    const Key key{s.lcb, s.ucb, s.bucket, s.card};
    auto [it, fresh] = index_.emplace(key, static_cast<int>(next.size()));
    if (fresh) {
      next.push_back(s);
      return;
    }
    State& cur = next[it->second];
    if (s.sums.reward > cur.sums.reward ||
        (s.sums.reward == cur.sums.reward && s.sums.penalty < cur.sums.penalty)) {
      cur = s;
    }
  }

  Assortment reconstruct(int k) const {
    std::vector<int> items;
    for (std::size_t q = slices_.size() - 1; q > 0; --q) {
      const State& s = slices_[q][k];
      if (s.took) items.push_back(active_[q - 1]);
      k = s.prev;
    }
    return Assortment(std::move(items));
  }

  const DiffAssortInstance& inst_;
  const std::vector<int>& active_;
  double eps_;
  double min_penalty_;
  long lcb_max_ = 0, ucb_min_ = 0;
  double log_trim_ = 0.0;
  std::vector<std::vector<State>> slices_;
  std::unordered_map<Key, int, KeyHash> index_;
};

}  // namespace

OracleResult approx_solve(const DiffAssortInstance& inst, double eps,
                          const DiffAssortOptions& opts) {
  check_eps(eps);
  inst.validate();
  std::vector<int> active;
  double min_penalty = std::numeric_limits<double>::infinity();
  bool any_reward = false;
  for (int i = 0; i < inst.size(); ++i) {
    if (is_noop(inst, i)) continue;
    active.push_back(i);
    any_reward |= inst.pos_reward(i) * inst.pos_numerator(i) > 0.0;
    const double b = inst.penalty(i) * inst.neg_utility(i);
    if (b > 0.0) min_penalty = std::min(min_penalty, b);
  }
  OracleResult best;
  // Without a positive reward numerator every nonempty set scores <= 0.
  if (!any_reward) return best;

  // Largest denominators any feasible set can reach.
  std::vector<double> pos_u, neg_u;
  for (int i : active) {
    pos_u.push_back(inst.pos_utility(i));
    neg_u.push_back(inst.neg_utility(i));
  }
  auto top_sum = [&](std::vector<double> v) {
    std::sort(v.begin(), v.end(), std::greater<>());
    double s = 0.0;
    for (std::size_t k = 0; k < v.size() && static_cast<int>(k) < inst.cap; ++k) {
      s += v[k];
    }
    return s;
  };
  const double max_pos_denom = 1.0 + top_sum(pos_u);
  const double max_neg_denom = 1.0 + top_sum(neg_u);

  const GuessGrids grids = build_grids(inst, eps);
  DenominatorPass pass(inst, active, eps, min_penalty);
  const double slack = 1.0 + 1e-12;
  for (double g1 : grids.delta) {
    // g1 brackets 1 + sum of lcb utilities from above.
    if (g1 * slack < 1.0 || g1 > max_pos_denom * (1.0 + eps) * slack) continue;
    for (double g2 : grids.delta) {
      // g2 brackets 1 + sum of ucb utilities from below.
      if (g2 * (1.0 + eps) * slack < 1.0 || g2 > max_neg_denom * slack) continue;
      if (g1 > g2 * (1.0 + eps) * (1.0 + eps) * slack) continue;
      auto found = pass.run(g1, g2, opts.max_states);
      if (found && better(found->value, found->assortment, best.value,
                          best.assortment)) {
        best = std::move(*found);
      }
    }
  }
  return best;
}

}  // namespace mnlkb
