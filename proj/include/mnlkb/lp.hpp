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

#ifndef MNLKB_LP_HPP_
#define MNLKB_LP_HPP_

// Dense two-phase simplex for the small programs the planner builds:
// restricted masters of the column generation loop and enumeration LPs.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace mnlkb {

enum class Sense { kMaximize, kMinimize };
enum class Relation { kLessEqual, kEqual, kGreaterEqual };
enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

template <typename Scalar>
struct LinearProgram {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  struct Constraint {
    Vector coefficients;
    Relation relation = Relation::kLessEqual;
    Scalar rhs = 0;
  };

  LinearProgram() = default;
  explicit LinearProgram(Eigen::Index n_vars, Sense s = Sense::kMaximize)
      : sense(s),
        objective(Vector::Zero(n_vars)),
        lower(Vector::Zero(n_vars)),
        upper(Vector::Constant(n_vars, std::numeric_limits<Scalar>::infinity())) {}

  Eigen::Index num_variables() const { return objective.size(); }

  void add_constraint(Vector coefficients, Relation relation, Scalar rhs) {
    if (coefficients.size() != num_variables()) {
      throw std::invalid_argument("constraint width does not match objective");
    }
    constraints.push_back({std::move(coefficients), relation, rhs});
  }

  Sense sense = Sense::kMaximize;
  Vector objective;
  std::vector<Constraint> constraints;
  Vector lower;  // -inf allowed
  Vector upper;  // +inf allowed
};

template <typename Scalar>
struct LpSolution {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  LpStatus status = LpStatus::kInfeasible;
  Vector primal;
  // d(objective)/d(rhs_i) for each user constraint, in the user's sense.
  Vector dual;
  Scalar objective = 0;
  int iterations = 0;
};

struct LpOptions {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-11;
  int max_iterations = 200000;
  long max_nonzeros = 10000;
  // Dantzig pricing falls back to Bland's rule after this many consecutive
  // degenerate pivots.
  int degenerate_streak_for_bland = 50;
};

namespace lp_detail {

template <typename Scalar>
class Tableau {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Tableau(Matrix a, Vector b, std::vector<int> basis, const LpOptions& opts)
      : opts_(opts), basis_(std::move(basis)) {
    const auto m = a.rows();
    const auto n = a.cols();
    t_.resize(m + 1, n + 1);
    t_.topLeftCorner(m, n) = a;
    t_.topRightCorner(m, 1) = b;
    t_.row(m).setZero();
  }

  Eigen::Index rows() const { return t_.rows() - 1; }
  Eigen::Index cols() const { return t_.cols() - 1; }
  const std::vector<int>& basis() const { return basis_; }
  Scalar rhs(Eigen::Index i) const { return t_(i, cols()); }
  Scalar entry(Eigen::Index i, Eigen::Index j) const { return t_(i, j); }
  int iterations() const { return iterations_; }

  // Loads cost vector c (maximize c^T x) and prices out the basis.
  void set_costs(const Vector& c) {
    const auto m = rows();
    const auto n = cols();
    t_.row(m).setZero();
    for (Eigen::Index j = 0; j < n; ++j) t_(m, j) = -c(j);
    t_(m, n) = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
      const Scalar cb = c(basis_[i]);
      if (cb != Scalar(0)) t_.row(m) += cb * t_.row(i);
    }
  }

  Scalar objective_value() const { return t_(rows(), cols()); }

  void pivot(Eigen::Index row, Eigen::Index col) {
    t_.row(row) /= t_(row, col);
    for (Eigen::Index i = 0; i <= rows(); ++i) {
      if (i == row) continue;
      const Scalar f = t_(i, col);
      if (f != Scalar(0)) t_.row(i) -= f * t_.row(row);
    }
    basis_[row] = static_cast<int>(col);
    ++iterations_;
  }

  // `allowed` masks the columns that may enter the basis.
  enum class Outcome { kOptimal, kUnbounded, kIterationLimit };
  Outcome run(const std::vector<bool>& allowed) {
    const auto m = rows();
    const auto n = cols();
    int degenerate_streak = 0;
    while (true) {
      if (iterations_ >= opts_.max_iterations) return Outcome::kIterationLimit;
      const bool bland = degenerate_streak >= opts_.degenerate_streak_for_bland;
      Eigen::Index enter = -1;
      Scalar best = -Scalar(opts_.optimality_tol);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (!allowed[j]) continue;
        const Scalar d = t_(m, j);
        if (d < best) {
          enter = j;
          if (bland) break;
          best = d;
        }
      }
      if (enter < 0) return Outcome::kOptimal;

      // Minimum ratio; ties go to the smallest basic index (Bland).
      Eigen::Index leave = -1;
      Scalar ratio = std::numeric_limits<Scalar>::infinity();
      for (Eigen::Index i = 0; i < m; ++i) {
        const Scalar a = t_(i, enter);
        if (a <= Scalar(opts_.pivot_tol)) continue;
        const Scalar r = std::max(t_(i, n), Scalar(0)) / a;
        const bool take =
            leave < 0 || r < ratio - Scalar(1e-12) ||
            (r <= ratio + Scalar(1e-12) && basis_[i] < basis_[leave]);
        if (take) {
          ratio = std::min(ratio, r);
          leave = i;
        }
      }
      if (leave < 0) return Outcome::kUnbounded;
      degenerate_streak = (ratio <= Scalar(opts_.feasibility_tol))
                              ? degenerate_streak + 1
                              : 0;
      pivot(leave, enter);
    }
  }

 private:
  LpOptions opts_;
  Matrix t_;
  std::vector<int> basis_;
  int iterations_ = 0;
};

}  // namespace lp_detail

template <typename Scalar>
LpSolution<Scalar> solve(const LinearProgram<Scalar>& lp,
                         const LpOptions& opts = {}) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  constexpr Scalar kInf = std::numeric_limits<Scalar>::infinity();

  const Eigen::Index n_user = lp.num_variables();
  const Eigen::Index m_user = static_cast<Eigen::Index>(lp.constraints.size());
  if (lp.lower.size() != n_user || lp.upper.size() != n_user) {
    throw std::invalid_argument("variable bounds do not match objective");
  }
  long nonzeros = 0;
  for (const auto& c : lp.constraints) {
    if (!c.coefficients.allFinite() || !std::isfinite(c.rhs)) {
      throw std::invalid_argument("constraint coefficients must be finite");
    }
    nonzeros += static_cast<long>((c.coefficients.array() != Scalar(0)).count());
  }
  if (nonzeros > opts.max_nonzeros) {
    throw std::invalid_argument("linear program exceeds the nonzero cap");
  }
  if (!lp.objective.allFinite()) {
    throw std::invalid_argument("objective coefficients must be finite");
  }

  // Substitute each user variable by nonnegative internal columns.
  struct Part {
    Eigen::Index col;
    Scalar sign;
  };
  std::vector<std::vector<Part>> parts(n_user);
  Vector offset = Vector::Zero(n_user);
  std::vector<std::pair<Eigen::Index, Scalar>> bound_rows;  // col, width
  Eigen::Index n_struct = 0;
  for (Eigen::Index j = 0; j < n_user; ++j) {
    const Scalar lo = lp.lower(j);
    const Scalar hi = lp.upper(j);
    if (lo > hi) {
      LpSolution<Scalar> out;
      out.status = LpStatus::kInfeasible;
      return out;
    }
    if (lo > -kInf) {
      offset(j) = lo;
      parts[j].push_back({n_struct, Scalar(1)});
      if (hi < kInf) bound_rows.emplace_back(n_struct, hi - lo);
      ++n_struct;
    } else if (hi < kInf) {
      offset(j) = hi;
      parts[j].push_back({n_struct++, Scalar(-1)});
    } else {
      parts[j].push_back({n_struct++, Scalar(1)});
      parts[j].push_back({n_struct++, Scalar(-1)});
    }
  }

  const Eigen::Index m = m_user + static_cast<Eigen::Index>(bound_rows.size());
  Matrix a_struct = Matrix::Zero(m, n_struct);
  Vector b(m);
  std::vector<Relation> rel(m);
  for (Eigen::Index i = 0; i < m_user; ++i) {
    const auto& c = lp.constraints[static_cast<std::size_t>(i)];
    Scalar shift = 0;
    for (Eigen::Index j = 0; j < n_user; ++j) {
      const Scalar aij = c.coefficients(j);
      if (aij == Scalar(0)) continue;
      shift += aij * offset(j);
      for (const auto& p : parts[j]) a_struct(i, p.col) += aij * p.sign;
    }
    b(i) = c.rhs - shift;
    rel[i] = c.relation;
  }
  for (std::size_t k = 0; k < bound_rows.size(); ++k) {
    const Eigen::Index i = m_user + static_cast<Eigen::Index>(k);
    a_struct(i, bound_rows[k].first) = 1;
    b(i) = bound_rows[k].second;
    rel[i] = Relation::kLessEqual;
  }

  // Internal objective: maximize.
  const Scalar sense_sign = lp.sense == Sense::kMaximize ? Scalar(1) : Scalar(-1);
  Vector c_struct = Vector::Zero(n_struct);
  for (Eigen::Index j = 0; j < n_user; ++j) {
    for (const auto& p : parts[j]) {
      c_struct(p.col) += sense_sign * lp.objective(j) * p.sign;
    }
  }

  // Slacks, sign normalization, artificials.
  Eigen::Index n_slack = 0;
  for (auto r : rel) n_slack += (r != Relation::kEqual);
  Vector row_sign = Vector::Ones(m);
  std::vector<Eigen::Index> slack_col(m, -1);
  {
    Eigen::Index s = n_struct;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (rel[i] != Relation::kEqual) slack_col[i] = s++;
      if (b(i) < 0) row_sign(i) = -1;
    }
  }
  std::vector<Eigen::Index> art_rows;
  for (Eigen::Index i = 0; i < m; ++i) {
    const Scalar slack_coef =
        rel[i] == Relation::kLessEqual ? Scalar(1)
        : rel[i] == Relation::kGreaterEqual ? Scalar(-1) : Scalar(0);
    if (slack_coef * row_sign(i) != Scalar(1)) art_rows.push_back(i);
  }
  const Eigen::Index n_art = static_cast<Eigen::Index>(art_rows.size());
  const Eigen::Index n_real = n_struct + n_slack;
  const Eigen::Index n_total = n_real + n_art;
  Matrix a = Matrix::Zero(m, n_total);
  a.leftCols(n_struct) = a_struct;
  std::vector<int> basis(m, -1);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (slack_col[i] >= 0) {
      a(i, slack_col[i]) = rel[i] == Relation::kLessEqual ? 1 : -1;
    }
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    a.row(i) *= row_sign(i);
    b(i) *= row_sign(i);
    if (slack_col[i] >= 0 && a(i, slack_col[i]) == Scalar(1)) {
      basis[i] = static_cast<int>(slack_col[i]);
    }
  }
  for (Eigen::Index k = 0; k < n_art; ++k) {
    a(art_rows[k], n_real + k) = 1;
    basis[art_rows[k]] = static_cast<int>(n_real + k);
  }

  lp_detail::Tableau<Scalar> tab(a, b, basis, opts);
  LpSolution<Scalar> out;

  if (n_art > 0) {
    Vector c1 = Vector::Zero(n_total);
    c1.tail(n_art).setConstant(-1);
    tab.set_costs(c1);
    std::vector<bool> allowed(n_total, true);
    auto res = tab.run(allowed);
    if (res == decltype(res)::kIterationLimit) {
      throw std::runtime_error("simplex iteration limit in phase 1");
    }
    const Scalar infeas = -tab.objective_value();
    if (infeas > Scalar(opts.feasibility_tol) * (1 + b.cwiseAbs().maxCoeff())) {
      out.status = LpStatus::kInfeasible;
      out.iterations = tab.iterations();
      return out;
    }
    // Drive zero-level artificials out of the basis where possible; rows
    // where that fails are redundant and keep their artificial at zero.
    for (Eigen::Index i = 0; i < m; ++i) {
      if (tab.basis()[i] < n_real) continue;
      Eigen::Index best = -1;
      Scalar best_abs = Scalar(opts.pivot_tol) * 100;
      for (Eigen::Index j = 0; j < n_real; ++j) {
        const Scalar v = std::abs(tab.entry(i, j));
        if (v > best_abs) {
          best_abs = v;
          best = j;
        }
      }
      if (best >= 0) tab.pivot(i, best);
    }
  }

  Vector c2 = Vector::Zero(n_total);
  c2.head(n_struct) = c_struct;
  tab.set_costs(c2);
  std::vector<bool> allowed(n_total, false);
  std::fill(allowed.begin(), allowed.begin() + n_real, true);
  auto res = tab.run(allowed);
  out.iterations = tab.iterations();
  if (res == decltype(res)::kIterationLimit) {
    throw std::runtime_error("simplex iteration limit in phase 2");
  }
  if (res == decltype(res)::kUnbounded) {
    out.status = LpStatus::kUnbounded;
    return out;
  }

  // Refactor the final basis for accurate primal and dual values.
  const auto& bas = tab.basis();
  Matrix basis_matrix(m, m);
  Vector c_basis(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    basis_matrix.col(i) = a.col(bas[i]);
    c_basis(i) = c2(bas[i]);
  }
  Vector x_internal = Vector::Zero(n_total);
  Vector y = Vector::Zero(m);
  if (m > 0) {
    Eigen::FullPivLU<Matrix> lu(basis_matrix);
    Vector xb = lu.solve(b);
    for (Eigen::Index i = 0; i < m; ++i) {
      x_internal(bas[i]) = std::max(xb(i), Scalar(0));
    }
    y = lu.transpose().solve(c_basis);
  }

  out.primal = offset;
  for (Eigen::Index j = 0; j < n_user; ++j) {
    for (const auto& p : parts[j]) out.primal(j) += p.sign * x_internal(p.col);
  }
  out.objective = lp.objective.dot(out.primal);
  out.dual.resize(m_user);
  for (Eigen::Index i = 0; i < m_user; ++i) {
    out.dual(i) = sense_sign * row_sign(i) * y(i);
  }
  out.status = LpStatus::kOptimal;
  return out;
}

extern template LpSolution<double> solve<double>(const LinearProgram<double>&,
                                                 const LpOptions&);

}  // namespace mnlkb

#endif  // MNLKB_LP_HPP_
