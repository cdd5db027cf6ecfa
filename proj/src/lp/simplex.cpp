// Copyright 2026 The MR-DRO Authors
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

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lp/basis_factor.hpp"
#include "mrdro/kernels.hpp"
#include "mrdro/lp.hpp"

namespace mrdro::lp {
namespace {

using internal::BasisFactor;
using internal::SparseColumn;

// Pivot steps shorter than this count as degenerate.
constexpr double kDegenerateStep = 1e-12;
// Scaling passes (alternating rows and columns).
constexpr int kScalePasses = 4;
// Refactorize early when the eta file grows past this multiple of the LU size.
constexpr double kEtaGrowth = 3.0;
// Basis repairs tolerated after the initial factorization.
constexpr int kMaxRepairs = 3;

double power_of_two(double v) { return std::exp2(std::round(std::log2(v))); }

VarStatus default_status(double lower, double upper) {
  if (lower == upper) return VarStatus::kFixed;
  if (std::isfinite(lower)) return VarStatus::kAtLower;
  if (std::isfinite(upper)) return VarStatus::kAtUpper;
  return VarStatus::kFree;
}

double nonbasic_value(VarStatus s, double lower, double upper) {
  switch (s) {
    case VarStatus::kAtLower:
    case VarStatus::kFixed:
      return lower;
    case VarStatus::kAtUpper:
      return upper;
    default:
      return 0.0;
  }
}

// Working state of one solve. Internally every row i reads
//   sum_j a_ij x_j - r_i = 0
// where the logical r_i carries the row's bounds, and all data are scaled:
// a'_ij = R_i a_ij C_j, x'_j = x_j / C_j, r'_i = R_i r_i.
class Simplex {
 public:
  Simplex(const LpProblem& problem, const SimplexOptions& options)
      : problem_(problem), options_(options), n_(problem.num_vars()), m_(problem.num_rows()) {}

  LpSolution run();

 private:
  enum class Pricing { kDantzig, kBland };

  void build_columns();
  void scale();
  void set_bounds_and_costs();
  void init_basis();
  bool refactor();
  void compute_primal();
  double value(int j) const { return pos_of_[j] >= 0 ? xb_[pos_of_[j]] : x_[j]; }
  LpSolution finish(LpStatus status);

  const LpProblem& problem_;
  const SimplexOptions& options_;
  int n_;
  int m_;

  // Scaled structural columns (CSC).
  std::vector<int> col_start_;
  std::vector<int> col_row_;
  std::vector<double> col_val_;
  std::vector<double> row_scale_;
  std::vector<double> col_scale_;
  double obj_scale_ = 1.0;

  // Indexed by variable: structurals 0..n-1, logicals n..n+m-1.
  std::vector<double> cost_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<double> x_;
  std::vector<VarStatus> status_;
  std::vector<int> pos_of_;

  // Indexed by basis position.
  std::vector<int> head_;
  std::vector<double> xb_;

  BasisFactor factor_;
  std::size_t factor_size_ = 0;
  int repairs_ = 0;
  int iterations_ = 0;
};

void Simplex::build_columns() {
  col_start_.assign(n_ + 1, 0);
  for (int r = 0; r < m_; ++r) {
    for (const Term& t : problem_.row(r)) ++col_start_[t.var + 1];
  }
  for (int j = 0; j < n_; ++j) col_start_[j + 1] += col_start_[j];
  col_row_.assign(col_start_[n_], 0);
  col_val_.assign(col_start_[n_], 0.0);
  std::vector<int> fill(col_start_.begin(), col_start_.end() - 1);
  for (int r = 0; r < m_; ++r) {
    for (const Term& t : problem_.row(r)) {
      col_row_[fill[t.var]] = r;
      col_val_[fill[t.var]] = t.coef;
      ++fill[t.var];
    }
  }
}

void Simplex::scale() {
  row_scale_.assign(m_, 1.0);
  col_scale_.assign(n_, 1.0);
  if (!options_.scale) return;
  std::vector<double> lo(m_), hi(m_);
  for (int pass = 0; pass < kScalePasses; ++pass) {
    std::fill(lo.begin(), lo.end(), std::numeric_limits<double>::infinity());
    std::fill(hi.begin(), hi.end(), 0.0);
    for (int j = 0; j < n_; ++j) {
      for (int s = col_start_[j]; s < col_start_[j + 1]; ++s) {
        const double v = std::abs(col_val_[s]) * col_scale_[j];
        if (v == 0.0) continue;
        lo[col_row_[s]] = std::min(lo[col_row_[s]], v);
        hi[col_row_[s]] = std::max(hi[col_row_[s]], v);
      }
    }
    for (int r = 0; r < m_; ++r) {
      row_scale_[r] = hi[r] > 0.0 ? power_of_two(1.0 / std::sqrt(lo[r] * hi[r])) : 1.0;
    }
    for (int j = 0; j < n_; ++j) {
      double cmin = std::numeric_limits<double>::infinity();
      double cmax = 0.0;
      for (int s = col_start_[j]; s < col_start_[j + 1]; ++s) {
        const double v = std::abs(col_val_[s]) * row_scale_[col_row_[s]];
        if (v == 0.0) continue;
        cmin = std::min(cmin, v);
        cmax = std::max(cmax, v);
      }
      col_scale_[j] = cmax > 0.0 ? power_of_two(1.0 / std::sqrt(cmin * cmax)) : 1.0;
    }
  }
  for (int j = 0; j < n_; ++j) {
    for (int s = col_start_[j]; s < col_start_[j + 1]; ++s) {
      col_val_[s] *= row_scale_[col_row_[s]] * col_scale_[j];
    }
  }
}

void Simplex::set_bounds_and_costs() {
  const int total = n_ + m_;
  cost_.assign(total, 0.0);
  lower_.assign(total, 0.0);
  upper_.assign(total, 0.0);
  double cmax = 0.0;
  for (int j = 0; j < n_; ++j) {
    cost_[j] = problem_.cost(j) * col_scale_[j];
    cmax = std::max(cmax, std::abs(cost_[j]));
    lower_[j] = problem_.lower(j) / col_scale_[j];
    upper_[j] = problem_.upper(j) / col_scale_[j];
  }
  obj_scale_ = (options_.scale && cmax > 0.0) ? power_of_two(1.0 / cmax) : 1.0;
  for (int j = 0; j < n_; ++j) cost_[j] *= obj_scale_;
  for (int r = 0; r < m_; ++r) {
    const double b = problem_.rhs(r) * row_scale_[r];
    switch (problem_.sense(r)) {
      case RowSense::kLessEqual:
        lower_[n_ + r] = -kInfinity;
        upper_[n_ + r] = b;
        break;
      case RowSense::kGreaterEqual:
        lower_[n_ + r] = b;
        upper_[n_ + r] = kInfinity;
        break;
      case RowSense::kEqual:
        lower_[n_ + r] = b;
        upper_[n_ + r] = b;
        break;
    }
  }
}

void Simplex::init_basis() {
  const int total = n_ + m_;
  status_.assign(total, VarStatus::kAtLower);
  pos_of_.assign(total, -1);
  head_.assign(m_, -1);
  x_.assign(total, 0.0);
  xb_.assign(m_, 0.0);

  const Basis* warm = options_.warm_start;
  bool use_warm = warm != nullptr && static_cast<int>(warm->structural.size()) == n_ &&
                  static_cast<int>(warm->logical.size()) == m_;
  if (use_warm) {
    const auto basic = std::count(warm->structural.begin(), warm->structural.end(), VarStatus::kBasic) +
                       std::count(warm->logical.begin(), warm->logical.end(), VarStatus::kBasic);
    use_warm = basic == m_;
  }

  if (use_warm) {
    int pos = 0;
    for (int j = 0; j < total; ++j) {
      VarStatus s = j < n_ ? warm->structural[j] : warm->logical[j - n_];
      if (s == VarStatus::kBasic) {
        head_[pos] = j;
        pos_of_[j] = pos;
        ++pos;
      } else {
        // Keep the requested side only when that bound exists.
        const bool ok = (s == VarStatus::kAtLower && std::isfinite(lower_[j])) ||
                        (s == VarStatus::kAtUpper && std::isfinite(upper_[j])) ||
                        (s == VarStatus::kFixed && lower_[j] == upper_[j]) ||
                        (s == VarStatus::kFree && !std::isfinite(lower_[j]) && !std::isfinite(upper_[j]));
        if (!ok) s = default_status(lower_[j], upper_[j]);
        if (lower_[j] == upper_[j]) s = VarStatus::kFixed;
      }
      status_[j] = s;
    }
  } else {
    for (int j = 0; j < n_; ++j) status_[j] = default_status(lower_[j], upper_[j]);
    for (int r = 0; r < m_; ++r) {
      status_[n_ + r] = VarStatus::kBasic;
      head_[r] = n_ + r;
      pos_of_[n_ + r] = r;
    }
  }
  for (int j = 0; j < total; ++j) {
    if (status_[j] != VarStatus::kBasic) x_[j] = nonbasic_value(status_[j], lower_[j], upper_[j]);
  }
}

bool Simplex::refactor() {
  for (int attempt = 0; attempt <= kMaxRepairs; ++attempt) {
    std::vector<SparseColumn> columns(m_);
    for (int pos = 0; pos < m_; ++pos) {
      const int j = head_[pos];
      if (j < n_) {
        columns[pos].rows.assign(col_row_.begin() + col_start_[j], col_row_.begin() + col_start_[j + 1]);
        columns[pos].values.assign(col_val_.begin() + col_start_[j], col_val_.begin() + col_start_[j + 1]);
      } else {
        columns[pos].rows = {j - n_};
        columns[pos].values = {-1.0};
      }
    }
    const BasisFactor::Deficiency def = factor_.factorize(m_, columns);
    factor_size_ = factor_.factor_nonzeros();
    if (def.empty()) return true;
    // Swap each dependent column for the logical of a row left without a pivot.
    ++repairs_;
    if (repairs_ > kMaxRepairs + 1) return false;
    for (std::size_t t = 0; t < def.positions.size() && t < def.rows.size(); ++t) {
      const int pos = def.positions[t];
      const int out = head_[pos];
      const int in = n_ + def.rows[t];
      status_[out] = default_status(lower_[out], upper_[out]);
      x_[out] = nonbasic_value(status_[out], lower_[out], upper_[out]);
      pos_of_[out] = -1;
      head_[pos] = in;
      pos_of_[in] = pos;
      status_[in] = VarStatus::kBasic;
    }
  }
  return false;
}

void Simplex::compute_primal() {
  std::vector<double> rhs(m_, 0.0);
  for (int j = 0; j < n_; ++j) {
    if (status_[j] == VarStatus::kBasic || x_[j] == 0.0) continue;
    for (int s = col_start_[j]; s < col_start_[j + 1]; ++s) rhs[col_row_[s]] -= col_val_[s] * x_[j];
  }
  for (int r = 0; r < m_; ++r) {
    if (status_[n_ + r] != VarStatus::kBasic) rhs[r] += x_[n_ + r];
  }
  factor_.ftran(rhs);
  xb_ = std::move(rhs);
}

LpSolution Simplex::finish(LpStatus status) {
  LpSolution sol;
  sol.status = status;
  sol.iterations = iterations_;
  sol.primal.assign(n_, 0.0);
  for (int j = 0; j < n_; ++j) sol.primal[j] = value(j) * col_scale_[j];
  sol.objective_value = objective_value(problem_, sol.primal);
  sol.max_violation = max_violation(problem_, sol.primal);
  sol.basis.structural.assign(status_.begin(), status_.begin() + n_);
  sol.basis.logical.assign(status_.begin() + n_, status_.end());
  return sol;
}

LpSolution Simplex::run() {
  if (auto err = problem_.validate()) throw std::invalid_argument("solve_lp: " + *err);
  build_columns();
  scale();
  set_bounds_and_costs();
  init_basis();
  if (!refactor()) return finish(LpStatus::kNumericalFailure);
  compute_primal();

  const int total = n_ + m_;
  const int max_iterations = options_.max_iterations > 0 ? options_.max_iterations : 20 * total + 10000;
  std::vector<double> basic_cost(m_);
  std::vector<double> duals;
  std::vector<double> alpha;
  Pricing pricing = Pricing::kDantzig;
  int degenerate_run = 0;
  bool fresh = true;  // factorization and primal values recomputed since the last pivot

  while (true) {
    if (iterations_ >= max_iterations) return finish(LpStatus::kIterationLimit);
    if (factor_.num_updates() >= options_.refactor_interval ||
        static_cast<double>(factor_.eta_nonzeros()) > kEtaGrowth * static_cast<double>(factor_size_ + m_)) {
      if (!refactor()) return finish(LpStatus::kNumericalFailure);
      compute_primal();
      fresh = true;
    }

    // Phase 1 costs penalize bound violations of basic variables.
    bool phase1 = false;
    for (int pos = 0; pos < m_; ++pos) {
      const int j = head_[pos];
      if (xb_[pos] < lower_[j] - Tolerances::kFeasibility) {
        basic_cost[pos] = -1.0;
        phase1 = true;
      } else if (xb_[pos] > upper_[j] + Tolerances::kFeasibility) {
        basic_cost[pos] = 1.0;
        phase1 = true;
      } else {
        basic_cost[pos] = 0.0;
      }
    }
    if (!phase1) {
      for (int pos = 0; pos < m_; ++pos) basic_cost[pos] = cost_[head_[pos]];
    }
    duals = basic_cost;
    factor_.btran(duals);

    // Pricing.
    int entering = -1;
    int direction = 0;
    double best = 0.0;
    for (int j = 0; j < total; ++j) {
      const VarStatus s = status_[j];
      if (s == VarStatus::kBasic || s == VarStatus::kFixed) continue;
      double d;
      if (j < n_) {
        d = phase1 ? 0.0 : cost_[j];
        for (int t = col_start_[j]; t < col_start_[j + 1]; ++t) d -= duals[col_row_[t]] * col_val_[t];
      } else {
        d = duals[j - n_];
      }
      int dir = 0;
      if (d < -Tolerances::kOptimality && (s == VarStatus::kAtLower || s == VarStatus::kFree)) {
        dir = 1;
      } else if (d > Tolerances::kOptimality && (s == VarStatus::kAtUpper || s == VarStatus::kFree)) {
        dir = -1;
      }
      if (dir == 0) continue;
      if (pricing == Pricing::kBland) {
        entering = j;
        direction = dir;
        break;
      }
      if (std::abs(d) > best) {
        best = std::abs(d);
        entering = j;
        direction = dir;
      }
    }

    if (entering < 0) {
      if (!fresh) {
        if (!refactor()) return finish(LpStatus::kNumericalFailure);
        compute_primal();
        fresh = true;
        continue;
      }
      if (phase1) return finish(LpStatus::kInfeasible);
      return finish(LpStatus::kOptimal);
    }

    // Entering column in basis coordinates.
    alpha.assign(m_, 0.0);
    if (entering < n_) {
      for (int t = col_start_[entering]; t < col_start_[entering + 1]; ++t) alpha[col_row_[t]] = col_val_[t];
    } else {
      alpha[entering - n_] = -1.0;
    }
    factor_.ftran(alpha);

    // Ratio test. Basic variable at position p moves at rate -direction * alpha[p].
    const double flip_range = upper_[entering] - lower_[entering];
    int leave_pos = -1;
    double theta = kInfinity;
    double leave_value = 0.0;
    auto limit = [&](int pos, double tol, double& target) -> double {
      const int j = head_[pos];
      const double rate = -direction * alpha[pos];
      const double v = xb_[pos];
      if (phase1 && v < lower_[j] - Tolerances::kFeasibility) {
        if (rate <= 0.0) return kInfinity;
        target = lower_[j];
        return (lower_[j] - v) / rate;
      }
      if (phase1 && v > upper_[j] + Tolerances::kFeasibility) {
        if (rate >= 0.0) return kInfinity;
        target = upper_[j];
        return (upper_[j] - v) / rate;
      }
      if (rate < 0.0 && std::isfinite(lower_[j])) {
        target = lower_[j];
        return std::max(v - lower_[j] + tol, 0.0) / -rate;
      }
      if (rate > 0.0 && std::isfinite(upper_[j])) {
        target = upper_[j];
        return std::max(upper_[j] - v + tol, 0.0) / rate;
      }
      return kInfinity;
    };

    if (pricing == Pricing::kBland) {
      int leave_var = total;
      for (int pos = 0; pos < m_; ++pos) {
        if (std::abs(alpha[pos]) <= Tolerances::kPivot) continue;
        double target = 0.0;
        const double r = limit(pos, 0.0, target);
        if (!std::isfinite(r)) continue;
        const bool tie = std::isfinite(theta) && std::abs(r - theta) <= kDegenerateStep * (1.0 + theta);
        if (r < theta && !tie) {
          theta = r;
          leave_pos = pos;
          leave_var = head_[pos];
          leave_value = target;
        } else if (tie && head_[pos] < leave_var) {
          leave_pos = pos;
          leave_var = head_[pos];
          leave_value = target;
        }
      }
    } else {
      // Harris: bound on the step with tolerance-relaxed bounds, then the
      // largest pivot among rows whose exact ratio fits under it.
      double relaxed = kInfinity;
      for (int pos = 0; pos < m_; ++pos) {
        if (std::abs(alpha[pos]) <= Tolerances::kPivot) continue;
        double target = 0.0;
        relaxed = std::min(relaxed, limit(pos, Tolerances::kFeasibility, target));
      }
      if (std::isfinite(relaxed)) {
        double best_pivot = 0.0;
        for (int pos = 0; pos < m_; ++pos) {
          const double a = std::abs(alpha[pos]);
          if (a <= Tolerances::kPivot) continue;
          double target = 0.0;
          const double r = limit(pos, 0.0, target);
          if (r <= relaxed && a > best_pivot) {
            best_pivot = a;
            leave_pos = pos;
            theta = r;
            leave_value = target;
          }
        }
      }
    }

    const bool flip = std::isfinite(flip_range) && (leave_pos < 0 || flip_range <= theta);
    if (leave_pos < 0 && !flip) {
      if (phase1) return finish(LpStatus::kNumericalFailure);
      return finish(LpStatus::kUnbounded);
    }
    if (flip) theta = flip_range;

    ++iterations_;
    fresh = false;
    kernels::axpy(-direction * theta, alpha, xb_);
    if (flip) {
      status_[entering] = direction > 0 ? VarStatus::kAtUpper : VarStatus::kAtLower;
      x_[entering] = direction > 0 ? upper_[entering] : lower_[entering];
    } else {
      const int leaving = head_[leave_pos];
      const double entering_value = x_[entering] + direction * theta;
      status_[leaving] = lower_[leaving] == upper_[leaving] ? VarStatus::kFixed
                         : leave_value == lower_[leaving]    ? VarStatus::kAtLower
                                                             : VarStatus::kAtUpper;
      x_[leaving] = leave_value;
      pos_of_[leaving] = -1;
      head_[leave_pos] = entering;
      pos_of_[entering] = leave_pos;
      status_[entering] = VarStatus::kBasic;
      xb_[leave_pos] = entering_value;
      factor_.update(leave_pos, alpha);
    }

    if (theta <= kDegenerateStep) {
      if (++degenerate_run >= options_.stall_limit) pricing = Pricing::kBland;
    } else {
      degenerate_run = 0;
      pricing = Pricing::kDantzig;
    }
  }
}

}  // namespace

LpSolution solve_lp(const LpProblem& problem, const SimplexOptions& options) {
  Simplex simplex(problem, options);
  return simplex.run();
}

}  // namespace mrdro::lp
