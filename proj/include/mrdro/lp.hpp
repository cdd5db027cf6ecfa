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

#pragma once

// Sparse linear programs and a bounded-variable revised simplex solver.
//
//   minimize    c^T x
//   subject to  a_i^T x  {<=, =, >=}  b_i      for every row i
//               lower_j <= x_j <= upper_j      (either side may be infinite)
//
// The solver is a two-phase primal simplex over an LU-factored basis with
// product-form updates. Phase 1 minimizes the sum of bound violations of the
// basic variables (equality rows get a logical variable fixed at zero, which
// plays the role of an artificial). Pricing is Dantzig's rule; after a run of
// degenerate pivots it falls back to Bland's rule until progress resumes.

#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mrdro::lp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Every numerical threshold used by the solver lives here.
struct Tolerances {
  // Primal feasibility of rows and bounds, absolute.
  static constexpr double kFeasibility = 1e-7;
  // Smallest |alpha_i| admitted in the ratio test.
  static constexpr double kPivot = 1e-9;
  // Pivots below this are treated as numerically unsafe; repeated ones end
  // the solve with kNumericalFailure.
  static constexpr double kTinyPivot = 1e-11;
  // Relative tolerance when comparing objective values.
  static constexpr double kObjectiveRelative = 1e-6;
  // Reduced-cost optimality threshold on the internally scaled problem.
  static constexpr double kOptimality = 1e-9;
};

enum class RowSense : std::uint8_t { kLessEqual, kEqual, kGreaterEqual };

struct Term {
  int var;
  double coef;
};

class LpProblem {
 public:
  LpProblem() = default;

  // Returns the new variable's index.
  int add_variable(double cost = 0.0, double lower = 0.0, double upper = kInfinity);
  // Adds `count` identical variables; returns the index of the first.
  int add_variables(int count, double cost = 0.0, double lower = 0.0, double upper = kInfinity);
  // Returns the new row's index. Duplicate variables within one row are summed.
  int add_row(std::span<const Term> terms, RowSense sense, double rhs);
  int add_row(std::initializer_list<Term> terms, RowSense sense, double rhs) {
    return add_row(std::span<const Term>(terms.begin(), terms.size()), sense, rhs);
  }

  void set_cost(int var, double cost) { cost_.at(var) = cost; }
  void set_bounds(int var, double lower, double upper);

  int num_vars() const { return static_cast<int>(cost_.size()); }
  int num_rows() const { return static_cast<int>(sense_.size()); }
  std::size_t num_nonzeros() const { return terms_.size(); }

  double cost(int var) const { return cost_[var]; }
  double lower(int var) const { return lower_[var]; }
  double upper(int var) const { return upper_[var]; }
  std::span<const double> costs() const { return cost_; }

  std::span<const Term> row(int r) const {
    return {terms_.data() + row_start_[r], terms_.data() + row_start_[r + 1]};
  }
  RowSense sense(int r) const { return sense_[r]; }
  double rhs(int r) const { return rhs_[r]; }

  // Empty result when every index is in range, no coefficient is NaN or
  // infinite, and every lower bound is <= its upper bound.
  std::optional<std::string> validate() const;

 private:
  std::vector<double> cost_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<std::size_t> row_start_{0};
  std::vector<Term> terms_;
  std::vector<RowSense> sense_;
  std::vector<double> rhs_;
};

enum class LpStatus : std::uint8_t {
  kOptimal,
  kInfeasible,
  kUnbounded,
  kNumericalFailure,
  kIterationLimit,
};

std::string_view to_string(LpStatus status);

enum class VarStatus : std::uint8_t { kBasic, kAtLower, kAtUpper, kFree, kFixed };

// Simplex basis: one status per structural variable and one per row
// (the row's logical variable). Exactly num_rows entries are kBasic.
struct Basis {
  std::vector<VarStatus> structural;
  std::vector<VarStatus> logical;

  bool empty() const { return structural.empty() && logical.empty(); }
};

struct LpSolution {
  LpStatus status = LpStatus::kNumericalFailure;
  std::vector<double> primal;
  double objective_value = 0.0;
  int iterations = 0;
  // Largest row or bound violation of `primal`, absolute.
  double max_violation = 0.0;
  // Final basis; can seed a later solve of a problem with the same shape.
  Basis basis;
};

struct SimplexOptions {
  // 0 picks a limit from the problem size.
  int max_iterations = 0;
  // Product-form updates between fresh LU factorizations.
  int refactor_interval = 100;
  // Consecutive degenerate pivots before switching to Bland's rule.
  int stall_limit = 50;
  // Geometric row/column scaling before the solve.
  bool scale = true;
  // Optional starting basis. Ignored when its shape does not match; singular
  // starting bases are repaired with logical columns.
  const Basis* warm_start = nullptr;
};

// Deterministic: the same problem and options give the same solution.
LpSolution solve_lp(const LpProblem& problem, const SimplexOptions& options = {});

// Largest absolute violation of any row or bound by `x`.
double max_violation(const LpProblem& problem, std::span<const double> x);

// c^T x
double objective_value(const LpProblem& problem, std::span<const double> x);

// Plain-text dump, one item per line, for cross-checking with other solvers:
//
//   minimize: 1 x0 -2 x3
//   r0: 1 x0 +1 x1 <= 4
//   bounds: 0 <= x0 <= inf
void write_lp_text(const LpProblem& problem, std::ostream& out);

}  // namespace mrdro::lp
