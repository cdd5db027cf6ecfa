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

// Domain types shared by every module. All of them are plain values: copy
// them freely, share const instances between threads.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mrdro {

// Trust entries are kept inside [kTrustMin, kTrustMax] by every update.
inline constexpr double kTrustMin = 0.01;
inline constexpr double kTrustMax = 0.99;
// Allowed deviation of a trust column sum from 1.
inline constexpr double kTrustSumTolerance = 1e-9;
// Slack on the budget row when checking an allocation.
inline constexpr double kBudgetTolerance = 1e-9;

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Thrown when two inputs disagree on K, H or N.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Static decision environment: K regions served from one budget, H forecast
// sources, penalty costs, the demand support box and the Wasserstein radius.
struct ProblemConfig {
  int num_regions = 3;
  int num_sources = 2;
  std::vector<double> cost_unmet;     // per region, money per unit short
  std::vector<double> cost_over;      // per region, money per unit over-served
  double budget = 1000.0;
  std::vector<double> support_upper;  // demand support is [0, support_upper[k]]
  double wasserstein_radius = 0.01;
  int num_samples = 200;

  // K=3, H=2, c^u=5000, c^o=1000, B=1000, support [0,1000], eps=0.01, N=200.
  static ProblemConfig baseline();
  // Baseline costs and support replicated over `num_regions` regions.
  static ProblemConfig with_regions(int num_regions);
};

// Empty result means the configuration is usable; otherwise the message
// starts with the name of the first offending field.
std::optional<std::string> validate_config(const ProblemConfig& cfg);

// Throws std::invalid_argument carrying the validate_config message.
void require_valid(const ProblemConfig& cfg);

// H x K weights t(h, k) in [0, 1]; each region's column sums to one.
class TrustMatrix {
 public:
  // Throws std::invalid_argument if an entry leaves [0, 1] or a column sum
  // is off by more than kTrustSumTolerance.
  explicit TrustMatrix(Matrix values);

  static TrustMatrix uniform(int num_sources, int num_regions);
  // One row per source.
  static TrustMatrix from_rows(const std::vector<std::vector<double>>& rows);
  // All weight on `source` in every region.
  static TrustMatrix single_source(int num_sources, int num_regions, int source);

  int num_sources() const { return static_cast<int>(values_.rows()); }
  int num_regions() const { return static_cast<int>(values_.cols()); }
  double operator()(int h, int k) const { return values_(h, k); }
  const Matrix& values() const { return values_; }

  bool within_bounds(double lo = kTrustMin, double hi = kTrustMax) const;

  friend bool operator==(const TrustMatrix&, const TrustMatrix&) = default;

 private:
  Matrix values_;
};

// One source's Normal marginal forecast per region.
struct SourceForecast {
  int source_id = 0;
  std::vector<double> means;
  std::vector<double> stds;
};

// Independent Normal marginals per region (diagonal covariance).
struct FusedDistribution {
  std::vector<double> means;
  std::vector<double> stds;
};

// N x K demand scenarios, one scenario per row, each weighted 1/N.
struct ScenarioSet {
  Matrix samples;

  int num_scenarios() const { return static_cast<int>(samples.rows()); }
  int num_regions() const { return static_cast<int>(samples.cols()); }
  double operator()(int i, int k) const { return samples(i, k); }

  friend bool operator==(const ScenarioSet&, const ScenarioSet&) = default;
};

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded };

std::string_view to_string(SolveStatus status);

struct AllocationSolution {
  std::vector<double> allocation;
  double objective = 0.0;
  SolveStatus status = SolveStatus::kOptimal;
  double solve_time = 0.0;  // seconds spent inside the LP solver
  int iterations = 0;
};

}  // namespace mrdro
