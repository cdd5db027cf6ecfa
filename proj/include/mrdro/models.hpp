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

// Allocation models over a scenario set.
//
// SAA:  min_x  (1/N) sum_i sum_k  c^u_k (xi_ik - x_k)^+ + c^o_k (x_k - xi_ik)^+
//       s.t.   sum_k x_k <= B,  x >= 0
//
// DRO (Wasserstein ball of radius eps, L1 transport cost, support box):
//   min   lambda * eps + (1/N) sum_i sum_k s_ik
//   s.t.  b_jk(x) + a_jk xhat_ik + gamma_ijk^T (d_k - C_k xhat_ik) <= s_ik
//         |C_k^T gamma_ijk - a_jk| <= lambda
//         sum_k x_k <= B,  x, lambda, gamma >= 0,  s free
// with loss pieces a_1k = c^u_k, b_1k = -c^u_k x_k and a_2k = -c^o_k,
// b_2k = c^o_k x_k, and the box 0 <= xi_k <= upper_k written as C_k = [1; -1],
// d_k = [upper_k; 0].

#include <array>
#include <span>
#include <stdexcept>
#include <vector>

#include "mrdro/lp.hpp"
#include "mrdro/types.hpp"

namespace mrdro {

// Thrown when the LP solver gives up (numerical failure or iteration limit).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ModelKind { kSaa, kDro };

// Per region, the two affine pieces of the newsvendor loss in xi for a given
// allocation x:  l_jk(xi) = slope(j,k) * xi + intercept_per_unit(j,k) * x_k.
struct LossPieces {
  static constexpr int kPieces = 2;

  std::vector<double> cost_unmet;
  std::vector<double> cost_over;

  int num_regions() const { return static_cast<int>(cost_unmet.size()); }
  double slope(int j, int k) const { return j == 0 ? cost_unmet[k] : -cost_over[k]; }
  double intercept_per_unit(int j, int k) const { return j == 0 ? -cost_unmet[k] : cost_over[k]; }
  // max_j l_jk(xi)
  double value(int k, double x, double xi) const;
};

LossPieces loss_pieces(const ProblemConfig& cfg);

// 0 <= xi_k <= upper_k as C_k xi_k <= d_k.
struct SupportPolyhedron {
  static constexpr int kRows = 2;
  static constexpr std::array<double, kRows> kC{1.0, -1.0};

  std::vector<double> upper;

  double d(int row, int k) const { return row == 0 ? upper[k] : 0.0; }
};

SupportPolyhedron box_support(const ProblemConfig& cfg);

// Column indices of the DRO LP.
struct DroLayout {
  int num_regions;
  int num_samples;

  int x(int k) const { return k; }
  int lambda() const { return num_regions; }
  int s(int i, int k) const { return num_regions + 1 + i * num_regions + k; }
  // row = 0 pairs with the upper support row, 1 with the lower one
  int gamma(int i, int j, int k, int row) const {
    return num_regions + 1 + num_samples * num_regions +
           ((i * LossPieces::kPieces + j) * num_regions + k) * SupportPolyhedron::kRows + row;
  }
  int num_vars() const {
    return num_regions + 1 + num_samples * num_regions * (1 + LossPieces::kPieces * SupportPolyhedron::kRows);
  }
};

// Column indices of the SAA LP.
struct SaaLayout {
  int num_regions;
  int num_samples;

  int x(int k) const { return k; }
  int unmet(int i, int k) const { return num_regions + i * num_regions + k; }
  int over(int i, int k) const { return num_regions + (num_samples + i) * num_regions + k; }
  int num_vars() const { return num_regions * (1 + 2 * num_samples); }
};

// Throw DimensionError when the scenario set and config disagree on K, and
// std::invalid_argument when the config is invalid.
lp::LpProblem build_saa_lp(const ScenarioSet& scenarios, const ProblemConfig& cfg);
lp::LpProblem build_dro_lp(const ScenarioSet& scenarios, const ProblemConfig& cfg,
                           const SupportPolyhedron& support);

// Optional simplex warm start in, final basis out.
struct SolveHints {
  const lp::Basis* start = nullptr;
  lp::Basis* final_basis = nullptr;
};

// Solves a model built by one of the builders above and extracts x. Throws
// SolverError on numerical failure or iteration limit; infeasible and
// unbounded verdicts come back as the status.
AllocationSolution solve_allocation(const lp::LpProblem& p, ModelKind kind, int num_regions,
                                    const SolveHints& hints = {});

// Build and solve in one call.
AllocationSolution solve_saa(const ScenarioSet& scenarios, const ProblemConfig& cfg,
                             const SolveHints& hints = {});
AllocationSolution solve_dro(const ScenarioSet& scenarios, const ProblemConfig& cfg,
                             const SolveHints& hints = {});

// sup over the Wasserstein ball of E[loss(x, xi)] for a fixed x, from the DRO
// LP with x pinned by its bounds.
double worst_case_expectation(std::span<const double> x, const ScenarioSet& scenarios,
                              const ProblemConfig& cfg, const SupportPolyhedron& support);

// (1/N) sum_i loss(x, xhat_i)
double empirical_mean_loss(std::span<const double> x, const ScenarioSet& scenarios,
                           const ProblemConfig& cfg);

}  // namespace mrdro
