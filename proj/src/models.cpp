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

#include "mrdro/models.hpp"

#include <algorithm>
#include <chrono>
#include <string>

#include "mrdro/kernels.hpp"

namespace mrdro {
namespace {

void check_shapes(const ScenarioSet& scenarios, const ProblemConfig& cfg, const char* who) {
  require_valid(cfg);
  if (scenarios.num_regions() != cfg.num_regions) {
    throw DimensionError(std::string(who) + ": scenarios have " + std::to_string(scenarios.num_regions()) +
                         " regions, config has " + std::to_string(cfg.num_regions));
  }
  if (scenarios.num_scenarios() < 1) throw DimensionError(std::string(who) + ": no scenarios");
}

void add_budget_row(lp::LpProblem& p, int num_regions, double budget) {
  std::vector<lp::Term> terms(num_regions);
  for (int k = 0; k < num_regions; ++k) terms[k] = {k, 1.0};
  p.add_row(terms, lp::RowSense::kLessEqual, budget);
}

}  // namespace

double LossPieces::value(int k, double x, double xi) const {
  double best = slope(0, k) * xi + intercept_per_unit(0, k) * x;
  for (int j = 1; j < kPieces; ++j) best = std::max(best, slope(j, k) * xi + intercept_per_unit(j, k) * x);
  return best;
}

LossPieces loss_pieces(const ProblemConfig& cfg) { return LossPieces{cfg.cost_unmet, cfg.cost_over}; }

SupportPolyhedron box_support(const ProblemConfig& cfg) { return SupportPolyhedron{cfg.support_upper}; }

lp::LpProblem build_saa_lp(const ScenarioSet& scenarios, const ProblemConfig& cfg) {
  check_shapes(scenarios, cfg, "build_saa_lp");
  const int num_regions = cfg.num_regions;
  const int n = scenarios.num_scenarios();
  const SaaLayout at{num_regions, n};
  const double inv_n = 1.0 / n;

  lp::LpProblem p;
  p.add_variables(num_regions);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < num_regions; ++k) p.add_variable(cfg.cost_unmet[k] * inv_n);
  }
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < num_regions; ++k) p.add_variable(cfg.cost_over[k] * inv_n);
  }
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < num_regions; ++k) {
      const double xi = scenarios(i, k);
      // u >= xi - x  and  o >= x - xi
      p.add_row({{at.unmet(i, k), 1.0}, {at.x(k), 1.0}}, lp::RowSense::kGreaterEqual, xi);
      p.add_row({{at.over(i, k), 1.0}, {at.x(k), -1.0}}, lp::RowSense::kGreaterEqual, -xi);
    }
  }
  add_budget_row(p, num_regions, cfg.budget);
  return p;
}

lp::LpProblem build_dro_lp(const ScenarioSet& scenarios, const ProblemConfig& cfg,
                           const SupportPolyhedron& support) {
  check_shapes(scenarios, cfg, "build_dro_lp");
  const int num_regions = cfg.num_regions;
  if (static_cast<int>(support.upper.size()) != num_regions) {
    throw DimensionError("build_dro_lp: support covers " + std::to_string(support.upper.size()) + " regions");
  }
  const int n = scenarios.num_scenarios();
  const DroLayout at{num_regions, n};
  const LossPieces pieces = loss_pieces(cfg);
  constexpr int kJ = LossPieces::kPieces;
  constexpr int kR = SupportPolyhedron::kRows;

  lp::LpProblem p;
  p.add_variables(num_regions);
  p.add_variable(cfg.wasserstein_radius);
  p.add_variables(n * num_regions, 1.0 / n, -lp::kInfinity, lp::kInfinity);
  p.add_variables(n * kJ * num_regions * kR);

  std::vector<lp::Term> terms;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < kJ; ++j) {
      for (int k = 0; k < num_regions; ++k) {
        const double xhat = scenarios(i, k);
        terms.clear();
        terms.push_back({at.x(k), pieces.intercept_per_unit(j, k)});
        for (int r = 0; r < kR; ++r) {
          const double slack = support.d(r, k) - SupportPolyhedron::kC[r] * xhat;
          if (slack != 0.0) terms.push_back({at.gamma(i, j, k, r), slack});
        }
        terms.push_back({at.s(i, k), -1.0});
        p.add_row(terms, lp::RowSense::kLessEqual, -pieces.slope(j, k) * xhat);
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < kJ; ++j) {
      for (int k = 0; k < num_regions; ++k) {
        const double a = pieces.slope(j, k);
        for (const double sign : {1.0, -1.0}) {
          terms.clear();
          for (int r = 0; r < kR; ++r) terms.push_back({at.gamma(i, j, k, r), sign * SupportPolyhedron::kC[r]});
          terms.push_back({at.lambda(), -1.0});
          p.add_row(terms, lp::RowSense::kLessEqual, sign * a);
        }
      }
    }
  }
  add_budget_row(p, num_regions, cfg.budget);
  return p;
}

namespace {

// Primal feasible starting bases at x = 0. Each structural column placed in
// the basis covers a row whose logical leaves it, so the matrix stays
// triangular.
//
// SAA: u_ik = xi_ik is basic in its shortfall row; every other row keeps its
// logical.
lp::Basis saa_start(const lp::LpProblem& p, int num_regions) {
  const int n = (p.num_vars() / num_regions - 1) / 2;
  const SaaLayout at{num_regions, n};
  lp::Basis b;
  b.structural.assign(p.num_vars(), lp::VarStatus::kAtLower);
  b.logical.assign(p.num_rows(), lp::VarStatus::kBasic);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < num_regions; ++k) {
      b.structural[at.unmet(i, k)] = lp::VarStatus::kBasic;
      b.logical[2 * (i * num_regions + k)] = lp::VarStatus::kAtLower;
    }
  }
  return b;
}

// DRO: gamma = 0, s_ik basic in the row of piece 0 (the shortfall piece,
// active at x = 0), lambda basic in the dual-norm row with the largest
// right-hand side bound on it.
lp::Basis dro_start(const lp::LpProblem& p, int num_regions) {
  constexpr int kJ = LossPieces::kPieces;
  const int per_scenario = num_regions * (1 + kJ * SupportPolyhedron::kRows);
  const int n = (p.num_vars() - num_regions - 1) / per_scenario;
  const DroLayout at{num_regions, n};
  lp::Basis b;
  b.structural.assign(p.num_vars(), lp::VarStatus::kAtLower);
  b.logical.assign(p.num_rows(), lp::VarStatus::kBasic);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < num_regions; ++k) {
      b.structural[at.s(i, k)] = lp::VarStatus::kBasic;
      b.logical[(i * kJ) * num_regions + k] = lp::VarStatus::kAtLower;
    }
  }
  const int first = n * kJ * num_regions;
  const int last = first + 2 * n * kJ * num_regions;
  int tight = first;
  for (int r = first; r < last; ++r) {
    if (p.rhs(r) < p.rhs(tight)) tight = r;
  }
  b.structural[at.lambda()] = lp::VarStatus::kBasic;
  b.logical[tight] = lp::VarStatus::kAtLower;
  return b;
}

}  // namespace

AllocationSolution solve_allocation(const lp::LpProblem& p, ModelKind kind, int num_regions,
                                    const SolveHints& hints) {
  lp::SimplexOptions options;
  lp::Basis crash;
  if (hints.start == nullptr) {
    crash = kind == ModelKind::kSaa ? saa_start(p, num_regions) : dro_start(p, num_regions);
    options.warm_start = &crash;
  } else {
    options.warm_start = hints.start;
  }
  const auto start = std::chrono::steady_clock::now();
  lp::LpSolution sol = lp::solve_lp(p, options);
  const auto stop = std::chrono::steady_clock::now();

  const char* name = kind == ModelKind::kSaa ? "SAA" : "DRO";
  if (sol.status == lp::LpStatus::kNumericalFailure || sol.status == lp::LpStatus::kIterationLimit) {
    throw SolverError(std::string(name) + " solve ended with " + std::string(lp::to_string(sol.status)) +
                      " after " + std::to_string(sol.iterations) + " iterations");
  }
  AllocationSolution out;
  out.status = sol.status == lp::LpStatus::kOptimal     ? SolveStatus::kOptimal
               : sol.status == lp::LpStatus::kInfeasible ? SolveStatus::kInfeasible
                                                         : SolveStatus::kUnbounded;
  out.allocation.assign(sol.primal.begin(), sol.primal.begin() + num_regions);
  // Clean solver noise on the bounds x >= 0.
  for (double& v : out.allocation) v = std::max(v, 0.0);
  out.objective = sol.objective_value;
  out.solve_time = std::chrono::duration<double>(stop - start).count();
  out.iterations = sol.iterations;
  if (hints.final_basis != nullptr) *hints.final_basis = std::move(sol.basis);
  return out;
}

AllocationSolution solve_saa(const ScenarioSet& scenarios, const ProblemConfig& cfg, const SolveHints& hints) {
  return solve_allocation(build_saa_lp(scenarios, cfg), ModelKind::kSaa, cfg.num_regions, hints);
}

AllocationSolution solve_dro(const ScenarioSet& scenarios, const ProblemConfig& cfg, const SolveHints& hints) {
  return solve_allocation(build_dro_lp(scenarios, cfg, box_support(cfg)), ModelKind::kDro, cfg.num_regions,
                          hints);
}

double worst_case_expectation(std::span<const double> x, const ScenarioSet& scenarios, const ProblemConfig& cfg,
                              const SupportPolyhedron& support) {
  if (static_cast<int>(x.size()) != cfg.num_regions) {
    throw DimensionError("worst_case_expectation: allocation has " + std::to_string(x.size()) + " entries");
  }
  lp::LpProblem p = build_dro_lp(scenarios, cfg, support);
  for (int k = 0; k < cfg.num_regions; ++k) p.set_bounds(k, x[k], x[k]);
  const lp::LpSolution sol = lp::solve_lp(p);
  if (sol.status != lp::LpStatus::kOptimal) {
    throw SolverError("worst_case_expectation: solve ended with " + std::string(lp::to_string(sol.status)));
  }
  return sol.objective_value;
}

double empirical_mean_loss(std::span<const double> x, const ScenarioSet& scenarios, const ProblemConfig& cfg) {
  if (static_cast<int>(x.size()) != cfg.num_regions || scenarios.num_regions() != cfg.num_regions) {
    throw DimensionError("empirical_mean_loss: allocation, scenarios and config disagree on K");
  }
  double total = 0.0;
  for (int i = 0; i < scenarios.num_scenarios(); ++i) {
    total += kernels::newsvendor_loss(x, scenarios.samples.row(i), cfg.cost_unmet, cfg.cost_over);
  }
  return total / scenarios.num_scenarios();
}

}  // namespace mrdro
