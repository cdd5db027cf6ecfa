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

// Loss-driven trust updates. One event:
//   1. fuse the source forecasts with the current trust and sample N scenarios
//   2. solve the DRO model, observe the true demand, record the realized loss
//   3. for every (h, k), re-solve with t_hk nudged up and down (same samples'
//      noise) and take the central difference of realized losses
//   4. t <- t - w * gradient, clamp into [kTrustMin, kTrustMax], renormalize

#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "mrdro/lp.hpp"
#include "mrdro/models.hpp"
#include "mrdro/rng.hpp"
#include "mrdro/types.hpp"

namespace mrdro {

struct EventInstance {
  std::vector<double> true_demand;
  std::vector<SourceForecast> forecasts;
  RngSeed seed;  // sampling seed shared by every solve of this event
};

// sum_k c^u_k (xi_k - x_k)^+ + c^o_k (x_k - xi_k)^+
double realized_loss(std::span<const double> x, std::span<const double> xi_true, const ProblemConfig& cfg);

// Sets t(h, k) to `value` clamped into [kTrustMin, kTrustMax] and rescales
// the other sources of column k proportionally so the column still sums to
// one (equal shares if they were all zero).
TrustMatrix with_entry(const TrustMatrix& trust, int h, int k, double value);

struct EventEvaluation {
  AllocationSolution solution;
  double loss = 0.0;
};

// Steps 1 and 2 for one trust matrix.
EventEvaluation evaluate_event(const EventInstance& event, const TrustMatrix& trust, const ProblemConfig& cfg,
                               const SolveHints& hints = {});

struct GradientEstimate {
  double value = 0.0;  // money per unit of trust
  double loss_up = 0.0;
  double loss_down = 0.0;
  double trust_up = 0.0;
  double trust_down = 0.0;
  double solve_time = 0.0;
  int iterations = 0;
};

// (L(t_hk + delta) - L(t_hk - delta)) / (t_up - t_down), where the probes
// are clamped into the trust bounds and the denominator uses the clamped
// values. `warm_start` seeds both solves.
GradientEstimate estimate_trust_gradient(const EventInstance& event, const TrustMatrix& trust,
                                         const ProblemConfig& cfg, int h, int k, double delta,
                                         const lp::Basis* warm_start = nullptr);

// t - w * g, clamped into [kTrustMin, kTrustMax], columns divided by their
// sums. With more than two sources the division can push an entry back out
// of bounds; those entries are pinned and the rest rescaled until all fit.
TrustMatrix update_trust(const TrustMatrix& trust, const Matrix& gradients, double step_size);

struct TrustUpdateOptions {
  double step_size = 1e-3;
  double delta = 1e-3;
  // Gradients are taken of loss / loss_unit. Losses are reported in
  // thousands of dollars, so the default step acts on k$ per unit trust.
  double loss_unit = 1000.0;
  // Start the perturbed solves of an event from its base optimum.
  bool warm_start = true;
};

struct EventRecord {
  double loss = 0.0;
  std::vector<double> allocation;
  Matrix gradient;          // H x K, money per unit of trust
  double solve_time = 0.0;  // seconds inside the LP solver, all solves of the event
  int solves = 0;
  int iterations = 0;
};

struct TrustTrajectory {
  std::vector<TrustMatrix> snapshots;  // M + 1 entries, snapshot 0 is the initial trust
  std::vector<EventRecord> events;     // M entries

  int num_events() const { return static_cast<int>(events.size()); }
  // First `num_events` events and their snapshots.
  TrustTrajectory prefix(int num_events) const;
};

// Throws SolverError naming the event index when a solve fails.
TrustTrajectory run_trust_update(std::span<const EventInstance> events, const TrustMatrix& initial,
                                 const ProblemConfig& cfg, const TrustUpdateOptions& options = {});

struct TrustInterval {
  double lo;
  double hi;
  double mid() const { return 0.5 * (lo + hi); }
};

// H x K grid of optional intervals.
struct StableIntervals {
  int num_sources = 0;
  int num_regions = 0;
  std::vector<std::optional<TrustInterval>> cells;

  const std::optional<TrustInterval>& at(int h, int k) const { return cells[h * num_regions + k]; }
  bool any() const;
  bool all() const;
};

inline constexpr int kDefaultStableWindow = 10;
inline constexpr double kDefaultStableSpread = 0.12;

// For each (h, k): [min, max] over the last `window` snapshots when
// max - min <= spread_tol, otherwise empty. Empty everywhere when the
// trajectory has fewer than `window` snapshots. Throws std::invalid_argument
// for window < 2.
StableIntervals detect_stable_interval(const TrustTrajectory& traj, int window = kDefaultStableWindow,
                                       double spread_tol = kDefaultStableSpread);

// Two sources: the source-1 weight t solving t r_1k + (1 - t) r_2k = 1 for
// each region. 0.5 when r_1k = r_2k = 1; throws std::invalid_argument for
// other ties or when r does not have two rows.
std::vector<double> ideal_trust(const Matrix& relative_errors);

// CSV columns: event,source,region,trust,loss. Sources and regions count
// from 1; loss is empty on the initial snapshot.
void write_trajectory_csv(const TrustTrajectory& traj, std::ostream& out);

}  // namespace mrdro
