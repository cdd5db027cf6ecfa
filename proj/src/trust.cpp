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

#include "mrdro/trust.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mrdro/csv.hpp"
#include "mrdro/fusion.hpp"
#include "mrdro/kernels.hpp"

namespace mrdro {
namespace {

// Clamp a column into [kTrustMin, kTrustMax] and make it sum to one. Pinned
// entries stay at their bound while the free ones are rescaled; repeats
// until nothing moves (at most H rounds since each round pins one more).
void clamp_and_normalize(std::vector<double>& col) {
  const int n = static_cast<int>(col.size());
  for (double& v : col) v = std::clamp(v, kTrustMin, kTrustMax);
  double sum = 0.0;
  for (double v : col) sum += v;
  for (double& v : col) v /= sum;
  std::vector<char> pinned(n, 0);
  for (int round = 0; round < n; ++round) {
    bool moved = false;
    double pinned_sum = 0.0;
    double free_sum = 0.0;
    for (int h = 0; h < n; ++h) {
      if (col[h] < kTrustMin || col[h] > kTrustMax) {
        col[h] = std::clamp(col[h], kTrustMin, kTrustMax);
        pinned[h] = 1;
        moved = true;
      }
      (pinned[h] ? pinned_sum : free_sum) += col[h];
    }
    if (!moved || free_sum <= 0.0) break;
    const double scale = (1.0 - pinned_sum) / free_sum;
    for (int h = 0; h < n; ++h) {
      if (!pinned[h]) col[h] *= scale;
    }
  }
}

}  // namespace

double realized_loss(std::span<const double> x, std::span<const double> xi_true, const ProblemConfig& cfg) {
  if (x.size() != xi_true.size() || static_cast<int>(x.size()) != cfg.num_regions ||
      cfg.cost_unmet.size() != x.size() || cfg.cost_over.size() != x.size()) {
    throw DimensionError("realized_loss: allocation, demand and costs must all have K entries");
  }
  return kernels::newsvendor_loss(x, xi_true, cfg.cost_unmet, cfg.cost_over);
}

TrustMatrix with_entry(const TrustMatrix& trust, int h, int k, double value) {
  const int num_sources = trust.num_sources();
  Matrix m = trust.values();
  const double t = std::clamp(value, kTrustMin, kTrustMax);
  const double old_rest = 1.0 - trust(h, k);
  const double new_rest = 1.0 - t;
  m(h, k) = t;
  if (num_sources > 1) {
    for (int g = 0; g < num_sources; ++g) {
      if (g == h) continue;
      m(g, k) = old_rest > 0.0 ? trust(g, k) * (new_rest / old_rest) : new_rest / (num_sources - 1);
    }
  }
  return TrustMatrix(std::move(m));
}

EventEvaluation evaluate_event(const EventInstance& event, const TrustMatrix& trust, const ProblemConfig& cfg,
                               const SolveHints& hints) {
  const FusedDistribution fused = fuse_marginals(event.forecasts, trust);
  const ScenarioSet samples = sample_empirical(fused, cfg.num_samples, cfg.support_upper, event.seed);
  EventEvaluation out;
  out.solution = solve_dro(samples, cfg, hints);
  if (out.solution.status != SolveStatus::kOptimal) {
    throw SolverError("DRO model is " + std::string(to_string(out.solution.status)));
  }
  out.loss = realized_loss(out.solution.allocation, event.true_demand, cfg);
  return out;
}

GradientEstimate estimate_trust_gradient(const EventInstance& event, const TrustMatrix& trust,
                                         const ProblemConfig& cfg, int h, int k, double delta,
                                         const lp::Basis* warm_start) {
  if (!(delta > 0.0)) throw std::invalid_argument("estimate_trust_gradient: delta must be > 0");
  if (h < 0 || h >= trust.num_sources() || k < 0 || k >= trust.num_regions()) {
    throw DimensionError("estimate_trust_gradient: entry (" + std::to_string(h) + ", " + std::to_string(k) +
                         ") outside the trust matrix");
  }
  GradientEstimate g;
  g.trust_up = std::min(trust(h, k) + delta, kTrustMax);
  g.trust_down = std::max(trust(h, k) - delta, kTrustMin);
  SolveHints hints;
  hints.start = warm_start;
  const EventEvaluation up = evaluate_event(event, with_entry(trust, h, k, g.trust_up), cfg, hints);
  const EventEvaluation down = evaluate_event(event, with_entry(trust, h, k, g.trust_down), cfg, hints);
  g.loss_up = up.loss;
  g.loss_down = down.loss;
  g.value = (up.loss - down.loss) / (g.trust_up - g.trust_down);
  g.solve_time = up.solution.solve_time + down.solution.solve_time;
  g.iterations = up.solution.iterations + down.solution.iterations;
  return g;
}

TrustMatrix update_trust(const TrustMatrix& trust, const Matrix& gradients, double step_size) {
  const int num_sources = trust.num_sources();
  const int num_regions = trust.num_regions();
  if (static_cast<int>(gradients.rows()) != num_sources || static_cast<int>(gradients.cols()) != num_regions) {
    throw DimensionError("update_trust: gradient shape differs from the trust matrix");
  }
  Matrix next(num_sources, num_regions);
  std::vector<double> col(num_sources);
  for (int k = 0; k < num_regions; ++k) {
    for (int h = 0; h < num_sources; ++h) col[h] = trust(h, k) - step_size * gradients(h, k);
    clamp_and_normalize(col);
    for (int h = 0; h < num_sources; ++h) next(h, k) = col[h];
  }
  return TrustMatrix(std::move(next));
}

TrustTrajectory TrustTrajectory::prefix(int num_events) const {
  if (num_events < 0 || num_events > this->num_events()) {
    throw std::invalid_argument("TrustTrajectory::prefix: " + std::to_string(num_events) + " events requested");
  }
  TrustTrajectory out;
  out.snapshots.assign(snapshots.begin(), snapshots.begin() + num_events + 1);
  out.events.assign(events.begin(), events.begin() + num_events);
  return out;
}

TrustTrajectory run_trust_update(std::span<const EventInstance> events, const TrustMatrix& initial,
                                 const ProblemConfig& cfg, const TrustUpdateOptions& options) {
  require_valid(cfg);
  if (initial.num_sources() != cfg.num_sources || initial.num_regions() != cfg.num_regions) {
    throw DimensionError("run_trust_update: initial trust is not H x K");
  }
  if (!(options.loss_unit > 0.0)) throw std::invalid_argument("run_trust_update: loss_unit must be > 0");

  TrustTrajectory traj;
  traj.snapshots.push_back(initial);
  for (std::size_t m = 0; m < events.size(); ++m) {
    const TrustMatrix& trust = traj.snapshots.back();
    EventRecord rec;
    rec.gradient = Matrix(cfg.num_sources, cfg.num_regions);
    try {
      // The base solve starts from the model's own structural basis; the
      // perturbed solves start from the base optimum.
      lp::Basis base_basis;
      const EventEvaluation base = evaluate_event(events[m], trust, cfg, {nullptr, &base_basis});
      rec.loss = base.loss;
      rec.allocation = base.solution.allocation;
      rec.solve_time = base.solution.solve_time;
      rec.iterations = base.solution.iterations;
      rec.solves = 1;

      Matrix scaled(cfg.num_sources, cfg.num_regions);
      for (int h = 0; h < cfg.num_sources; ++h) {
        for (int k = 0; k < cfg.num_regions; ++k) {
          const GradientEstimate g = estimate_trust_gradient(events[m], trust, cfg, h, k, options.delta,
                                                             options.warm_start ? &base_basis : nullptr);
          rec.gradient(h, k) = g.value;
          scaled(h, k) = g.value / options.loss_unit;
          rec.solve_time += g.solve_time;
          rec.iterations += g.iterations;
          rec.solves += 2;
        }
      }
      traj.snapshots.push_back(update_trust(trust, scaled, options.step_size));
    } catch (const SolverError& e) {
      throw SolverError("event " + std::to_string(m + 1) + ": " + e.what());
    }
    traj.events.push_back(std::move(rec));
  }
  return traj;
}

bool StableIntervals::any() const {
  return std::any_of(cells.begin(), cells.end(), [](const auto& c) { return c.has_value(); });
}

bool StableIntervals::all() const {
  return std::all_of(cells.begin(), cells.end(), [](const auto& c) { return c.has_value(); });
}

StableIntervals detect_stable_interval(const TrustTrajectory& traj, int window, double spread_tol) {
  if (window < 2) throw std::invalid_argument("detect_stable_interval: window must be >= 2");
  StableIntervals out;
  if (traj.snapshots.empty()) return out;
  out.num_sources = traj.snapshots.front().num_sources();
  out.num_regions = traj.snapshots.front().num_regions();
  out.cells.assign(static_cast<std::size_t>(out.num_sources) * out.num_regions, std::nullopt);
  const int count = static_cast<int>(traj.snapshots.size());
  if (count < window) return out;
  for (int h = 0; h < out.num_sources; ++h) {
    for (int k = 0; k < out.num_regions; ++k) {
      double lo = traj.snapshots[count - window](h, k);
      double hi = lo;
      for (int s = count - window + 1; s < count; ++s) {
        lo = std::min(lo, traj.snapshots[s](h, k));
        hi = std::max(hi, traj.snapshots[s](h, k));
      }
      if (hi - lo <= spread_tol) out.cells[h * out.num_regions + k] = TrustInterval{lo, hi};
    }
  }
  return out;
}

std::vector<double> ideal_trust(const Matrix& relative_errors) {
  if (relative_errors.rows() != 2) throw std::invalid_argument("ideal_trust: needs exactly two sources");
  std::vector<double> out(relative_errors.cols());
  for (std::size_t k = 0; k < relative_errors.cols(); ++k) {
    const double r1 = relative_errors(0, k);
    const double r2 = relative_errors(1, k);
    if (r1 == r2) {
      if (r1 != 1.0) {
        throw std::invalid_argument("ideal_trust: sources share relative error " + format_double(r1) +
                                    " in region " + std::to_string(k + 1));
      }
      out[k] = 0.5;
    } else {
      out[k] = (1.0 - r2) / (r1 - r2);
    }
  }
  return out;
}

void write_trajectory_csv(const TrustTrajectory& traj, std::ostream& out) {
  CsvWriter csv(out);
  csv.header({"event", "source", "region", "trust", "loss"});
  for (std::size_t m = 0; m < traj.snapshots.size(); ++m) {
    const TrustMatrix& t = traj.snapshots[m];
    for (int h = 0; h < t.num_sources(); ++h) {
      for (int k = 0; k < t.num_regions(); ++k) {
        csv.field(static_cast<int>(m)).field(h + 1).field(k + 1).field(t(h, k));
        if (m == 0) {
          csv.empty_field();
        } else {
          csv.field(traj.events[m - 1].loss);
        }
        csv.end_row();
      }
    }
  }
}

}  // namespace mrdro
