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

#include "mrdro/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "mrdro/csv.hpp"
#include "mrdro/fusion.hpp"
#include "mrdro/models.hpp"

namespace mrdro {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

constexpr double kReportUnit = 1000.0;  // tables report thousands of dollars

double shown_time(double seconds, const ExperimentConfig& cfg) { return cfg.record_timings ? seconds : 0.0; }

void write_interval(CsvWriter& csv, const std::optional<TrustInterval>& iv) {
  if (iv) {
    csv.field(iv->lo).field(iv->hi);
  } else {
    csv.field("N/A").field("N/A");
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::baseline() {
  ExperimentConfig cfg;
  cfg.relative_errors = cycled_relative_errors(3);
  return cfg;
}

Matrix cycled_relative_errors(int num_regions) {
  static constexpr double kPatterns[2][3] = {{1.1, 0.6, 1.1}, {0.7, 1.2, 0.3}};
  Matrix r(2, num_regions);
  for (int h = 0; h < 2; ++h) {
    for (int k = 0; k < num_regions; ++k) r(h, k) = kPatterns[h][k % 3];
  }
  return r;
}

TrustMatrix baseline_trust_star() { return TrustMatrix::from_rows({{0.58, 0.43, 0.72}, {0.42, 0.57, 0.28}}); }

std::optional<std::string> validate_experiment(const ExperimentConfig& cfg) {
  if (auto err = validate_config(cfg.problem)) return err;
  const auto& p = cfg.problem;
  if (static_cast<int>(cfg.relative_errors.rows()) != p.num_sources ||
      static_cast<int>(cfg.relative_errors.cols()) != p.num_regions) {
    return "relative_errors: expected " + std::to_string(p.num_sources) + " x " + std::to_string(p.num_regions) +
           ", got " + std::to_string(cfg.relative_errors.rows()) + " x " + std::to_string(cfg.relative_errors.cols());
  }
  for (double r : cfg.relative_errors.data()) {
    if (!(r > 0.0) || !std::isfinite(r)) return "relative_errors: entries must be positive";
  }
  if (!(cfg.sigma_ratio > 0.0) || !std::isfinite(cfg.sigma_ratio)) return "sigma_ratio: must be positive";
  if (cfg.truth_lo < 0 || cfg.truth_lo > cfg.truth_hi) return "truth_range: need 0 <= lo <= hi";
  if (cfg.num_events < 0) return "num_events: must be >= 0";
  if (cfg.num_oos_events < 1) return "num_oos_events: must be >= 1";
  if (!(cfg.step_size > 0.0)) return "step_size: must be positive";
  if (!(cfg.delta > 0.0) || cfg.delta >= 0.5) return "delta: must lie in (0, 0.5)";
  if (!(cfg.loss_unit > 0.0)) return "loss_unit: must be positive";
  if (!(cfg.initial_trust >= kTrustMin && cfg.initial_trust <= kTrustMax)) {
    return "initial_trust: must lie in [0.01, 0.99]";
  }
  if (cfg.stable_window < 2) return "stable_window: must be >= 2";
  if (!(cfg.stable_spread >= 0.0)) return "stable_spread: must be >= 0";
  if (cfg.seeds.empty()) return "seeds: need at least one";
  for (int k = 0; k < p.num_regions; ++k) {
    for (int h = 0; h < p.num_sources; ++h) {
      if (cfg.truth_hi * cfg.relative_errors(h, k) > p.support_upper[k]) {
        return "support_upper: forecast means can exceed the support in region " + std::to_string(k + 1);
      }
    }
  }
  if (cfg.trust_star && (cfg.trust_star->num_sources() != p.num_sources ||
                         cfg.trust_star->num_regions() != p.num_regions)) {
    return "trust_star: expected " + std::to_string(p.num_sources) + " x " + std::to_string(p.num_regions);
  }
  return std::nullopt;
}

std::vector<double> generate_truth(int lo, int hi, int num_regions, RngSeed seed) {
  if (lo > hi) throw std::invalid_argument("generate_truth: empty range");
  Rng rng(seed);
  std::vector<double> out(num_regions);
  for (double& v : out) v = static_cast<double>(rng.uniform_int(lo, hi));
  return out;
}

std::vector<SourceForecast> make_forecasts(std::span<const double> mu_true, const Matrix& relative_errors,
                                           double sigma_ratio) {
  if (relative_errors.cols() != mu_true.size()) {
    throw DimensionError("make_forecasts: relative errors cover " + std::to_string(relative_errors.cols()) +
                         " regions, truth has " + std::to_string(mu_true.size()));
  }
  std::vector<SourceForecast> out(relative_errors.rows());
  for (std::size_t h = 0; h < relative_errors.rows(); ++h) {
    out[h].source_id = static_cast<int>(h);
    out[h].means.resize(mu_true.size());
    out[h].stds.resize(mu_true.size());
    for (std::size_t k = 0; k < mu_true.size(); ++k) {
      out[h].means[k] = mu_true[k] * relative_errors(h, k);
      out[h].stds[k] = sigma_ratio * out[h].means[k];
    }
  }
  return out;
}

std::vector<EventInstance> make_events(const ExperimentConfig& cfg, RngSeed seed, int count,
                                       SeedStream truth_stream, SeedStream sampling_stream) {
  std::vector<EventInstance> events(count);
  for (int m = 0; m < count; ++m) {
    const auto index = static_cast<std::uint64_t>(m);
    events[m].true_demand = generate_truth(cfg.truth_lo, cfg.truth_hi, cfg.problem.num_regions,
                                           derive_seed(seed, static_cast<std::uint64_t>(truth_stream), index));
    events[m].forecasts = make_forecasts(events[m].true_demand, cfg.relative_errors, cfg.sigma_ratio);
    events[m].seed = derive_seed(seed, static_cast<std::uint64_t>(sampling_stream), index);
  }
  return events;
}

TrustMatrix initial_trust(const ExperimentConfig& cfg) {
  const int num_sources = cfg.problem.num_sources;
  const int num_regions = cfg.problem.num_regions;
  if (num_sources != 2) return TrustMatrix::uniform(num_sources, num_regions);
  Matrix m(2, num_regions);
  for (int k = 0; k < num_regions; ++k) {
    m(0, k) = cfg.initial_trust;
    m(1, k) = 1.0 - cfg.initial_trust;
  }
  return TrustMatrix(std::move(m));
}

namespace {

void fill_study_stats(TrustStudyResult& study, const ExperimentConfig& cfg) {
  const auto& events = study.trajectory.events;
  study.intervals = detect_stable_interval(study.trajectory, cfg.stable_window, cfg.stable_spread);
  const int count = static_cast<int>(events.size());
  const int tail = std::min(cfg.stable_window, count);
  double sum = 0.0;
  for (int m = count - tail; m < count; ++m) sum += events[m].loss;
  study.mean_stable_loss = tail > 0 ? sum / tail : 0.0;
  study.solve_time = 0.0;
  for (const auto& e : events) study.solve_time += e.solve_time;
}

}  // namespace

TrustStudyResult run_trust_study(const ExperimentConfig& cfg, RngSeed seed) {
  if (auto err = validate_experiment(cfg)) throw std::invalid_argument(*err);
  const auto start = Clock::now();
  const auto events = make_events(cfg, seed, cfg.num_events, SeedStream::kTruth, SeedStream::kSampling);
  TrustUpdateOptions options;
  options.step_size = cfg.step_size;
  options.delta = cfg.delta;
  options.loss_unit = cfg.loss_unit;
  TrustStudyResult study;
  study.trajectory = run_trust_update(events, initial_trust(cfg), cfg.problem, options);
  fill_study_stats(study, cfg);
  study.total_time = seconds_since(start);
  return study;
}

TrustStudyResult truncate_study(const TrustStudyResult& study, const ExperimentConfig& cfg, int num_events) {
  TrustStudyResult out;
  out.trajectory = study.trajectory.prefix(num_events);
  fill_study_stats(out, cfg);
  // Wall time is not recorded per event; scale by solver time.
  out.total_time = study.solve_time > 0.0 ? study.total_time * (out.solve_time / study.solve_time) : 0.0;
  return out;
}

TrustMatrix trust_from_study(const TrustStudyResult& study, const ExperimentConfig& cfg) {
  const auto& snaps = study.trajectory.snapshots;
  const int num_sources = cfg.problem.num_sources;
  const int num_regions = cfg.problem.num_regions;
  const int count = static_cast<int>(snaps.size());
  const int tail = std::min(cfg.stable_window, count);
  Matrix m(num_sources, num_regions);
  for (int k = 0; k < num_regions; ++k) {
    double sum = 0.0;
    for (int h = 0; h < num_sources; ++h) {
      double v = 0.0;
      if (!study.intervals.cells.empty() && study.intervals.at(h, k)) {
        v = study.intervals.at(h, k)->mid();
      } else {
        for (int s = count - tail; s < count; ++s) v += snaps[s](h, k);
        v /= tail;
      }
      m(h, k) = v;
      sum += v;
    }
    for (int h = 0; h < num_sources; ++h) m(h, k) /= sum;
  }
  return TrustMatrix(std::move(m));
}

OutOfSampleResult run_out_of_sample(const TrustMatrix& trust_star, const ExperimentConfig& cfg, RngSeed seed) {
  if (auto err = validate_experiment(cfg)) throw std::invalid_argument(*err);
  const ProblemConfig& p = cfg.problem;
  if (trust_star.num_sources() != p.num_sources || trust_star.num_regions() != p.num_regions) {
    throw DimensionError("run_out_of_sample: trust_star is not H x K");
  }
  const int num_sources = p.num_sources;
  const int num_methods = 1 + 2 * num_sources;
  OutOfSampleResult result;
  result.rows.resize(num_methods);
  result.rows[0].method = "MR-DRO";
  for (int h = 0; h < num_sources; ++h) {
    result.rows[1 + h].method = "h" + std::to_string(h + 1) + "-DRO";
    result.rows[1 + num_sources + h].method = "h" + std::to_string(h + 1) + "-SP";
  }

  const auto events = make_events(cfg, seed, cfg.num_oos_events, SeedStream::kOosTruth, SeedStream::kOosSampling);
  const SupportPolyhedron support = box_support(p);
  for (int q = 0; q < cfg.num_oos_events; ++q) {
    const EventInstance& ev = events[q];
    auto run = [&](int method, const FusedDistribution& dist, ModelKind kind) {
      const auto start = Clock::now();
      const ScenarioSet samples = sample_empirical(dist, p.num_samples, p.support_upper, ev.seed);
      const lp::LpProblem lp =
          kind == ModelKind::kDro ? build_dro_lp(samples, p, support) : build_saa_lp(samples, p);
      AllocationSolution sol;
      try {
        sol = solve_allocation(lp, kind, p.num_regions);
      } catch (const SolverError& e) {
        throw SolverError("out-of-sample event " + std::to_string(q + 1) + ", " + result.rows[method].method +
                          ": " + e.what());
      }
      if (sol.status != SolveStatus::kOptimal) {
        throw SolverError("out-of-sample event " + std::to_string(q + 1) + ", " + result.rows[method].method +
                          ": model is " + std::string(to_string(sol.status)));
      }
      const double loss = realized_loss(sol.allocation, ev.true_demand, p);
      ComparisonRow& row = result.rows[method];
      row.average_loss += loss;
      row.solve_time += sol.solve_time;
      row.total_time += seconds_since(start);
      result.events.push_back({q + 1, row.method, loss, sol.solve_time, sol.allocation});
    };
    run(0, fuse_marginals(ev.forecasts, trust_star), ModelKind::kDro);
    for (int h = 0; h < num_sources; ++h) run(1 + h, as_distribution(ev.forecasts[h]), ModelKind::kDro);
    for (int h = 0; h < num_sources; ++h) {
      run(1 + num_sources + h, as_distribution(ev.forecasts[h]), ModelKind::kSaa);
    }
  }
  for (auto& row : result.rows) row.average_loss /= cfg.num_oos_events;
  return result;
}

ExperimentConfig region_variant(const ExperimentConfig& cfg, int num_regions) {
  ExperimentConfig variant = cfg;
  ProblemConfig& p = variant.problem;
  p.num_regions = num_regions;
  p.cost_unmet.assign(num_regions, cfg.problem.cost_unmet.front());
  p.cost_over.assign(num_regions, cfg.problem.cost_over.front());
  p.support_upper.assign(num_regions, cfg.problem.support_upper.front());
  p.budget = cfg.problem.budget * num_regions / cfg.problem.num_regions;
  p.num_sources = 2;
  variant.relative_errors = cycled_relative_errors(num_regions);
  variant.trust_star.reset();
  return variant;
}

SensitivityResult run_sensitivity(const ExperimentConfig& cfg, const SensitivityPlan& plan, RngSeed seed) {
  if (auto err = validate_experiment(cfg)) throw std::invalid_argument(*err);
  if (plan.budgets.empty() || plan.event_counts.empty() || plan.region_counts.empty()) {
    throw std::invalid_argument("run_sensitivity: every sweep list must be non-empty");
  }
  SensitivityResult out;

  std::optional<TrustStudyResult> baseline_study;
  auto learned_trust = [&]() {
    if (cfg.trust_star) return *cfg.trust_star;
    if (!baseline_study) baseline_study = run_trust_study(cfg, seed);
    return trust_from_study(*baseline_study, cfg);
  };

  for (double budget : plan.budgets) {
    ExperimentConfig variant = cfg;
    variant.problem.budget = budget;
    const OutOfSampleResult oos = run_out_of_sample(learned_trust(), variant, seed);
    for (const auto& row : oos.rows) out.budgets.push_back({budget, row});
  }

  {
    const int max_events = *std::max_element(plan.event_counts.begin(), plan.event_counts.end());
    ExperimentConfig variant = cfg;
    variant.num_events = max_events;
    const TrustStudyResult full = run_trust_study(variant, seed);
    for (int count : plan.event_counts) {
      const TrustStudyResult part = truncate_study(full, variant, count);
      out.events.push_back({count, part.intervals, trust_from_study(part, variant), part.mean_stable_loss,
                            part.total_time});
    }
  }

  for (int num_regions : plan.region_counts) {
    ExperimentConfig variant = region_variant(cfg, num_regions);
    variant.num_events = plan.region_sweep_events;
    const TrustStudyResult study = run_trust_study(variant, seed);
    out.regions.push_back({num_regions, plan.region_sweep_events, variant.problem.budget, study.mean_stable_loss,
                           study.solve_time, study.total_time});
  }
  return out;
}

void write_trust_summary_csv(const TrustStudyResult& study, const ExperimentConfig& cfg, std::ostream& out) {
  CsvWriter csv(out);
  csv.header({"K", "M", "source", "region", "interval_lo", "interval_hi", "loss_thousands", "time_s"});
  for (int h = 0; h < cfg.problem.num_sources; ++h) {
    for (int k = 0; k < cfg.problem.num_regions; ++k) {
      csv.field(cfg.problem.num_regions).field(study.trajectory.num_events()).field(h + 1).field(k + 1);
      write_interval(csv, study.intervals.at(h, k));
      csv.field(study.mean_stable_loss / kReportUnit).field(shown_time(study.total_time, cfg));
      csv.end_row();
    }
  }
}

void write_comparison_csv(const OutOfSampleResult& result, const ExperimentConfig& cfg, std::ostream& out) {
  CsvWriter csv(out);
  csv.header({"K", "M", "Q", "budget", "method", "loss_thousands", "solver_time_s", "total_time_s"});
  for (const auto& row : result.rows) {
    csv.field(cfg.problem.num_regions).field(cfg.num_events).field(cfg.num_oos_events).field(cfg.problem.budget);
    csv.field(row.method).field(row.average_loss / kReportUnit).field(shown_time(row.solve_time, cfg)).field(shown_time(row.total_time, cfg));
    csv.end_row();
  }
}

void write_oos_events_csv(const OutOfSampleResult& result, const ExperimentConfig& cfg, std::ostream& out) {
  CsvWriter csv(out);
  csv.header({"event", "method", "loss", "time"});
  for (const auto& e : result.events) csv.field(e.event).field(e.method).field(e.loss).field(shown_time(e.time, cfg)).end_row();
}

void write_trust_events_csv(const TrustTrajectory& traj, const ExperimentConfig& cfg, std::ostream& out) {
  CsvWriter csv(out);
  csv.header({"event", "method", "loss", "time"});
  for (int m = 0; m < traj.num_events(); ++m) {
    csv.field(m + 1).field("MR-DRO").field(traj.events[m].loss).field(shown_time(traj.events[m].solve_time, cfg)).end_row();
  }
}

void write_budget_sweep_csv(const SensitivityResult& result, const ExperimentConfig& cfg, std::ostream& out) {
  CsvWriter csv(out);
  csv.header({"K", "M", "Q", "budget", "method", "loss_thousands", "solver_time_s", "total_time_s"});
  for (const auto& r : result.budgets) {
    csv.field(cfg.problem.num_regions).field(cfg.num_events).field(cfg.num_oos_events).field(r.budget);
    csv.field(r.row.method).field(r.row.average_loss / kReportUnit).field(shown_time(r.row.solve_time, cfg)).field(shown_time(r.row.total_time, cfg));
    csv.end_row();
  }
}

void write_events_sweep_csv(const SensitivityResult& result, const ExperimentConfig& cfg, std::ostream& out) {
  CsvWriter csv(out);
  csv.header({"K", "M", "source", "region", "interval_lo", "interval_hi", "trust_star", "loss_thousands", "time_s"});
  for (const auto& r : result.events) {
    for (int h = 0; h < cfg.problem.num_sources; ++h) {
      for (int k = 0; k < cfg.problem.num_regions; ++k) {
        csv.field(cfg.problem.num_regions).field(r.num_events).field(h + 1).field(k + 1);
        const auto& iv = r.intervals.at(h, k);
        write_interval(csv, iv);
        if (iv) {
          csv.field(r.trust_star(h, k));
        } else {
          csv.field("N/A");
        }
        csv.field(r.mean_stable_loss / kReportUnit).field(shown_time(r.total_time, cfg));
        csv.end_row();
      }
    }
  }
}

void write_regions_sweep_csv(const SensitivityResult& result, const ExperimentConfig& cfg, std::ostream& out) {
  CsvWriter csv(out);
  csv.header({"K", "M", "budget", "time_s", "solver_time_s", "loss_thousands"});
  for (const auto& r : result.regions) {
    csv.field(r.num_regions).field(r.num_events).field(r.budget).field(shown_time(r.total_time, cfg)).field(shown_time(r.solve_time, cfg));
    csv.field(r.mean_stable_loss / kReportUnit).end_row();
  }
}

}  // namespace mrdro
