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

// Synthetic studies: trust learning over M events, out-of-sample comparison
// of MR-DRO against single-source DRO and SP over Q events, and sweeps over
// the budget, M and K.
//
// Each event draws an integer demand vector uniformly from the truth range.
// That vector is both the mean the sources are biased against and the
// realization the allocation is scored on. Source h forecasts region k as
// Normal(r_hk * truth_k, (sigma_ratio * r_hk * truth_k)^2).

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mrdro/rng.hpp"
#include "mrdro/trust.hpp"
#include "mrdro/types.hpp"

namespace mrdro {

// Variants for run_sensitivity.
struct SensitivityPlan {
  std::vector<double> budgets{400.0, 1000.0};
  std::vector<int> event_counts{10, 50, 100};
  std::vector<int> region_counts{3, 5, 10};
  int region_sweep_events = 10;
};

struct ExperimentConfig {
  ProblemConfig problem = ProblemConfig::baseline();
  Matrix relative_errors;  // H x K
  double sigma_ratio = 0.02;
  int truth_lo = 100;
  int truth_hi = 200;
  int num_events = 50;       // M
  int num_oos_events = 100;  // Q
  double step_size = 1e-3;   // w
  double delta = 1e-3;
  double loss_unit = 1000.0;
  double initial_trust = 0.5;  // source 1 weight when H = 2; uniform otherwise
  int stable_window = kDefaultStableWindow;
  double stable_spread = kDefaultStableSpread;
  std::vector<RngSeed> seeds{RngSeed{1}};
  // When false every time column is written as 0, which makes output files
  // byte-identical across reruns.
  bool record_timings = true;
  // Trust used by the out-of-sample study; learned by a trust study when absent.
  std::optional<TrustMatrix> trust_star;
  SensitivityPlan sensitivity;

  // K=3, H=2, r_1 = (1.1, 0.6, 1.1), r_2 = (0.7, 1.2, 0.3), everything else
  // at the member defaults.
  static ExperimentConfig baseline();
};

// Empty when usable; otherwise a message starting with the offending field.
std::optional<std::string> validate_experiment(const ExperimentConfig& cfg);

// Baseline r patterns repeated across `num_regions` regions.
Matrix cycled_relative_errors(int num_regions);

// The reference out-of-sample trust for the baseline study, K=3 and H=2.
TrustMatrix baseline_trust_star();

// Independent seeds per purpose, all derived from one base seed.
enum class SeedStream : std::uint64_t { kTruth = 1, kSampling = 2, kOosTruth = 3, kOosSampling = 4 };

// K uniform integers on [lo, hi].
std::vector<double> generate_truth(int lo, int hi, int num_regions, RngSeed seed);

std::vector<SourceForecast> make_forecasts(std::span<const double> mu_true, const Matrix& relative_errors,
                                           double sigma_ratio);

// Events [0, count) of the given streams. Event m depends on (seed, stream,
// m) only, so a shorter run is a prefix of a longer one.
std::vector<EventInstance> make_events(const ExperimentConfig& cfg, RngSeed seed, int count,
                                       SeedStream truth_stream, SeedStream sampling_stream);

TrustMatrix initial_trust(const ExperimentConfig& cfg);

struct TrustStudyResult {
  TrustTrajectory trajectory;
  StableIntervals intervals;
  double mean_stable_loss = 0.0;  // mean over the last stable_window events (all events if fewer)
  double solve_time = 0.0;
  double total_time = 0.0;
};

TrustStudyResult run_trust_study(const ExperimentConfig& cfg, RngSeed seed);

// Re-derives intervals and the stable loss for the first `num_events` events
// of an existing study; identical to running the shorter study.
TrustStudyResult truncate_study(const TrustStudyResult& study, const ExperimentConfig& cfg, int num_events);

// Trust whose source-h weight is the midpoint of the detected interval,
// falling back to the mean of the last stable_window snapshots where no
// interval was found. Columns renormalized.
TrustMatrix trust_from_study(const TrustStudyResult& study, const ExperimentConfig& cfg);

struct ComparisonRow {
  std::string method;
  double average_loss = 0.0;  // money
  double solve_time = 0.0;    // seconds inside the LP solver
  double total_time = 0.0;    // seconds including sampling and model building
};

struct OosEventRecord {
  int event = 0;
  std::string method;
  double loss = 0.0;
  double time = 0.0;  // solver seconds
  std::vector<double> allocation;
};

struct OutOfSampleResult {
  std::vector<ComparisonRow> rows;  // MR-DRO, h1-DRO, ..., hH-DRO, h1-SP, ..., hH-SP
  std::vector<OosEventRecord> events;
};

// Q events with fresh truths and forecasts. Every method of an event samples
// from the same noise seed; h-DRO and h-SP see identical samples.
OutOfSampleResult run_out_of_sample(const TrustMatrix& trust_star, const ExperimentConfig& cfg, RngSeed seed);

struct BudgetSweepRow {
  double budget;
  ComparisonRow row;
};

struct EventsSweepRow {
  int num_events;
  StableIntervals intervals;
  TrustMatrix trust_star;
  double mean_stable_loss;
  double total_time;
};

struct RegionsSweepRow {
  int num_regions;
  int num_events;
  double budget;
  double mean_stable_loss;
  double solve_time;
  double total_time;
};

struct SensitivityResult {
  std::vector<BudgetSweepRow> budgets;
  std::vector<EventsSweepRow> events;
  std::vector<RegionsSweepRow> regions;
};

// cfg with K regions: first-region costs and support replicated, budget
// scaled by K / cfg K so the per-region budget is unchanged, cycled
// relative errors, trust_star cleared.
ExperimentConfig region_variant(const ExperimentConfig& cfg, int num_regions);

// Budget rows use cfg.trust_star (or a baseline trust study when absent).
// The M sweep runs one study with the largest M and truncates it. K sweeps
// use region_variant.
SensitivityResult run_sensitivity(const ExperimentConfig& cfg, const SensitivityPlan& plan, RngSeed seed);

// Summary tables.
void write_trust_summary_csv(const TrustStudyResult& study, const ExperimentConfig& cfg, std::ostream& out);
void write_comparison_csv(const OutOfSampleResult& result, const ExperimentConfig& cfg, std::ostream& out);
void write_oos_events_csv(const OutOfSampleResult& result, const ExperimentConfig& cfg, std::ostream& out);
void write_trust_events_csv(const TrustTrajectory& traj, const ExperimentConfig& cfg, std::ostream& out);
void write_budget_sweep_csv(const SensitivityResult& result, const ExperimentConfig& cfg, std::ostream& out);
void write_events_sweep_csv(const SensitivityResult& result, const ExperimentConfig& cfg, std::ostream& out);
void write_regions_sweep_csv(const SensitivityResult& result, const ExperimentConfig& cfg, std::ostream& out);

}  // namespace mrdro
