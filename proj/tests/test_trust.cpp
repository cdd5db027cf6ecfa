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

#include <doctest.h>

#include <cmath>
#include <sstream>

#include "mrdro/experiments.hpp"
#include "mrdro/trust.hpp"

using namespace mrdro;

namespace {

ProblemConfig small_problem() {
  ProblemConfig cfg = ProblemConfig::baseline();
  cfg.num_samples = 40;
  return cfg;
}

// Truth 150 everywhere; sources scaled by r1 and r2 in every region.
EventInstance flat_event(double r1, double r2, std::uint64_t seed) {
  const std::vector<double> truth(3, 150.0);
  Matrix r(2, 3);
  for (int k = 0; k < 3; ++k) {
    r(0, k) = r1;
    r(1, k) = r2;
  }
  return {truth, make_forecasts(truth, r, 0.02), RngSeed{seed}};
}

TrustTrajectory constant_trajectory(const std::vector<double>& source1) {
  TrustTrajectory t;
  for (double v : source1) t.snapshots.push_back(TrustMatrix::from_rows({{v}, {1.0 - v}}));
  t.events.resize(source1.size() - 1);
  return t;
}

}  // namespace

TEST_CASE("realized loss") {
  const ProblemConfig cfg = ProblemConfig::baseline();
  const std::vector<double> x{150, 150, 150};
  const std::vector<double> xi{160, 140, 150};
  CHECK(realized_loss(x, xi, cfg) == 60000.0);
  ProblemConfig doubled = cfg;
  for (double& c : doubled.cost_unmet) c *= 2.0;
  for (double& c : doubled.cost_over) c *= 2.0;
  CHECK(realized_loss(x, xi, doubled) == 120000.0);
  CHECK(realized_loss(xi, xi, cfg) == 0.0);
}

TEST_CASE("with_entry clamps and rescales the column") {
  const TrustMatrix t = TrustMatrix::from_rows({{0.5, 0.2}, {0.3, 0.2}, {0.2, 0.6}});
  const TrustMatrix a = with_entry(t, 0, 0, 0.6);
  CHECK(a(0, 0) == doctest::Approx(0.6));
  CHECK(a(1, 0) == doctest::Approx(0.24));
  CHECK(a(2, 0) == doctest::Approx(0.16));
  CHECK(a(0, 1) == t(0, 1));
  const TrustMatrix b = with_entry(TrustMatrix::from_rows({{0.5}, {0.5}}), 1, 0, 1.5);
  CHECK(b(1, 0) == doctest::Approx(kTrustMax));
  CHECK(b(0, 0) == doctest::Approx(1.0 - kTrustMax));
}

TEST_CASE("trust step on two sources") {
  const TrustMatrix t = TrustMatrix::from_rows({{0.5}, {0.5}});
  Matrix g(2, 1);
  g(0, 0) = 10.0;
  g(1, 0) = -10.0;
  const TrustMatrix n = update_trust(t, g, 1e-3);
  CHECK(n(0, 0) == doctest::Approx(0.49));
  CHECK(n(1, 0) == doctest::Approx(0.51));
  CHECK(update_trust(t, Matrix(2, 1), 1e-3) == t);
}

TEST_CASE("trust step clamps into bounds") {
  const TrustMatrix t = TrustMatrix::from_rows({{0.98}, {0.02}});
  Matrix g(2, 1);
  g(0, 0) = -100.0;
  g(1, 0) = 100.0;
  const TrustMatrix n = update_trust(t, g, 1e-3);
  CHECK(n(0, 0) == doctest::Approx(kTrustMax));
  CHECK(n(1, 0) == doctest::Approx(kTrustMin));
}

TEST_CASE("trust step with three sources stays feasible") {
  const TrustMatrix t = TrustMatrix::from_rows({{0.9, 0.4}, {0.05, 0.3}, {0.05, 0.3}});
  Matrix g(3, 2);
  g(0, 0) = -500.0;
  g(1, 0) = 300.0;
  g(2, 1) = 2000.0;
  const TrustMatrix n = update_trust(t, g, 1e-3);
  CHECK(n.within_bounds(kTrustMin - 1e-12, kTrustMax + 1e-12));
  for (int k = 0; k < 2; ++k) CHECK(n(0, k) + n(1, k) + n(2, k) == doctest::Approx(1.0));
  // Clamped to 0.01, then the column is divided by 0.71.
  CHECK(n(2, 1) == doctest::Approx(0.01 / 0.71));
}

TEST_CASE("ideal trust for two sources") {
  Matrix r(2, 4);
  const double r1[] = {1.1, 0.6, 1.1, 1.0};
  const double r2[] = {0.7, 1.2, 0.3, 1.0};
  for (int k = 0; k < 4; ++k) {
    r(0, k) = r1[k];
    r(1, k) = r2[k];
  }
  const auto t = ideal_trust(r);
  CHECK(t[0] == doctest::Approx(0.75));
  CHECK(t[1] == doctest::Approx(1.0 / 3.0));
  CHECK(t[2] == doctest::Approx(0.875));
  CHECK(t[3] == 0.5);
  Matrix tie(2, 1, 1.2);
  CHECK_THROWS_AS(ideal_trust(tie), std::invalid_argument);
  CHECK_THROWS_AS(ideal_trust(Matrix(3, 1, 1.0)), std::invalid_argument);
}

TEST_CASE("stable interval detection") {
  std::vector<double> flat(12, 0.6);
  auto iv = detect_stable_interval(constant_trajectory(flat));
  REQUIRE(iv.all());
  CHECK(iv.at(0, 0)->lo == 0.6);
  CHECK(iv.at(0, 0)->mid() == doctest::Approx(0.6));

  std::vector<double> settle{0.5, 0.9, 0.1, 0.55, 0.6, 0.58, 0.62, 0.6, 0.59, 0.61, 0.6, 0.63, 0.57};
  iv = detect_stable_interval(constant_trajectory(settle));
  REQUIRE(iv.at(0, 0).has_value());
  CHECK(iv.at(0, 0)->lo == doctest::Approx(0.55));
  CHECK(iv.at(0, 0)->hi == doctest::Approx(0.63));

  std::vector<double> swing{0.5, 0.5, 0.7, 0.5, 0.7, 0.5, 0.7, 0.5, 0.7, 0.5, 0.7};
  CHECK_FALSE(detect_stable_interval(constant_trajectory(swing)).any());

  // Too short for the window.
  CHECK_FALSE(detect_stable_interval(constant_trajectory(std::vector<double>(5, 0.5))).any());
  CHECK_THROWS_AS(detect_stable_interval(constant_trajectory(flat), 1), std::invalid_argument);
}

TEST_CASE("gradient vanishes for identical sources") {
  const ProblemConfig cfg = small_problem();
  const EventInstance same = flat_event(1.0, 1.0, 9);
  const EventInstance over = flat_event(1.3, 1.0, 9);
  const TrustMatrix t = TrustMatrix::uniform(2, 3);
  const double g_same = estimate_trust_gradient(same, t, cfg, 0, 0, 1e-3).value;
  const double g_over = estimate_trust_gradient(over, t, cfg, 0, 0, 1e-3).value;
  CHECK(std::abs(g_same) < 1e-2 * std::abs(g_over));
}

TEST_CASE("over-forecasting source gets a positive gradient") {
  // Fused mean 1.15 * truth: more weight on source 1 over-serves further.
  const ProblemConfig cfg = small_problem();
  const TrustMatrix t = TrustMatrix::uniform(2, 3);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const EventInstance e = flat_event(1.3, 1.0, seed);
    const GradientEstimate g = estimate_trust_gradient(e, t, cfg, 0, 1, 1e-3);
    CHECK(g.value > 0.0);
    CHECK(g.trust_up == doctest::Approx(0.501));
    CHECK(g.trust_down == doctest::Approx(0.499));
    // Slope of the over-serve cost times dx/dt = 0.3 * 150.
    CHECK(g.value == doctest::Approx(1000.0 * 45.0).epsilon(0.1));
    // Halving delta keeps the estimate.
    const GradientEstimate half = estimate_trust_gradient(e, t, cfg, 0, 1, 5e-4);
    CHECK(half.value == doctest::Approx(g.value).epsilon(0.05));
  }
}

TEST_CASE("empty event list keeps the initial trust") {
  const TrustMatrix t0 = TrustMatrix::uniform(2, 3);
  const TrustTrajectory traj = run_trust_update({}, t0, small_problem());
  REQUIRE(traj.snapshots.size() == 1);
  CHECK(traj.snapshots[0] == t0);
  CHECK(traj.num_events() == 0);
}

TEST_CASE("trust update is reproducible and warm starts do not change it") {
  ExperimentConfig cfg = ExperimentConfig::baseline();
  cfg.problem.num_samples = 40;
  const auto events = make_events(cfg, RngSeed{4}, 3, SeedStream::kTruth, SeedStream::kSampling);
  const TrustMatrix t0 = initial_trust(cfg);
  TrustUpdateOptions opt;
  const TrustTrajectory a = run_trust_update(events, t0, cfg.problem, opt);
  const TrustTrajectory b = run_trust_update(events, t0, cfg.problem, opt);
  opt.warm_start = false;
  const TrustTrajectory c = run_trust_update(events, t0, cfg.problem, opt);
  REQUIRE(a.num_events() == 3);
  for (int m = 0; m <= 3; ++m) {
    CHECK(a.snapshots[m] == b.snapshots[m]);
    for (int k = 0; k < 3; ++k) CHECK(c.snapshots[m](0, k) == doctest::Approx(a.snapshots[m](0, k)).epsilon(1e-6));
  }
  CHECK(a.events[0].solves == 1 + 2 * 2 * 3);
  const TrustTrajectory p = a.prefix(2);
  CHECK(p.num_events() == 2);
  CHECK(p.snapshots.size() == 3);
  CHECK(p.snapshots[2] == a.snapshots[2]);
}

TEST_CASE("trajectory csv layout") {
  const TrustTrajectory traj = run_trust_update({}, TrustMatrix::uniform(2, 2), ProblemConfig::with_regions(2));
  std::ostringstream out;
  write_trajectory_csv(traj, out);
  CHECK(out.str() ==
        "event,source,region,trust,loss\n"
        "0,1,1,0.5,\n"
        "0,1,2,0.5,\n"
        "0,2,1,0.5,\n"
        "0,2,2,0.5,\n");
}

TEST_CASE("exact source gains trust against an over-forecaster") {
  ExperimentConfig cfg = ExperimentConfig::baseline();
  cfg.problem.num_samples = 40;
  cfg.relative_errors = Matrix(2, 3, 1.0);
  for (int k = 0; k < 3; ++k) cfg.relative_errors(0, k) = 1.3;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    CAPTURE(seed);
    const auto events = make_events(cfg, RngSeed{seed}, 5, SeedStream::kTruth, SeedStream::kSampling);
    const TrustTrajectory traj = run_trust_update(events, initial_trust(cfg), cfg.problem);
    for (int m = 1; m <= 5; ++m) {
      for (int k = 0; k < 3; ++k) CHECK(traj.snapshots[m](1, k) >= traj.snapshots[m - 1](1, k) - 1e-12);
    }
  }
}
