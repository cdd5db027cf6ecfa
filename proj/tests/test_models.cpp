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
#include <random>

#include "mrdro/fusion.hpp"
#include "mrdro/models.hpp"
#include "oracles.hpp"

using namespace mrdro;

namespace {

ScenarioSet scenarios_from(const std::vector<std::vector<double>>& rows) {
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < rows[i].size(); ++k) m(i, k) = rows[i][k];
  }
  return ScenarioSet{m};
}

ProblemConfig single_region(double eps) {
  ProblemConfig cfg = ProblemConfig::with_regions(1);
  cfg.wasserstein_radius = eps;
  return cfg;
}

ScenarioSet random_scenarios(std::mt19937_64& gen, int n, int k) {
  std::uniform_real_distribution<double> d(50.0, 300.0);
  Matrix m(n, k);
  for (double& v : m.data()) v = d(gen);
  return ScenarioSet{m};
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("loss pieces reproduce the newsvendor loss") {
  const LossPieces pieces = loss_pieces(ProblemConfig::baseline());
  for (double x : {0.0, 90.0, 150.0, 400.0}) {
    for (double xi : {0.0, 80.0, 150.0, 999.0}) {
      CHECK(pieces.value(1, x, xi) == doctest::Approx(oracle::piece_loss(x, xi, 5000.0, 1000.0)));
    }
  }
}

TEST_CASE("SAA with one scenario meets it exactly") {
  const auto s = scenarios_from({{120.0, 80.0, 200.0}});
  const auto sol = solve_saa(s, ProblemConfig::baseline());
  REQUIRE(sol.status == SolveStatus::kOptimal);
  CHECK(sol.objective == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(sol.allocation[0] == doctest::Approx(120.0));
  CHECK(sol.allocation[1] == doctest::Approx(80.0));
  CHECK(sol.allocation[2] == doctest::Approx(200.0));
}

TEST_CASE("SAA single region matches the grid oracle") {
  // cu > co: the upper scenario wins, mean loss 1000 * 100 / 2.
  const auto s = scenarios_from({{100.0}, {200.0}});
  const auto sol = solve_saa(s, single_region(0.0));
  const auto ref = oracle::saa_grid_search({100.0, 200.0}, 5000.0, 1000.0, 1000.0, 1000.0);
  CHECK(sol.allocation[0] == doctest::Approx(200.0));
  CHECK(sol.objective == doctest::Approx(50000.0));
  CHECK(ref.objective == doctest::Approx(sol.objective));

  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 10; ++trial) {
    const ScenarioSet r = random_scenarios(gen, 15, 1);
    std::vector<double> v(r.samples.data().begin(), r.samples.data().end());
    ProblemConfig cfg = single_region(0.0);
    cfg.budget = 180.0;
    const auto a = solve_saa(r, cfg);
    const auto b = oracle::saa_grid_search(v, 5000.0, 1000.0, 180.0, 1000.0);
    CHECK(rel_diff(a.objective, b.objective) < 1e-9);
  }
}

TEST_CASE("zero budget allocates nothing") {
  ProblemConfig cfg = ProblemConfig::baseline();
  cfg.budget = 0.0;
  const auto s = scenarios_from({{100.0, 100.0, 100.0}, {120.0, 90.0, 80.0}});
  for (const auto& sol : {solve_saa(s, cfg), solve_dro(s, cfg)}) {
    for (double x : sol.allocation) CHECK(x == 0.0);
  }
  CHECK(solve_saa(s, cfg).objective == doctest::Approx(5000.0 * (300.0 + 290.0) / 2.0));
}

TEST_CASE("DRO with zero radius and one scenario") {
  const auto s = scenarios_from({{100.0}});
  const auto sol = solve_dro(s, single_region(0.0));
  REQUIRE(sol.status == SolveStatus::kOptimal);
  CHECK(sol.allocation[0] == doctest::Approx(100.0));
  CHECK(sol.objective == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("worst case of a point mass moved by the radius") {
  // Moving the mass up by eps costs 5000 per unit.
  const auto s = scenarios_from({{100.0}});
  const ProblemConfig cfg = single_region(1.0);
  const std::vector<double> x{100.0};
  CHECK(worst_case_expectation(x, s, cfg, box_support(cfg)) == doctest::Approx(5000.0));
}

TEST_CASE("baseline DRO LP dimensions") {
  const ProblemConfig cfg = ProblemConfig::baseline();
  std::mt19937_64 gen(1);
  const auto s = random_scenarios(gen, 200, 3);
  const auto p = build_dro_lp(s, cfg, box_support(cfg));
  CHECK(p.num_vars() == 3004);
  CHECK(p.num_rows() == 3601);
  CHECK(DroLayout{3, 200}.num_vars() == 3004);
  CHECK(build_saa_lp(s, cfg).num_vars() == SaaLayout{3, 200}.num_vars());
}

TEST_CASE("builders reject mismatched regions") {
  const auto s = scenarios_from({{100.0, 100.0}});
  const ProblemConfig cfg = ProblemConfig::baseline();
  CHECK_THROWS_AS(build_saa_lp(s, cfg), DimensionError);
  CHECK_THROWS_AS(build_dro_lp(s, cfg, box_support(cfg)), DimensionError);
}

TEST_CASE("zero radius DRO equals SAA") {
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 20; ++trial) {
    CAPTURE(trial);
    ProblemConfig cfg = ProblemConfig::baseline();
    cfg.wasserstein_radius = 0.0;
    cfg.budget = 300.0 + 100.0 * (trial % 6);
    const auto s = random_scenarios(gen, 10 + trial, 3);
    const auto a = solve_dro(s, cfg);
    const auto b = solve_saa(s, cfg);
    CHECK(rel_diff(a.objective, b.objective) < 1e-6);
  }
}

TEST_CASE("inner worst case matches enumeration for one region") {
  std::mt19937_64 gen(5);
  for (double eps : {0.0, 0.01, 0.1, 1.0}) {
    for (int trial = 0; trial < 5; ++trial) {
      CAPTURE(eps);
      CAPTURE(trial);
      const auto s = random_scenarios(gen, 8, 1);
      const ProblemConfig cfg = single_region(eps);
      const std::vector<double> x{60.0 + 50.0 * trial};
      const std::vector<double> v(s.samples.data().begin(), s.samples.data().end());
      const double lp_value = worst_case_expectation(x, s, cfg, box_support(cfg));
      const double ref = oracle::inner_sup_enumeration(x[0], v, 5000.0, 1000.0, 1000.0, eps);
      CHECK(rel_diff(lp_value, ref) < 1e-3);
      if (eps == 0.0) CHECK(rel_diff(lp_value, empirical_mean_loss(x, s, cfg)) < 1e-9);
    }
  }
}

TEST_CASE("DRO objective grows with the radius") {
  std::mt19937_64 gen(77);
  for (int trial = 0; trial < 5; ++trial) {
    const auto s = random_scenarios(gen, 20, 3);
    double prev = -1.0;
    for (double eps : {0.0, 0.001, 0.01, 0.1, 1.0}) {
      ProblemConfig cfg = ProblemConfig::baseline();
      cfg.wasserstein_radius = eps;
      const double v = solve_dro(s, cfg).objective;
      CHECK(v >= prev - 1e-6 * std::max(1.0, prev));
      prev = v;
    }
  }
}

TEST_CASE("DRO optimum bounds the empirical loss of its allocation") {
  std::mt19937_64 gen(13);
  const ProblemConfig cfg = ProblemConfig::baseline();
  const auto s = random_scenarios(gen, 30, 3);
  const auto sol = solve_dro(s, cfg);
  CHECK(sol.objective >= empirical_mean_loss(sol.allocation, s, cfg) - 1e-6);
  CHECK(rel_diff(worst_case_expectation(sol.allocation, s, cfg, box_support(cfg)), sol.objective) < 1e-7);
  double total = 0.0;
  for (double x : sol.allocation) {
    CHECK(x >= 0.0);
    total += x;
  }
  CHECK(total <= cfg.budget + kBudgetTolerance * cfg.budget);
}

TEST_CASE("warm start reproduces the cold solution") {
  std::mt19937_64 gen(3);
  const ProblemConfig cfg = ProblemConfig::baseline();
  const auto s = random_scenarios(gen, 40, 3);
  lp::Basis basis;
  const auto cold = solve_dro(s, cfg, {nullptr, &basis});
  const auto warm = solve_dro(s, cfg, {&basis, nullptr});
  CHECK(warm.iterations == 0);
  CHECK(warm.objective == doctest::Approx(cold.objective).epsilon(1e-12));
}
