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

// Experiment driver.
//
//   mrdro_cli <solve-once|trust-study|oos-eval|sensitivity>
//             [--config FILE] [--out DIR] [--seed U64]... [--quiet]
//
// Exit codes: 0 success, 1 configuration or I/O error, 2 solver failure.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "mrdro/config.hpp"
#include "mrdro/csv.hpp"
#include "mrdro/experiments.hpp"
#include "mrdro/fusion.hpp"
#include "mrdro/models.hpp"

namespace fs = std::filesystem;
using namespace mrdro;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitSolver = 2;

struct Context {
  ExperimentConfig cfg;
  fs::path out;
  bool quiet = false;

  void note(const std::string& msg) const {
    if (!quiet) std::cerr << msg << '\n';
  }

  std::ofstream open(const std::string& name) const {
    std::ofstream f(out / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (out / name).string());
    return f;
  }

  // Plain names for a single seed, "<stem>_seed<S>.csv" otherwise.
  std::string name_for(const std::string& stem, RngSeed seed) const {
    if (cfg.seeds.size() == 1) return stem + ".csv";
    return stem + "_seed" + std::to_string(seed.value) + ".csv";
  }
};

std::string join_values(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + format_double(v[i]);
  return s;
}

TrustMatrix resolve_trust_star(const Context& ctx, RngSeed seed) {
  if (ctx.cfg.trust_star) return *ctx.cfg.trust_star;
  ctx.note("learning trust_star with a " + std::to_string(ctx.cfg.num_events) + "-event trust study");
  const TrustStudyResult study = run_trust_study(ctx.cfg, seed);
  auto f = ctx.open(ctx.name_for("learned_trajectory", seed));
  write_trajectory_csv(study.trajectory, f);
  return trust_from_study(study, ctx.cfg);
}

void solve_once(const Context& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const RngSeed seed = cfg.seeds.front();
  const auto events = make_events(cfg, seed, 1, SeedStream::kTruth, SeedStream::kSampling);
  const TrustMatrix trust = cfg.trust_star ? *cfg.trust_star : initial_trust(cfg);
  const EventEvaluation eval = evaluate_event(events[0], trust, cfg.problem);
  const double time = cfg.record_timings ? eval.solution.solve_time : 0.0;

  std::cout << "allocation: " << join_values(eval.solution.allocation) << '\n';
  std::cout << "objective: " << format_double(eval.solution.objective) << '\n';
  std::cout << "true_demand: " << join_values(events[0].true_demand) << '\n';
  std::cout << "realized_loss: " << format_double(eval.loss) << '\n';

  auto f = ctx.open("events.csv");
  CsvWriter csv(f);
  csv.header({"event", "method", "loss", "time"});
  csv.field(1).field("MR-DRO").field(eval.loss).field(time).end_row();
  auto g = ctx.open("allocation.csv");
  CsvWriter alloc(g);
  alloc.header({"region", "allocation", "true_demand", "objective"});
  for (int k = 0; k < cfg.problem.num_regions; ++k) {
    alloc.field(k + 1).field(eval.solution.allocation[k]).field(events[0].true_demand[k]);
    alloc.field(eval.solution.objective).end_row();
  }
}

void trust_study(const Context& ctx) {
  for (RngSeed seed : ctx.cfg.seeds) {
    ctx.note("trust study, seed " + std::to_string(seed.value) + ", M = " + std::to_string(ctx.cfg.num_events));
    const TrustStudyResult study = run_trust_study(ctx.cfg, seed);
    {
      auto f = ctx.open(ctx.name_for("trajectory", seed));
      write_trajectory_csv(study.trajectory, f);
    }
    {
      auto f = ctx.open(ctx.name_for("events", seed));
      write_trust_events_csv(study.trajectory, ctx.cfg, f);
    }
    auto f = ctx.open(ctx.name_for("summary", seed));
    write_trust_summary_csv(study, ctx.cfg, f);
  }
}

void oos_eval(const Context& ctx) {
  for (RngSeed seed : ctx.cfg.seeds) {
    const TrustMatrix trust_star = resolve_trust_star(ctx, seed);
    ctx.note("out-of-sample evaluation, seed " + std::to_string(seed.value) + ", Q = " +
             std::to_string(ctx.cfg.num_oos_events));
    const OutOfSampleResult result = run_out_of_sample(trust_star, ctx.cfg, seed);
    {
      auto f = ctx.open(ctx.name_for("events", seed));
      write_oos_events_csv(result, ctx.cfg, f);
    }
    auto f = ctx.open(ctx.name_for("summary", seed));
    write_comparison_csv(result, ctx.cfg, f);
    if (!ctx.quiet) {
      for (const auto& row : result.rows) {
        std::printf("%-8s  loss %10.2f k$  solver %.2f s\n", row.method.c_str(), row.average_loss / 1000.0,
                    ctx.cfg.record_timings ? row.solve_time : 0.0);
      }
    }
  }
}

void sensitivity(const Context& ctx) {
  for (RngSeed seed : ctx.cfg.seeds) {
    ctx.note("sensitivity sweeps, seed " + std::to_string(seed.value));
    const SensitivityResult result = run_sensitivity(ctx.cfg, ctx.cfg.sensitivity, seed);
    {
      auto f = ctx.open(ctx.name_for("budget_sweep", seed));
      write_budget_sweep_csv(result, ctx.cfg, f);
    }
    {
      auto f = ctx.open(ctx.name_for("events_sweep", seed));
      write_events_sweep_csv(result, ctx.cfg, f);
    }
    auto f = ctx.open(ctx.name_for("regions_sweep", seed));
    write_regions_sweep_csv(result, ctx.cfg, f);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-reference distributionally robust allocation experiments"};
  app.set_version_flag("--version", std::string(kToolVersion));
  std::string config_path;
  std::string out_dir = "out";
  std::vector<std::uint64_t> seeds;
  bool quiet = false;
  app.add_option("--config", config_path, "Configuration file (baseline defaults when omitted)");
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_option("--seed", seeds, "Base seed; repeat for several runs (overrides the config)");
  app.add_flag("--quiet", quiet, "Suppress progress messages");
  app.require_subcommand(1);
  const std::vector<std::string> names = {"solve-once", "trust-study", "oos-eval", "sensitivity"};
  for (const auto& name : names) app.add_subcommand(name)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  const std::string subcommand = app.get_subcommands().front()->get_name();

  Context ctx;
  ctx.quiet = quiet;
  ctx.out = out_dir;
  try {
    ctx.cfg = config_path.empty() ? parse_config_text("", "<defaults>") : parse_config(config_path);
    if (!seeds.empty()) {
      ctx.cfg.seeds.clear();
      for (auto s : seeds) ctx.cfg.seeds.push_back(RngSeed{s});
    }
    fs::create_directories(ctx.out);
    RunManifest manifest{ctx.cfg, subcommand, out_dir};
    auto f = ctx.open("manifest.ini");
    write_manifest(manifest, f);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (subcommand == "solve-once") {
      solve_once(ctx);
    } else if (subcommand == "trust-study") {
      trust_study(ctx);
    } else if (subcommand == "oos-eval") {
      oos_eval(ctx);
    } else {
      sensitivity(ctx);
    }
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}
