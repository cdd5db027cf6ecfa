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

// Experiment configuration files.
//
// Plain "key = value" lines, '#' starts a comment, "[name]" opens a section.
// Lists are comma separated. Every key is optional; missing keys keep the
// baseline value. Unknown keys and sections are errors.
//
//   num_regions = 3           num_sources = 2        budget = 1000
//   wasserstein_radius = 0.01 num_samples = 200      support_upper = 1000
//   sigma_ratio = 0.02        truth_range = 100, 200
//   num_events = 50           num_oos_events = 100
//   step_size = 0.001         delta = 0.001          loss_unit = 1000
//   initial_trust = 0.5       stable_window = 10     stable_spread = 0.12
//   seeds = 1, 2, 3           record_timings = true
//
//   [costs]       unmet = 5000        over = 1000        (scalar or K values)
//   [errors]      source1 = 1.1, 0.6, 1.1   source2 = ...  (one row per source)
//   [trust_star]  source1 = ...  or  learn = true
//   [sensitivity] budgets = 400, 1000   event_counts = 10, 50, 100
//                 region_counts = 3, 5, 10   region_sweep_events = 10
//   [run]         subcommand, output_dir, version  (written by manifests, ignored on input)
//
// support_upper also takes a scalar or K values. Without an [errors] section
// the baseline patterns are cycled over K regions. Without a [trust_star]
// section the reference baseline t* is used when K = 3 and H = 2 with the
// baseline errors; otherwise trust_star is learned by a trust study.

#include <filesystem>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "mrdro/experiments.hpp"

namespace mrdro {

// Parse errors carry "<source>:<line>: ..."; validation errors start with
// the offending field name.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ExperimentConfig parse_config_text(std::string_view text, std::string_view source_name = "<config>");
// Throws ConfigError when the file cannot be read.
ExperimentConfig parse_config(const std::filesystem::path& path);

// Writes every key explicitly; parse_config_text(write) gives back an equal
// configuration.
void write_config(const ExperimentConfig& cfg, std::ostream& out);

inline constexpr std::string_view kToolVersion = "0.1.0";

struct RunManifest {
  ExperimentConfig config;
  std::string subcommand;
  std::string output_dir;
  std::string version{kToolVersion};
};

// The resolved configuration followed by a [run] section; the file is itself
// a valid configuration for re-running.
void write_manifest(const RunManifest& manifest, std::ostream& out);

}  // namespace mrdro
