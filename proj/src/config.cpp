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

#include "mrdro/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "mrdro/csv.hpp"

namespace mrdro {
namespace {

struct Entry {
  std::string value;
  int line;
};

// section -> key -> entry; the root section is "".
using Entries = std::map<std::string, std::map<std::string, Entry>>;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"",
       {"num_regions", "num_sources", "budget", "wasserstein_radius", "num_samples", "support_upper", "sigma_ratio",
        "truth_range", "num_events", "num_oos_events", "step_size", "delta", "loss_unit", "initial_trust",
        "stable_window", "stable_spread", "seeds", "record_timings"}},
      {"costs", {"unmet", "over"}},
      {"errors", {}},  // source1 .. sourceH
      {"trust_star", {"learn"}},
      {"sensitivity", {"budgets", "event_counts", "region_counts", "region_sweep_events"}},
      {"run", {"subcommand", "output_dir", "version"}},
  };
  return keys;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool is_source_key(std::string_view key) {
  if (key.size() <= 6 || key.substr(0, 6) != "source") return false;
  for (char c : key.substr(6)) {
    if (c < '0' || c > '9') return false;
  }
  return key[6] != '0';
}

class Parser {
 public:
  Parser(std::string_view source, Entries entries) : source_(source), entries_(std::move(entries)) {}

  [[noreturn]] void fail(const Entry& e, const std::string& msg) const {
    throw ConfigError(std::string(source_) + ":" + std::to_string(e.line) + ": " + msg);
  }

  const Entry* find(const std::string& section, const std::string& key) const {
    auto s = entries_.find(section);
    if (s == entries_.end()) return nullptr;
    auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }

  bool has_section(const std::string& section) const {
    auto s = entries_.find(section);
    return s != entries_.end() && !s->second.empty();
  }

  const std::map<std::string, Entry>& section(const std::string& name) const {
    static const std::map<std::string, Entry> empty;
    auto s = entries_.find(name);
    return s == entries_.end() ? empty : s->second;
  }

  double to_double(const Entry& e, std::string_view text, const std::string& key) const {
    text = trim(text);
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size()) {
      fail(e, key + ": expected a number, got '" + std::string(text) + "'");
    }
    return v;
  }

  template <typename Int>
  Int to_int(const Entry& e, std::string_view text, const std::string& key) const {
    text = trim(text);
    Int v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size()) {
      fail(e, key + ": expected an integer, got '" + std::string(text) + "'");
    }
    return v;
  }

  std::vector<std::string_view> split(std::string_view text) const {
    std::vector<std::string_view> parts;
    while (true) {
      const auto comma = text.find(',');
      parts.push_back(trim(text.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      text.remove_prefix(comma + 1);
    }
    return parts;
  }

  std::vector<double> doubles(const Entry& e, const std::string& key) const {
    std::vector<double> out;
    for (auto part : split(e.value)) out.push_back(to_double(e, part, key));
    return out;
  }

  template <typename Int>
  std::vector<Int> ints(const Entry& e, const std::string& key) const {
    std::vector<Int> out;
    for (auto part : split(e.value)) out.push_back(to_int<Int>(e, part, key));
    return out;
  }

  bool to_bool(const Entry& e, const std::string& key) const {
    const auto v = trim(e.value);
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    fail(e, key + ": expected true or false, got '" + std::string(v) + "'");
  }

  // Scalar replicated over K, or exactly K values.
  std::vector<double> per_region(const Entry& e, const std::string& key, int num_regions) const {
    std::vector<double> v = doubles(e, key);
    if (v.size() == 1) return std::vector<double>(num_regions, v[0]);
    if (static_cast<int>(v.size()) != num_regions) {
      fail(e, key + ": expected 1 or " + std::to_string(num_regions) + " values, got " + std::to_string(v.size()));
    }
    return v;
  }

  Matrix source_rows(const std::string& section_name, int num_sources, int num_regions) const {
    Matrix m(num_sources, num_regions);
    for (const auto& [key, e] : section(section_name)) {
      if (!is_source_key(key)) continue;
      const int h = std::stoi(key.substr(6)) - 1;
      if (h >= num_sources) fail(e, section_name + "." + key + ": only " + std::to_string(num_sources) + " sources");
      const auto row = doubles(e, section_name + "." + key);
      if (static_cast<int>(row.size()) != num_regions) {
        fail(e, section_name + "." + key + ": expected " + std::to_string(num_regions) + " values, got " +
                    std::to_string(row.size()));
      }
      for (int k = 0; k < num_regions; ++k) m(h, k) = row[k];
    }
    for (int h = 0; h < num_sources; ++h) {
      if (!find(section_name, "source" + std::to_string(h + 1))) {
        throw ConfigError(section_name + ": missing source" + std::to_string(h + 1));
      }
    }
    return m;
  }

  ExperimentConfig build() const {
    ExperimentConfig cfg = ExperimentConfig::baseline();
    auto root = [&](const char* key) { return find("", key); };

    int num_regions = cfg.problem.num_regions;
    int num_sources = cfg.problem.num_sources;
    if (auto e = root("num_regions")) num_regions = to_int<int>(*e, e->value, "num_regions");
    if (auto e = root("num_sources")) num_sources = to_int<int>(*e, e->value, "num_sources");
    if (num_regions < 1) throw ConfigError("num_regions: must be >= 1, got " + std::to_string(num_regions));
    if (num_sources < 1) throw ConfigError("num_sources: must be >= 1, got " + std::to_string(num_sources));

    ProblemConfig& p = cfg.problem;
    p = ProblemConfig::with_regions(num_regions);
    p.num_sources = num_sources;
    if (auto e = root("budget")) p.budget = to_double(*e, e->value, "budget");
    if (auto e = root("wasserstein_radius")) p.wasserstein_radius = to_double(*e, e->value, "wasserstein_radius");
    if (auto e = root("num_samples")) p.num_samples = to_int<int>(*e, e->value, "num_samples");
    if (auto e = root("support_upper")) p.support_upper = per_region(*e, "support_upper", num_regions);
    if (auto e = find("costs", "unmet")) p.cost_unmet = per_region(*e, "cost_unmet", num_regions);
    if (auto e = find("costs", "over")) p.cost_over = per_region(*e, "cost_over", num_regions);

    if (auto e = root("sigma_ratio")) cfg.sigma_ratio = to_double(*e, e->value, "sigma_ratio");
    if (auto e = root("truth_range")) {
      const auto v = ints<int>(*e, "truth_range");
      if (v.size() != 2) fail(*e, "truth_range: expected two integers 'lo, hi'");
      cfg.truth_lo = v[0];
      cfg.truth_hi = v[1];
    }
    if (auto e = root("num_events")) cfg.num_events = to_int<int>(*e, e->value, "num_events");
    if (auto e = root("num_oos_events")) cfg.num_oos_events = to_int<int>(*e, e->value, "num_oos_events");
    if (auto e = root("step_size")) cfg.step_size = to_double(*e, e->value, "step_size");
    if (auto e = root("delta")) cfg.delta = to_double(*e, e->value, "delta");
    if (auto e = root("loss_unit")) cfg.loss_unit = to_double(*e, e->value, "loss_unit");
    if (auto e = root("initial_trust")) cfg.initial_trust = to_double(*e, e->value, "initial_trust");
    if (auto e = root("stable_window")) cfg.stable_window = to_int<int>(*e, e->value, "stable_window");
    if (auto e = root("stable_spread")) cfg.stable_spread = to_double(*e, e->value, "stable_spread");
    if (auto e = root("record_timings")) cfg.record_timings = to_bool(*e, "record_timings");
    if (auto e = root("seeds")) {
      cfg.seeds.clear();
      for (auto v : ints<std::uint64_t>(*e, "seeds")) cfg.seeds.push_back(RngSeed{v});
    }

    const bool custom_errors = has_section("errors");
    if (custom_errors) {
      cfg.relative_errors = source_rows("errors", num_sources, num_regions);
    } else if (num_sources == 2) {
      cfg.relative_errors = cycled_relative_errors(num_regions);
    } else {
      throw ConfigError("errors: required when num_sources != 2");
    }

    const Entry* learn = find("trust_star", "learn");
    const bool learn_trust = learn && to_bool(*learn, "trust_star.learn");
    bool trust_rows = false;
    for (const auto& [key, e] : section("trust_star")) trust_rows = trust_rows || is_source_key(key);
    if (trust_rows && learn_trust) throw ConfigError("trust_star: give either source rows or learn = true");
    if (trust_rows) {
      try {
        cfg.trust_star = TrustMatrix(source_rows("trust_star", num_sources, num_regions));
      } catch (const std::invalid_argument& ex) {
        throw ConfigError(std::string("trust_star: ") + ex.what());
      }
    } else if (!learn_trust && num_regions == 3 && num_sources == 2 &&
               cfg.relative_errors == cycled_relative_errors(3)) {
      cfg.trust_star = baseline_trust_star();
    } else {
      cfg.trust_star.reset();
    }

    SensitivityPlan& plan = cfg.sensitivity;
    if (auto e = find("sensitivity", "budgets")) plan.budgets = doubles(*e, "sensitivity.budgets");
    if (auto e = find("sensitivity", "event_counts")) plan.event_counts = ints<int>(*e, "sensitivity.event_counts");
    if (auto e = find("sensitivity", "region_counts")) {
      plan.region_counts = ints<int>(*e, "sensitivity.region_counts");
    }
    if (auto e = find("sensitivity", "region_sweep_events")) {
      plan.region_sweep_events = to_int<int>(*e, e->value, "sensitivity.region_sweep_events");
    }
    for (double b : plan.budgets) {
      if (!(b >= 0.0)) throw ConfigError("sensitivity.budgets: entries must be >= 0");
    }
    for (int m : plan.event_counts) {
      if (m < 0) throw ConfigError("sensitivity.event_counts: entries must be >= 0");
    }
    for (int k : plan.region_counts) {
      if (k < 1) throw ConfigError("sensitivity.region_counts: entries must be >= 1");
    }
    if (plan.region_sweep_events < 0) throw ConfigError("sensitivity.region_sweep_events: must be >= 0");

    if (auto e = find("run", "subcommand")) {
      static const std::set<std::string> kSubcommands = {"solve-once", "trust-study", "oos-eval", "sensitivity"};
      if (!kSubcommands.count(std::string(trim(e->value)))) fail(*e, "run.subcommand: unknown '" + e->value + "'");
    }

    if (auto err = validate_experiment(cfg)) throw ConfigError(*err);
    return cfg;
  }

 private:
  std::string_view source_;
  Entries entries_;
};

template <typename T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    if constexpr (std::is_floating_point_v<T>) {
      out += format_double(values[i]);
    } else {
      out += std::to_string(values[i]);
    }
  }
  return out;
}

std::string matrix_row(const Matrix& m, std::size_t r) {
  return join(std::vector<double>(m.row(r).begin(), m.row(r).end()));
}

}  // namespace

ExperimentConfig parse_config_text(std::string_view text, std::string_view source_name) {
  Entries entries;
  entries[""];
  std::string section;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view() : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto where = [&] { return std::string(source_name) + ":" + std::to_string(line_no) + ": "; };
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where() + "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!known_keys().count(section)) throw ConfigError(where() + "unknown section [" + section + "]");
      entries[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where() + "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError(where() + "missing key before '='");
    const auto& allowed = known_keys().at(section);
    const bool rows_section = section == "errors" || section == "trust_star";
    if (!allowed.count(key) && !(rows_section && is_source_key(key))) {
      throw ConfigError(where() + "unknown key '" + key + "'" + (section.empty() ? "" : " in [" + section + "]"));
    }
    if (value.empty()) throw ConfigError(where() + "missing value for '" + key + "'");
    if (!entries[section].emplace(key, Entry{value, line_no}).second) {
      throw ConfigError(where() + "duplicate key '" + key + "'");
    }
  }
  return Parser(source_name, std::move(entries)).build();
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.string());
}

void write_config(const ExperimentConfig& cfg, std::ostream& out) {
  const ProblemConfig& p = cfg.problem;
  out << "num_regions = " << p.num_regions << '\n';
  out << "num_sources = " << p.num_sources << '\n';
  out << "budget = " << format_double(p.budget) << '\n';
  out << "wasserstein_radius = " << format_double(p.wasserstein_radius) << '\n';
  out << "num_samples = " << p.num_samples << '\n';
  out << "support_upper = " << join(p.support_upper) << '\n';
  out << "sigma_ratio = " << format_double(cfg.sigma_ratio) << '\n';
  out << "truth_range = " << cfg.truth_lo << ", " << cfg.truth_hi << '\n';
  out << "num_events = " << cfg.num_events << '\n';
  out << "num_oos_events = " << cfg.num_oos_events << '\n';
  out << "step_size = " << format_double(cfg.step_size) << '\n';
  out << "delta = " << format_double(cfg.delta) << '\n';
  out << "loss_unit = " << format_double(cfg.loss_unit) << '\n';
  out << "initial_trust = " << format_double(cfg.initial_trust) << '\n';
  out << "stable_window = " << cfg.stable_window << '\n';
  out << "stable_spread = " << format_double(cfg.stable_spread) << '\n';
  std::vector<std::uint64_t> seeds;
  for (auto s : cfg.seeds) seeds.push_back(s.value);
  out << "seeds = " << join(seeds) << '\n';
  out << "record_timings = " << (cfg.record_timings ? "true" : "false") << '\n';
  out << "\n[costs]\n";
  out << "unmet = " << join(p.cost_unmet) << '\n';
  out << "over = " << join(p.cost_over) << '\n';
  out << "\n[errors]\n";
  for (std::size_t h = 0; h < cfg.relative_errors.rows(); ++h) {
    out << "source" << h + 1 << " = " << matrix_row(cfg.relative_errors, h) << '\n';
  }
  out << "\n[trust_star]\n";
  if (cfg.trust_star) {
    for (std::size_t h = 0; h < cfg.trust_star->values().rows(); ++h) {
      out << "source" << h + 1 << " = " << matrix_row(cfg.trust_star->values(), h) << '\n';
    }
  } else {
    out << "learn = true\n";
  }
  out << "\n[sensitivity]\n";
  out << "budgets = " << join(cfg.sensitivity.budgets) << '\n';
  out << "event_counts = " << join(cfg.sensitivity.event_counts) << '\n';
  out << "region_counts = " << join(cfg.sensitivity.region_counts) << '\n';
  out << "region_sweep_events = " << cfg.sensitivity.region_sweep_events << '\n';
}

void write_manifest(const RunManifest& manifest, std::ostream& out) {
  out << "# Run manifest. Re-run with: mrdro_cli " << manifest.subcommand << " --config <this file> --out <dir>\n";
  write_config(manifest.config, out);
  out << "\n[run]\n";
  out << "subcommand = " << manifest.subcommand << '\n';
  out << "output_dir = " << manifest.output_dir << '\n';
  out << "version = " << manifest.version << '\n';
}

}  // namespace mrdro
