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

#include "mrdro/types.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mrdro {

ProblemConfig ProblemConfig::baseline() { return with_regions(3); }

ProblemConfig ProblemConfig::with_regions(int num_regions) {
  ProblemConfig cfg;
  cfg.num_regions = num_regions;
  cfg.num_sources = 2;
  const auto k = static_cast<std::size_t>(std::max(num_regions, 0));
  cfg.cost_unmet.assign(k, 5000.0);
  cfg.cost_over.assign(k, 1000.0);
  cfg.budget = 1000.0;
  cfg.support_upper.assign(k, 1000.0);
  cfg.wasserstein_radius = 0.01;
  cfg.num_samples = 200;
  return cfg;
}

namespace {

std::optional<std::string> check_positive_vector(const std::vector<double>& v, int expected,
                                                 const char* name) {
  if (static_cast<int>(v.size()) != expected) {
    std::ostringstream os;
    os << name << ": expected " << expected << " entries, got " << v.size();
    return os.str();
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i]) || v[i] <= 0.0) {
      std::ostringstream os;
      os << name << "[" << i << "] must be a finite positive number, got " << v[i];
      return os.str();
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::string> validate_config(const ProblemConfig& cfg) {
  if (cfg.num_regions < 1) return "num_regions: must be >= 1, got " + std::to_string(cfg.num_regions);
  if (cfg.num_sources < 1) return "num_sources: must be >= 1, got " + std::to_string(cfg.num_sources);
  if (auto err = check_positive_vector(cfg.cost_unmet, cfg.num_regions, "cost_unmet")) return err;
  if (auto err = check_positive_vector(cfg.cost_over, cfg.num_regions, "cost_over")) return err;
  if (!std::isfinite(cfg.budget) || cfg.budget < 0.0) {
    std::ostringstream os;
    os << "budget: must be a finite nonnegative number, got " << cfg.budget;
    return os.str();
  }
  if (auto err = check_positive_vector(cfg.support_upper, cfg.num_regions, "support_upper")) return err;
  if (!std::isfinite(cfg.wasserstein_radius) || cfg.wasserstein_radius < 0.0) {
    std::ostringstream os;
    os << "wasserstein_radius: must be a finite nonnegative number, got " << cfg.wasserstein_radius;
    return os.str();
  }
  if (cfg.num_samples < 1) return "num_samples: must be >= 1, got " + std::to_string(cfg.num_samples);
  return std::nullopt;
}

void require_valid(const ProblemConfig& cfg) {
  if (auto err = validate_config(cfg)) throw std::invalid_argument(*err);
}

TrustMatrix::TrustMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() == 0 || values_.cols() == 0) {
    throw std::invalid_argument("TrustMatrix: needs at least one source and one region");
  }
  for (std::size_t k = 0; k < values_.cols(); ++k) {
    double sum = 0.0;
    for (std::size_t h = 0; h < values_.rows(); ++h) {
      const double t = values_(h, k);
      if (!(t >= 0.0 && t <= 1.0)) {
        std::ostringstream os;
        os << "TrustMatrix: entry (" << h << ", " << k << ") = " << t << " outside [0, 1]";
        throw std::invalid_argument(os.str());
      }
      sum += t;
    }
    if (std::abs(sum - 1.0) > kTrustSumTolerance) {
      std::ostringstream os;
      os.precision(17);
      os << "TrustMatrix: column " << k << " sums to " << sum << ", expected 1";
      throw std::invalid_argument(os.str());
    }
  }
}

TrustMatrix TrustMatrix::uniform(int num_sources, int num_regions) {
  if (num_sources < 1 || num_regions < 1) throw std::invalid_argument("TrustMatrix::uniform: empty shape");
  return TrustMatrix(Matrix(num_sources, num_regions, 1.0 / num_sources));
}

TrustMatrix TrustMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows.front().empty()) throw std::invalid_argument("TrustMatrix::from_rows: empty");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t h = 0; h < rows.size(); ++h) {
    if (rows[h].size() != m.cols()) throw DimensionError("TrustMatrix::from_rows: ragged rows");
    for (std::size_t k = 0; k < m.cols(); ++k) m(h, k) = rows[h][k];
  }
  return TrustMatrix(std::move(m));
}

TrustMatrix TrustMatrix::single_source(int num_sources, int num_regions, int source) {
  if (source < 0 || source >= num_sources) throw std::invalid_argument("TrustMatrix::single_source: bad source");
  Matrix m(num_sources, num_regions, 0.0);
  for (int k = 0; k < num_regions; ++k) m(source, k) = 1.0;
  return TrustMatrix(std::move(m));
}

bool TrustMatrix::within_bounds(double lo, double hi) const {
  for (const double t : values_.data()) {
    if (t < lo || t > hi) return false;
  }
  return true;
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kUnbounded:
      return "unbounded";
  }
  return "unknown";
}

}  // namespace mrdro
