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

#include "mrdro/fusion.hpp"

#include <cmath>
#include <string>

#include "mrdro/kernels.hpp"

namespace mrdro {

FusedDistribution fuse_marginals(std::span<const SourceForecast> forecasts,
                                 const TrustMatrix& trust) {
  const int num_sources = trust.num_sources();
  const int num_regions = trust.num_regions();
  if (static_cast<int>(forecasts.size()) != num_sources) {
    throw DimensionError("fuse_marginals: " + std::to_string(forecasts.size()) +
                         " forecasts for " + std::to_string(num_sources) + " trust rows");
  }
  for (const auto& f : forecasts) {
    if (static_cast<int>(f.means.size()) != num_regions ||
        static_cast<int>(f.stds.size()) != num_regions) {
      throw DimensionError("fuse_marginals: forecast of source " + std::to_string(f.source_id) +
                           " does not cover " + std::to_string(num_regions) + " regions");
    }
  }

  FusedDistribution fused;
  fused.means.assign(num_regions, 0.0);
  fused.stds.assign(num_regions, 0.0);
  for (int k = 0; k < num_regions; ++k) {
    double mean = 0.0;
    double variance = 0.0;
    for (int h = 0; h < num_sources; ++h) {
      const double t = trust(h, k);
      const double sd = forecasts[h].stds[k];
      mean += t * forecasts[h].means[k];
      variance += t * t * sd * sd;
    }
    fused.means[k] = mean;
    fused.stds[k] = std::sqrt(variance);
  }
  return fused;
}

FusedDistribution as_distribution(const SourceForecast& forecast) {
  return FusedDistribution{forecast.means, forecast.stds};
}

ScenarioSet sample_empirical(const FusedDistribution& dist, int n,
                             std::span<const double> support_upper, RngSeed seed) {
  if (n < 1) throw std::invalid_argument("sample_empirical: n must be >= 1");
  const std::size_t num_regions = dist.means.size();
  if (dist.stds.size() != num_regions || support_upper.size() != num_regions) {
    throw DimensionError("sample_empirical: means, stds and support_upper differ in length");
  }

  Rng rng(seed);
  const auto count = static_cast<std::size_t>(n);
  std::vector<double> noise(count);
  std::vector<double> column(count);
  ScenarioSet out{Matrix(count, num_regions)};
  for (std::size_t k = 0; k < num_regions; ++k) {
    for (auto& z : noise) z = rng.normal();
    kernels::affine_clip(noise, dist.means[k], dist.stds[k], 0.0, support_upper[k], column);
    for (std::size_t i = 0; i < count; ++i) out.samples(i, k) = column[i];
  }
  return out;
}

}  // namespace mrdro
