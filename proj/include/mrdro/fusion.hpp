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

#include <span>
#include <vector>

#include "mrdro/rng.hpp"
#include "mrdro/types.hpp"

namespace mrdro {

// Trust-weighted parametric fusion, region by region:
//   mean_k     = sum_h t(h,k) * mean_hk
//   variance_k = sum_h t(h,k)^2 * std_hk^2
// Throws DimensionError when the forecasts and the trust matrix disagree on
// H or K.
FusedDistribution fuse_marginals(std::span<const SourceForecast> forecasts,
                                 const TrustMatrix& trust);

// A single source's marginals, unchanged.
FusedDistribution as_distribution(const SourceForecast& forecast);

// Draws `n` i.i.d. scenarios from the fused Normal, clipping each entry into
// [0, support_upper[k]]. The standard-normal stream is drawn region by
// region (all n draws for region 0, then region 1, ...) from `seed` alone, so
// two calls with the same seed and different distributions see the same
// underlying noise.
ScenarioSet sample_empirical(const FusedDistribution& dist, int n,
                             std::span<const double> support_upper, RngSeed seed);

}  // namespace mrdro
