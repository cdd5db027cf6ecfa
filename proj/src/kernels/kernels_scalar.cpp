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

#include <algorithm>
#include <cstddef>

#include "mrdro/kernels.hpp"

namespace mrdro::kernels::scalar {

double dot(std::span<const double> x, std::span<const double> y) {
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += x[i] * y[i];
  return sum;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void affine_clip(std::span<const double> z, double mean, double stddev,
                 double lo, double hi, std::span<double> out) {
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double v = mean + stddev * z[i];
    out[i] = std::min(std::max(v, lo), hi);
  }
}

double newsvendor_loss(std::span<const double> alloc,
                       std::span<const double> demand,
                       std::span<const double> cost_unmet,
                       std::span<const double> cost_over) {
  double sum = 0.0;
  for (std::size_t i = 0; i < alloc.size(); ++i) {
    const double gap = demand[i] - alloc[i];
    sum += cost_unmet[i] * std::max(gap, 0.0) + cost_over[i] * std::max(-gap, 0.0);
  }
  return sum;
}

double newsvendor_loss_fixed(double alloc, std::span<const double> demand,
                             double cost_unmet, double cost_over) {
  double sum = 0.0;
  for (const double d : demand) {
    const double gap = d - alloc;
    sum += cost_unmet * std::max(gap, 0.0) + cost_over * std::max(-gap, 0.0);
  }
  return sum;
}

}  // namespace mrdro::kernels::scalar
