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

// Data-parallel inner loops shared by the sampler, the loss evaluators and
// the simplex solver. Each kernel has a scalar reference implementation and,
// on x86-64, an AVX2 variant; the variant is picked once at first use from
// CPUID and can be pinned with MRDRO_FORCE_SCALAR=1 or force_isa().
//
// Elementwise kernels (axpy, affine_clip) produce bit-identical results on
// every ISA. Reductions (dot, newsvendor_loss) may differ in the last bits
// because the vector variants sum in a different order.

#include <span>
#include <string_view>

namespace mrdro::kernels {

enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa);

// ISA currently used by the dispatched entry points below.
Isa active_isa();

// True when the running CPU (and the build) supports `isa`.
bool isa_available(Isa isa);

// Pins the dispatch table. Returns false (and leaves the table unchanged)
// when `isa` is not available.
bool force_isa(Isa isa);

double dot(std::span<const double> x, std::span<const double> y);

// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);

// out[i] = clamp(mean + stddev * z[i], lo, hi)
void affine_clip(std::span<const double> z, double mean, double stddev,
                 double lo, double hi, std::span<double> out);

// sum_i cost_unmet[i] * (demand[i] - alloc[i])^+ + cost_over[i] * (alloc[i] - demand[i])^+
double newsvendor_loss(std::span<const double> alloc,
                       std::span<const double> demand,
                       std::span<const double> cost_unmet,
                       std::span<const double> cost_over);

// Same loss with a single allocation value and per-unit costs, summed over
// a contiguous run of demand values (one region across many scenarios).
double newsvendor_loss_fixed(double alloc, std::span<const double> demand,
                             double cost_unmet, double cost_over);

// Direct access to one implementation, bypassing dispatch. Used by the
// equivalence tests.
namespace scalar {
double dot(std::span<const double> x, std::span<const double> y);
void axpy(double a, std::span<const double> x, std::span<double> y);
void affine_clip(std::span<const double> z, double mean, double stddev,
                 double lo, double hi, std::span<double> out);
double newsvendor_loss(std::span<const double> alloc,
                       std::span<const double> demand,
                       std::span<const double> cost_unmet,
                       std::span<const double> cost_over);
double newsvendor_loss_fixed(double alloc, std::span<const double> demand,
                             double cost_unmet, double cost_over);
}  // namespace scalar

namespace avx2 {
double dot(std::span<const double> x, std::span<const double> y);
void axpy(double a, std::span<const double> x, std::span<double> y);
void affine_clip(std::span<const double> z, double mean, double stddev,
                 double lo, double hi, std::span<double> out);
double newsvendor_loss(std::span<const double> alloc,
                       std::span<const double> demand,
                       std::span<const double> cost_unmet,
                       std::span<const double> cost_over);
double newsvendor_loss_fixed(double alloc, std::span<const double> demand,
                             double cost_unmet, double cost_over);
}  // namespace avx2

}  // namespace mrdro::kernels
