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

// Built with -mavx2 -mfma. Nothing in here may run before the dispatcher
// has checked CPUID.

#include <immintrin.h>

#include <algorithm>
#include <cstddef>

#include "mrdro/kernels.hpp"

namespace mrdro::kernels::avx2 {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  const __m128d swapped = _mm_unpackhi_pd(pair, pair);
  return _mm_cvtsd_f64(_mm_add_sd(pair, swapped));
}

}  // namespace

double dot(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(&x[i]), _mm256_loadu_pd(&y[i]), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(&x[i + 4]), _mm256_loadu_pd(&y[i + 4]), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(&x[i]), _mm256_loadu_pd(&y[i]), acc0);
  }
  double sum = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) sum += x[i] * y[i];
  return sum;
}

// mul then add, never fused, so the result matches the scalar kernel bit for bit.
void axpy(double a, std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(&x[i]));
    _mm256_storeu_pd(&y[i], _mm256_add_pd(_mm256_loadu_pd(&y[i]), prod));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void affine_clip(std::span<const double> z, double mean, double stddev,
                 double lo, double hi, std::span<double> out) {
  const std::size_t n = z.size();
  const __m256d vm = _mm256_set1_pd(mean);
  const __m256d vs = _mm256_set1_pd(stddev);
  const __m256d vlo = _mm256_set1_pd(lo);
  const __m256d vhi = _mm256_set1_pd(hi);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_add_pd(vm, _mm256_mul_pd(vs, _mm256_loadu_pd(&z[i])));
    // max(v, lo) with v first so NaN handling matches std::max(v, lo).
    v = _mm256_max_pd(vlo, v);
    v = _mm256_min_pd(vhi, v);
    _mm256_storeu_pd(&out[i], v);
  }
  for (; i < n; ++i) {
    const double v = mean + stddev * z[i];
    out[i] = std::min(std::max(v, lo), hi);
  }
}

double newsvendor_loss(std::span<const double> alloc,
                       std::span<const double> demand,
                       std::span<const double> cost_unmet,
                       std::span<const double> cost_over) {
  const std::size_t n = alloc.size();
  const __m256d zero = _mm256_setzero_pd();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d gap = _mm256_sub_pd(_mm256_loadu_pd(&demand[i]), _mm256_loadu_pd(&alloc[i]));
    const __m256d unmet = _mm256_max_pd(gap, zero);
    const __m256d over = _mm256_max_pd(_mm256_sub_pd(zero, gap), zero);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(&cost_unmet[i]), unmet));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(&cost_over[i]), over));
  }
  double sum = hsum(acc);
  for (; i < n; ++i) {
    const double gap = demand[i] - alloc[i];
    sum += cost_unmet[i] * std::max(gap, 0.0) + cost_over[i] * std::max(-gap, 0.0);
  }
  return sum;
}

double newsvendor_loss_fixed(double alloc, std::span<const double> demand,
                             double cost_unmet, double cost_over) {
  const std::size_t n = demand.size();
  const __m256d zero = _mm256_setzero_pd();
  const __m256d va = _mm256_set1_pd(alloc);
  const __m256d vu = _mm256_set1_pd(cost_unmet);
  const __m256d vo = _mm256_set1_pd(cost_over);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d gap = _mm256_sub_pd(_mm256_loadu_pd(&demand[i]), va);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(vu, _mm256_max_pd(gap, zero)));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(vo, _mm256_max_pd(_mm256_sub_pd(zero, gap), zero)));
  }
  double sum = hsum(acc);
  for (; i < n; ++i) {
    const double gap = demand[i] - alloc;
    sum += cost_unmet * std::max(gap, 0.0) + cost_over * std::max(-gap, 0.0);
  }
  return sum;
}

}  // namespace mrdro::kernels::avx2
