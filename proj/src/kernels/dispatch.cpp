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

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "mrdro/kernels.hpp"

namespace mrdro::kernels {
namespace {

struct Table {
  Isa isa;
  double (*dot)(std::span<const double>, std::span<const double>);
  void (*axpy)(double, std::span<const double>, std::span<double>);
  void (*affine_clip)(std::span<const double>, double, double, double, double, std::span<double>);
  double (*newsvendor_loss)(std::span<const double>, std::span<const double>,
                            std::span<const double>, std::span<const double>);
  double (*newsvendor_loss_fixed)(double, std::span<const double>, double, double);
};

constexpr Table kScalarTable{Isa::kScalar, scalar::dot, scalar::axpy, scalar::affine_clip,
                             scalar::newsvendor_loss, scalar::newsvendor_loss_fixed};

#if defined(MRDRO_HAVE_AVX2)
constexpr Table kAvx2Table{Isa::kAvx2, avx2::dot, avx2::axpy, avx2::affine_clip,
                           avx2::newsvendor_loss, avx2::newsvendor_loss_fixed};
#endif

bool cpu_has_avx2() {
#if defined(MRDRO_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Table* select_default() {
  const char* force = std::getenv("MRDRO_FORCE_SCALAR");
  if (force != nullptr && std::strcmp(force, "0") != 0 && force[0] != '\0') return &kScalarTable;
#if defined(MRDRO_HAVE_AVX2)
  if (cpu_has_avx2()) return &kAvx2Table;
#endif
  return &kScalarTable;
}

std::atomic<const Table*>& table() {
  static std::atomic<const Table*> t{select_default()};
  return t;
}

const Table& current() { return *table().load(std::memory_order_relaxed); }

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

Isa active_isa() { return current().isa; }

bool isa_available(Isa isa) {
  if (isa == Isa::kScalar) return true;
  return cpu_has_avx2();
}

bool force_isa(Isa isa) {
  if (!isa_available(isa)) return false;
#if defined(MRDRO_HAVE_AVX2)
  table().store(isa == Isa::kAvx2 ? &kAvx2Table : &kScalarTable);
#else
  table().store(&kScalarTable);
#endif
  return true;
}

double dot(std::span<const double> x, std::span<const double> y) { return current().dot(x, y); }

void axpy(double a, std::span<const double> x, std::span<double> y) { current().axpy(a, x, y); }

void affine_clip(std::span<const double> z, double mean, double stddev, double lo, double hi,
                 std::span<double> out) {
  current().affine_clip(z, mean, stddev, lo, hi, out);
}

double newsvendor_loss(std::span<const double> alloc, std::span<const double> demand,
                       std::span<const double> cost_unmet, std::span<const double> cost_over) {
  return current().newsvendor_loss(alloc, demand, cost_unmet, cost_over);
}

double newsvendor_loss_fixed(double alloc, std::span<const double> demand, double cost_unmet,
                             double cost_over) {
  return current().newsvendor_loss_fixed(alloc, demand, cost_unmet, cost_over);
}

#if !defined(MRDRO_HAVE_AVX2)
// Non-x86 builds: the avx2 namespace forwards to the reference kernels so the
// equivalence tests still link.
namespace avx2 {
double dot(std::span<const double> x, std::span<const double> y) { return scalar::dot(x, y); }
void axpy(double a, std::span<const double> x, std::span<double> y) { scalar::axpy(a, x, y); }
void affine_clip(std::span<const double> z, double mean, double stddev, double lo, double hi,
                 std::span<double> out) {
  scalar::affine_clip(z, mean, stddev, lo, hi, out);
}
double newsvendor_loss(std::span<const double> alloc, std::span<const double> demand,
                       std::span<const double> cost_unmet, std::span<const double> cost_over) {
  return scalar::newsvendor_loss(alloc, demand, cost_unmet, cost_over);
}
double newsvendor_loss_fixed(double alloc, std::span<const double> demand, double cost_unmet,
                             double cost_over) {
  return scalar::newsvendor_loss_fixed(alloc, demand, cost_unmet, cost_over);
}
}  // namespace avx2
#endif

}  // namespace mrdro::kernels
