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

#include <cstdint>
#include <random>

namespace mrdro {

struct RngSeed {
  std::uint64_t value = 0;
  friend bool operator==(RngSeed, RngSeed) = default;
};

// Independent child seed for (stream, index), e.g. the sampling seed of
// event 17. splitmix64 finalizer over the three words.
RngSeed derive_seed(RngSeed base, std::uint64_t stream, std::uint64_t index);

// Portable random stream: mt19937_64 plus our own transforms, so the draws
// depend on the seed alone and not on the standard library's distributions.
class Rng {
 public:
  explicit Rng(RngSeed seed) : engine_(seed.value) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform01();
  // Standard Normal, Marsaglia polar method.
  double normal();
  // Uniform integer on [lo, hi], rejection sampling (no modulo bias).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace mrdro
