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

namespace mrdro::lp::internal {

// Column of the basis matrix in coordinate form.
struct SparseColumn {
  std::vector<int> rows;
  std::vector<double> values;
};

// Sparse LU factorization of an m x m basis B, with product-form (eta)
// updates for column replacements.
//
// factorize() runs right-looking Gaussian elimination with a Markowitz
// pivot choice restricted to the sparsest columns and threshold partial
// pivoting. Columns that turn out (numerically) dependent are reported
// together with the rows that were left without a pivot, so the caller can
// swap in unit columns and try again.
//
// Vectors passed to ftran() are indexed by row on input and by basis
// position on output; btran() goes the other way.
class BasisFactor {
 public:
  struct Deficiency {
    std::vector<int> positions;  // basis positions that could not be pivoted
    std::vector<int> rows;       // rows that received no pivot
    bool empty() const { return positions.empty(); }
  };

  Deficiency factorize(int m, std::span<const SparseColumn> columns);

  // Replaces the column at `position` with the column whose ftran() image is
  // `alpha` (dense, indexed by position).
  void update(int position, std::span<const double> alpha);

  // In place: `work` holds b (by row) on entry and B^{-1} b (by position) on exit.
  void ftran(std::vector<double>& work) const;
  // In place: `work` holds c (by position) on entry and B^{-T} c (by row) on exit.
  void btran(std::vector<double>& work) const;

  int num_updates() const { return static_cast<int>(etas_.size()); }
  std::size_t eta_nonzeros() const { return eta_nonzeros_; }
  std::size_t factor_nonzeros() const { return factor_nonzeros_; }

 private:
  struct Step {
    int row;
    int position;
    double pivot;
    std::vector<int> l_rows;  // multipliers below the pivot
    std::vector<double> l_values;
    std::vector<int> u_positions;  // rest of the pivot row
    std::vector<double> u_values;
  };
  struct Eta {
    int position;
    double pivot;
    std::vector<int> positions;
    std::vector<double> values;
  };

  int m_ = 0;
  std::vector<Step> steps_;
  std::vector<Eta> etas_;
  std::size_t eta_nonzeros_ = 0;
  std::size_t factor_nonzeros_ = 0;
  mutable std::vector<double> scratch_;
};

}  // namespace mrdro::lp::internal
