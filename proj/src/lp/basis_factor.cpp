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

#include "lp/basis_factor.hpp"

#include <cmath>
#include <cstdint>
#include <limits>

namespace mrdro::lp::internal {
namespace {

// Entries below this magnitude cannot serve as pivots.
constexpr double kSingularTolerance = 1e-11;
// Threshold partial pivoting: |pivot| >= kThreshold * max |column entry|.
constexpr double kThreshold = 0.1;
// Columns examined per pivot search once a candidate exists.
constexpr int kSearchColumns = 4;
// Eta entries below this are dropped.
constexpr double kDropTolerance = 1e-14;

struct RowEntry {
  int col;
  int slot;  // index into the column's storage; stable because nothing is erased
};

// Doubly linked lists of active columns keyed by their active entry count.
class CountBuckets {
 public:
  explicit CountBuckets(int m) : head_(m + 2, -1), next_(m, -1), prev_(m, -1), key_(m, 0) {}

  void insert(int col, int count) {
    key_[col] = count;
    prev_[col] = -1;
    next_[col] = head_[count];
    if (head_[count] >= 0) prev_[head_[count]] = col;
    head_[count] = col;
  }
  void remove(int col) {
    const int k = key_[col];
    if (prev_[col] >= 0) {
      next_[prev_[col]] = next_[col];
    } else {
      head_[k] = next_[col];
    }
    if (next_[col] >= 0) prev_[next_[col]] = prev_[col];
  }
  int first(int count) const { return head_[count]; }
  int next(int col) const { return next_[col]; }
  int max_key() const { return static_cast<int>(head_.size()) - 1; }

 private:
  std::vector<int> head_;
  std::vector<int> next_;
  std::vector<int> prev_;
  std::vector<int> key_;
};

}  // namespace

BasisFactor::Deficiency BasisFactor::factorize(int m, std::span<const SparseColumn> columns) {
  m_ = m;
  steps_.clear();
  steps_.reserve(m);
  etas_.clear();
  eta_nonzeros_ = 0;
  factor_nonzeros_ = 0;
  scratch_.assign(m, 0.0);

  std::vector<std::vector<int>> col_rows(m);
  std::vector<std::vector<double>> col_vals(m);
  std::vector<int> col_count(m, 0);
  std::vector<std::vector<RowEntry>> row_entries(m);
  std::vector<int> row_count(m, 0);
  std::vector<char> row_done(m, 0);
  std::vector<char> col_done(m, 0);

  for (int c = 0; c < m; ++c) {
    const SparseColumn& col = columns[c];
    for (std::size_t s = 0; s < col.rows.size(); ++s) {
      if (col.values[s] == 0.0) continue;
      const int r = col.rows[s];
      row_entries[r].push_back({c, static_cast<int>(col_rows[c].size())});
      col_rows[c].push_back(r);
      col_vals[c].push_back(col.values[s]);
      ++row_count[r];
    }
    col_count[c] = static_cast<int>(col_rows[c].size());
  }

  CountBuckets buckets(m);
  for (int c = 0; c < m; ++c) buckets.insert(c, col_count[c]);

  Deficiency deficiency;
  auto drop_column = [&](int c) {
    buckets.remove(c);
    col_done[c] = 1;
    for (const int r : col_rows[c]) {
      if (!row_done[r]) --row_count[r];
    }
    deficiency.positions.push_back(c);
  };

  std::vector<int> dead;
  int remaining = m;
  while (remaining > 0) {
    while (buckets.first(0) >= 0) {
      drop_column(buckets.first(0));
      --remaining;
    }
    if (remaining == 0) break;

    int best_col = -1;
    int best_slot = -1;
    std::int64_t best_cost = std::numeric_limits<std::int64_t>::max();
    double best_abs = 0.0;
    int examined = 0;
    dead.clear();
    for (int k = 1; k <= buckets.max_key() && k <= m; ++k) {
      if (best_col >= 0 && examined >= kSearchColumns) break;
      if (best_cost == 0) break;
      for (int c = buckets.first(k); c >= 0; c = buckets.next(c)) {
        if (best_col >= 0 && examined >= kSearchColumns) break;
        double col_max = 0.0;
        const auto& rows = col_rows[c];
        const auto& vals = col_vals[c];
        for (std::size_t s = 0; s < rows.size(); ++s) {
          if (!row_done[rows[s]]) col_max = std::max(col_max, std::abs(vals[s]));
        }
        if (col_max < kSingularTolerance) {
          dead.push_back(c);
          continue;
        }
        ++examined;
        for (std::size_t s = 0; s < rows.size(); ++s) {
          const int r = rows[s];
          if (row_done[r]) continue;
          const double v = std::abs(vals[s]);
          if (v < kThreshold * col_max || v < kSingularTolerance) continue;
          const std::int64_t cost = static_cast<std::int64_t>(row_count[r] - 1) * (k - 1);
          if (cost < best_cost || (cost == best_cost && v > best_abs)) {
            best_cost = cost;
            best_abs = v;
            best_col = c;
            best_slot = static_cast<int>(s);
          }
        }
        if (best_cost == 0) break;
      }
    }
    for (const int c : dead) {
      drop_column(c);
      --remaining;
    }
    if (best_col < 0) continue;

    const int pc = best_col;
    const int pr = col_rows[pc][best_slot];
    Step step;
    step.row = pr;
    step.position = pc;
    step.pivot = col_vals[pc][best_slot];

    // Multipliers from the rest of the pivot column; the column leaves every row.
    for (std::size_t s = 0; s < col_rows[pc].size(); ++s) {
      const int i = col_rows[pc][s];
      if (row_done[i]) continue;
      --row_count[i];
      if (i == pr) continue;
      step.l_rows.push_back(i);
      step.l_values.push_back(col_vals[pc][s] / step.pivot);
    }
    buckets.remove(pc);
    col_done[pc] = 1;
    --remaining;

    // Pivot row becomes a row of U; eliminate it from the other rows.
    for (const RowEntry& e : row_entries[pr]) {
      const int j = e.col;
      if (col_done[j]) continue;
      const double a_rj = col_vals[j][e.slot];
      buckets.remove(j);
      --col_count[j];
      step.u_positions.push_back(j);
      step.u_values.push_back(a_rj);
      if (a_rj != 0.0) {
        for (std::size_t t = 0; t < step.l_rows.size(); ++t) {
          const int i = step.l_rows[t];
          const double delta = -step.l_values[t] * a_rj;
          int slot = -1;
          for (const RowEntry& ie : row_entries[i]) {
            if (ie.col == j) {
              slot = ie.slot;
              break;
            }
          }
          if (slot >= 0) {
            col_vals[j][slot] += delta;
          } else {
            row_entries[i].push_back({j, static_cast<int>(col_rows[j].size())});
            col_rows[j].push_back(i);
            col_vals[j].push_back(delta);
            ++col_count[j];
            ++row_count[i];
          }
        }
      }
      buckets.insert(j, col_count[j]);
    }
    row_done[pr] = 1;
    factor_nonzeros_ += 1 + step.l_rows.size() + step.u_positions.size();
    steps_.push_back(std::move(step));
  }

  for (int r = 0; r < m; ++r) {
    if (!row_done[r]) deficiency.rows.push_back(r);
  }
  return deficiency;
}

void BasisFactor::update(int position, std::span<const double> alpha) {
  Eta eta;
  eta.position = position;
  eta.pivot = alpha[position];
  for (int i = 0; i < m_; ++i) {
    if (i == position) continue;
    if (std::abs(alpha[i]) > kDropTolerance) {
      eta.positions.push_back(i);
      eta.values.push_back(alpha[i]);
    }
  }
  eta_nonzeros_ += eta.positions.size() + 1;
  etas_.push_back(std::move(eta));
}

void BasisFactor::ftran(std::vector<double>& work) const {
  // L: forward elimination in pivot order, rows of `work`.
  for (const Step& s : steps_) {
    const double v = work[s.row];
    if (v == 0.0) continue;
    for (std::size_t t = 0; t < s.l_rows.size(); ++t) work[s.l_rows[t]] -= s.l_values[t] * v;
  }
  // U: back substitution, results land by position in `scratch_`.
  std::vector<double>& x = scratch_;
  for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) {
    double v = work[it->row];
    for (std::size_t t = 0; t < it->u_positions.size(); ++t) v -= it->u_values[t] * x[it->u_positions[t]];
    x[it->position] = v / it->pivot;
  }
  work.swap(scratch_);
  // Product-form updates.
  for (const Eta& e : etas_) {
    const double xp = work[e.position] / e.pivot;
    work[e.position] = xp;
    if (xp == 0.0) continue;
    for (std::size_t t = 0; t < e.positions.size(); ++t) work[e.positions[t]] -= e.values[t] * xp;
  }
}

void BasisFactor::btran(std::vector<double>& work) const {
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double v = work[it->position];
    for (std::size_t t = 0; t < it->positions.size(); ++t) v -= it->values[t] * work[it->positions[t]];
    work[it->position] = v / it->pivot;
  }
  // U^T: forward in pivot order; results land by row in `scratch_`.
  std::vector<double>& y = scratch_;
  for (const Step& s : steps_) {
    const double w = work[s.position] / s.pivot;
    y[s.row] = w;
    if (w == 0.0) continue;
    for (std::size_t t = 0; t < s.u_positions.size(); ++t) work[s.u_positions[t]] -= s.u_values[t] * w;
  }
  // L^T: backward.
  for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) {
    double v = y[it->row];
    for (std::size_t t = 0; t < it->l_rows.size(); ++t) v -= it->l_values[t] * y[it->l_rows[t]];
    y[it->row] = v;
  }
  work.swap(scratch_);
}

}  // namespace mrdro::lp::internal
