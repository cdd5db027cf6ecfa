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

#include "mrdro/lp.hpp"

namespace mrdro::fixtures {

// Beale (1955). Dantzig's rule with lowest-index ties cycles on it.
//   min -3/4 x4 + 150 x5 - 1/50 x6 + 6 x7
//   1/4 x4 - 60 x5 - 1/25 x6 + 9 x7 <= 0
//   1/2 x4 - 90 x5 - 1/50 x6 + 3 x7 <= 0
//   x6 <= 1
// Optimum -1/20 at x4 = 1/25, x6 = 1.
inline lp::LpProblem beale_cycling() {
  lp::LpProblem p;
  p.add_variable(-0.75);
  p.add_variable(150.0);
  p.add_variable(-0.02);
  p.add_variable(6.0);
  p.add_row({{0, 0.25}, {1, -60.0}, {2, -0.04}, {3, 9.0}}, lp::RowSense::kLessEqual, 0.0);
  p.add_row({{0, 0.5}, {1, -90.0}, {2, -0.02}, {3, 3.0}}, lp::RowSense::kLessEqual, 0.0);
  p.add_row({{2, 1.0}}, lp::RowSense::kLessEqual, 1.0);
  return p;
}

// Chvatal's textbook cycling example, as a minimization.
//   min -10 x1 + 57 x2 + 9 x3 + 24 x4
//   0.5 x1 - 5.5 x2 - 2.5 x3 + 9 x4 <= 0
//   0.5 x1 - 1.5 x2 - 0.5 x3 +   x4 <= 0
//   x1 <= 1
// Optimum -1 at x = (1, 0, 1, 0).
inline lp::LpProblem chvatal_cycling() {
  lp::LpProblem p;
  p.add_variable(-10.0);
  p.add_variable(57.0);
  p.add_variable(9.0);
  p.add_variable(24.0);
  p.add_row({{0, 0.5}, {1, -5.5}, {2, -2.5}, {3, 9.0}}, lp::RowSense::kLessEqual, 0.0);
  p.add_row({{0, 0.5}, {1, -1.5}, {2, -0.5}, {3, 1.0}}, lp::RowSense::kLessEqual, 0.0);
  p.add_row({{0, 1.0}}, lp::RowSense::kLessEqual, 1.0);
  return p;
}

}  // namespace mrdro::fixtures
