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
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "mrdro/kernels.hpp"
#include "mrdro/lp.hpp"

namespace mrdro::lp {

int LpProblem::add_variable(double cost, double lower, double upper) {
  cost_.push_back(cost);
  lower_.push_back(lower);
  upper_.push_back(upper);
  return num_vars() - 1;
}

int LpProblem::add_variables(int count, double cost, double lower, double upper) {
  const int first = num_vars();
  cost_.insert(cost_.end(), count, cost);
  lower_.insert(lower_.end(), count, lower);
  upper_.insert(upper_.end(), count, upper);
  return first;
}

int LpProblem::add_row(std::span<const Term> terms, RowSense sense, double rhs) {
  const std::size_t begin = terms_.size();
  for (const Term& t : terms) {
    auto it = std::find_if(terms_.begin() + static_cast<std::ptrdiff_t>(begin), terms_.end(),
                           [&](const Term& e) { return e.var == t.var; });
    if (it != terms_.end()) {
      it->coef += t.coef;
    } else {
      terms_.push_back(t);
    }
  }
  row_start_.push_back(terms_.size());
  sense_.push_back(sense);
  rhs_.push_back(rhs);
  return num_rows() - 1;
}

void LpProblem::set_bounds(int var, double lower, double upper) {
  lower_.at(var) = lower;
  upper_.at(var) = upper;
}

std::optional<std::string> LpProblem::validate() const {
  const int n = num_vars();
  for (int j = 0; j < n; ++j) {
    if (!std::isfinite(cost_[j])) return "cost of x" + std::to_string(j) + " is not finite";
    if (std::isnan(lower_[j]) || std::isnan(upper_[j]) || lower_[j] == kInfinity ||
        upper_[j] == -kInfinity || lower_[j] > upper_[j]) {
      return "bounds of x" + std::to_string(j) + " are inconsistent";
    }
  }
  for (int r = 0; r < num_rows(); ++r) {
    if (!std::isfinite(rhs_[r])) return "rhs of row " + std::to_string(r) + " is not finite";
    for (const Term& t : row(r)) {
      if (t.var < 0 || t.var >= n) {
        return "row " + std::to_string(r) + " references variable " + std::to_string(t.var);
      }
      if (!std::isfinite(t.coef)) return "row " + std::to_string(r) + " has a non-finite coefficient";
    }
  }
  return std::nullopt;
}

std::string_view to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kUnbounded:
      return "unbounded";
    case LpStatus::kNumericalFailure:
      return "numerical_failure";
    case LpStatus::kIterationLimit:
      return "iteration_limit";
  }
  return "unknown";
}

double max_violation(const LpProblem& problem, std::span<const double> x) {
  double worst = 0.0;
  for (int j = 0; j < problem.num_vars(); ++j) {
    worst = std::max(worst, problem.lower(j) - x[j]);
    worst = std::max(worst, x[j] - problem.upper(j));
  }
  for (int r = 0; r < problem.num_rows(); ++r) {
    double activity = 0.0;
    for (const Term& t : problem.row(r)) activity += t.coef * x[t.var];
    const double gap = activity - problem.rhs(r);
    switch (problem.sense(r)) {
      case RowSense::kLessEqual:
        worst = std::max(worst, gap);
        break;
      case RowSense::kGreaterEqual:
        worst = std::max(worst, -gap);
        break;
      case RowSense::kEqual:
        worst = std::max(worst, std::abs(gap));
        break;
    }
  }
  return worst;
}

double objective_value(const LpProblem& problem, std::span<const double> x) {
  return kernels::dot(problem.costs(), x.first(problem.costs().size()));
}

namespace {

void write_bound(std::ostream& out, double v) {
  if (v == kInfinity) {
    out << "inf";
  } else if (v == -kInfinity) {
    out << "-inf";
  } else {
    out << v;
  }
}

void write_terms(std::ostream& out, std::span<const Term> terms) {
  bool first = true;
  for (const Term& t : terms) {
    if (!first) out << (t.coef < 0 ? " " : " +");
    out << t.coef << " x" << t.var;
    first = false;
  }
  if (first) out << "0";
}

}  // namespace

void write_lp_text(const LpProblem& problem, std::ostream& out) {
  const auto old_precision = out.precision(17);
  std::vector<Term> objective;
  for (int j = 0; j < problem.num_vars(); ++j) {
    if (problem.cost(j) != 0.0) objective.push_back({j, problem.cost(j)});
  }
  out << "minimize: ";
  write_terms(out, objective);
  out << '\n';
  for (int r = 0; r < problem.num_rows(); ++r) {
    out << 'r' << r << ": ";
    write_terms(out, problem.row(r));
    switch (problem.sense(r)) {
      case RowSense::kLessEqual:
        out << " <= ";
        break;
      case RowSense::kGreaterEqual:
        out << " >= ";
        break;
      case RowSense::kEqual:
        out << " = ";
        break;
    }
    out << problem.rhs(r) << '\n';
  }
  for (int j = 0; j < problem.num_vars(); ++j) {
    out << "bounds: ";
    write_bound(out, problem.lower(j));
    out << " <= x" << j << " <= ";
    write_bound(out, problem.upper(j));
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace mrdro::lp
