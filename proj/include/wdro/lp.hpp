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

#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace wdro::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense : char { LessEqual, Equal };

// minimize c'x + offset  subject to  a_i'x {<=,=} b_i  and  lb <= x <= ub.
// Rows are stored sparse; the solver densifies internally.
struct LinearProgram {
  std::vector<double> cost;
  double cost_offset = 0.0;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<std::vector<std::pair<int, double>>> rows;
  std::vector<double> rhs;
  std::vector<RowSense> sense;
  std::vector<std::string> var_names;  // optional, used by MPS export
  std::vector<std::string> row_names;

  int add_var(double lb, double ub, double c, std::string name = {});
  int add_row(RowSense s, std::vector<std::pair<int, double>> terms, double b,
              std::string name = {});
  std::size_t num_vars() const { return cost.size(); }
  std::size_t num_rows() const { return rhs.size(); }
};

enum class SolveStatus : char {
  Optimal,
  Infeasible,
  Unbounded,
  IterationLimit,
  NumericalFailure,
};

const char* to_string(SolveStatus s);

struct SolveOptions {
  double tolerance = 1e-8;           // optimality (reduced cost) tolerance
  double feasibility_tol = 1e-8;     // residual tolerance on rows and bounds
  int max_iterations = 0;            // 0 picks a size-based default
  int refactor_interval = 64;
  bool bland_only = false;           // skip the Dantzig phase entirely
};

// Row duals use the multiplier convention for a_i'x - b_i: at an optimum a
// binding <=-row carries a nonnegative dual and perturbing its right-hand
// side by +eps moves the optimal value by -dual*eps.  Equality-row duals are
// unrestricted in sign with the same sensitivity meaning.
struct Solution {
  SolveStatus status = SolveStatus::NumericalFailure;
  double objective = 0.0;
  double dual_objective = 0.0;
  std::vector<double> x;
  std::vector<double> duals;
  std::vector<double> reduced_costs;
  // Certificate of primal infeasibility: row multipliers y (nonnegative on
  // <=-rows after negation convention, see farkas_gap) proving no x in the
  // bounds satisfies the rows.  Empty unless status == Infeasible.
  std::vector<double> farkas;
  // Unbounded direction in variable space.  Empty unless status == Unbounded.
  std::vector<double> ray;
  double max_primal_residual = 0.0;
  int iterations = 0;
  int phase1_iterations = 0;
};

Solution solve(const LinearProgram& lp, const SolveOptions& opts = {});

// Amount by which the Farkas certificate separates: positive value certifies
// that the row system plus bounds is infeasible.
double farkas_gap(const LinearProgram& lp, const std::vector<double>& y);

// Objective value of a ray direction; negative certifies unboundedness for a
// feasible minimization problem.
double ray_cost(const LinearProgram& lp, const std::vector<double>& ray);

std::string to_mps(const LinearProgram& lp, const std::string& name = "lp");

}  // namespace wdro::lp
