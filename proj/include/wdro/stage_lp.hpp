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

#include <stdexcept>
#include <string>
#include <vector>

#include "wdro/approx.hpp"
#include "wdro/lp.hpp"
#include "wdro/model.hpp"

namespace wdro {

struct StageLpError : std::runtime_error {
  lp::SolveStatus status;
  StageLpError(lp::SolveStatus s, const std::string& msg)
      : std::runtime_error(msg), status(s) {}
};

// One single-scenario stage solve.
struct StageSolve {
  double value = 0.0;       // full objective: local cost + tail estimate (+ penalty)
  double stage_cost = 0.0;  // (A xi + a)' y only
  std::vector<double> x;    // outgoing state
  std::vector<double> y;    // internal decision
  // Subgradient of `value` with respect to the incoming state; filled only by
  // the regularized variant, where its max norm is at most the penalty.
  std::vector<double> state_grad;
};

// min over (z, y, x) of (A xi + a)'y + Theta(x) + penalty * |x_prev - z|_1
//   s.t. E z + F y + G x <= h + H xi  plus variable bounds,
// where Theta is the pointwise maximum of the cut pool (zero when empty) and
// z is an unconstrained copy of the incoming state.
StageSolve solve_regularized_stage(const StageModel& s, const LowerApprox& lower,
                                   const std::vector<double>& x_prev,
                                   const std::vector<double>& xi, double penalty,
                                   const lp::SolveOptions& opt = {});

// Same objective with the copy pinned: z = x_prev substituted into the rows.
// Used for first-stage solves and policy simulation.
StageSolve solve_stage(const StageModel& s, const LowerApprox& lower,
                       const std::vector<double>& x_prev,
                       const std::vector<double>& xi,
                       const lp::SolveOptions& opt = {});

// The LP behind solve_regularized_stage (penalty > 0) or solve_stage
// (penalty == 0), for audit export.
lp::LinearProgram build_stage_lp(const StageModel& s, const LowerApprox& lower,
                                 const std::vector<double>& x_prev,
                                 const std::vector<double>& xi, double penalty);

}  // namespace wdro
