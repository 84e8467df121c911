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

#include <vector>

#include "wdro/ddp.hpp"
#include "wdro/lp.hpp"
#include "wdro/model.hpp"

namespace wdro {

// One minimax exchange turns the worst-case expectation over the Wasserstein
// ball into a joint minimization: dual multipliers for the transport budget
// and moment constraints, one recourse block per empirical outcome, and the
// support function of the box linearized through auxiliary slopes.  Solving
// this single LP yields both the cut value and, via the copy-row duals, its
// gradient.
struct ConcaveMaster {
  lp::LinearProgram lp;
  std::size_t atoms = 0;
  int lambda0 = -1;            // transport-budget multiplier column
  int moment0 = -1;            // first moment multiplier column (count from model)
  int copy_row0 = -1;          // first incoming-state copy row
  std::vector<int> x_col0;     // per-atom first outgoing-state column
};

// Requires objective-only uncertainty (H = 0) and a bounded support box;
// throws UnboundedUncertainty otherwise.
ConcaveMaster assemble_concave_master(const StageModel& s,
                                      const std::vector<std::vector<double>>& atoms,
                                      const WassersteinSet& set,
                                      const LowerApprox& lower,
                                      const std::vector<double>& x_prev,
                                      double penalty);

class ConcaveOracle : public StageOracle {
 public:
  ConcaveOracle(StageModel stage, std::vector<std::vector<double>> atoms,
                WassersteinSet set, double penalty, unsigned workers = 1);

  OracleOutput evaluate(const std::vector<double>& x_prev, const Tail& tail,
                        std::optional<std::size_t> forward_atom) override;
  std::size_t outcome_count() const override { return atoms_.size(); }

  // Budget multiplier of the most recent evaluation.
  double last_lambda0() const { return last_lambda0_; }

 private:
  StageModel stage_;
  std::vector<std::vector<double>> atoms_;
  WassersteinSet set_;
  double penalty_;
  unsigned workers_;
  double last_lambda0_ = 0.0;
};

}  // namespace wdro
