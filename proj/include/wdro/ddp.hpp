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
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wdro/approx.hpp"
#include "wdro/lp.hpp"
#include "wdro/model.hpp"

namespace wdro {

struct OracleFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A worst-case oracle was asked to range over a support box with an infinite
// side, which has no finite maximizer.
struct UnboundedUncertainty : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bounds on the cost-to-go after a stage.  A null upper pool means the exact
// tail is identically zero (the terminal stage), not merely unexplored.
struct Tail {
  const LowerApprox* lower = nullptr;
  const UpperApprox* upper = nullptr;

  double lower_eval(const std::vector<double>& x) const { return lower->eval(x); }
  double upper_eval(const std::vector<double>& x) const {
    return upper ? upper->eval(x) : 0.0;
  }
  double gap(const std::vector<double>& x) const {
    return upper_eval(x) - lower_eval(x);
  }
};

// One noninitial-stage evaluation: a linear under-estimator of the head
// cost-to-go valid everywhere, an over-estimate at the queried state, and the
// state to continue the forward pass from.
struct OracleOutput {
  Cut cut;
  double overestimate = 0.0;
  std::vector<double> next_state;
  double gap = 0.0;
};

class StageOracle {
 public:
  virtual ~StageOracle() = default;
  // forward_atom overrides the gap-maximizing forward choice with a sampled
  // empirical outcome; oracles without empirical outcomes ignore it.
  virtual OracleOutput evaluate(const std::vector<double>& x_prev, const Tail& tail,
                                std::optional<std::size_t> forward_atom) = 0;
  virtual std::size_t outcome_count() const = 0;
};

// Builds the oracle for noninitial stage index t (0-based, 1 <= t < T)
// according to the stage's ambiguity set and uncertainty shape.
std::unique_ptr<StageOracle> make_stage_oracle(const Instance& inst, std::size_t t,
                                               unsigned workers = 1);

enum class ForwardMode : char { GapMax, Sampled };

struct SolveConfig {
  double epsilon = 1e-4;
  std::size_t max_iterations = 200;
  double time_cap_seconds = 0.0;  // nonpositive means no cap
  ForwardMode forward = ForwardMode::GapMax;
  std::uint64_t sample_seed = 0;
  unsigned workers = 1;
  lp::SolveOptions lp;
};

enum class RunStatus : char { GapReached, IterationCap, TimeCap };
const char* to_string(RunStatus s);

struct IterationRecord {
  std::size_t iteration = 0;  // 1-based
  double lower = 0.0;
  double upper = 0.0;
  double seconds = 0.0;               // cumulative wall time
  std::vector<double> stage_gaps;     // gamma_t for stages 2..T
};

struct SolveReport {
  RunStatus status = RunStatus::IterationCap;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  std::vector<double> incumbent_x1;   // first-stage solution of the best upper value
  std::vector<IterationRecord> iterations;
  // Pools for the cost-to-go of stages 1..T-1 (the stage-T tail is zero).
  std::vector<LowerApprox> lower_pools;
  std::vector<UpperApprox> upper_pools;
  std::size_t oracle_evaluations = 0;
};

// First-stage solve against the current stage-1 tail bounds.
struct InitialSolve {
  std::vector<double> x1;
  double value = 0.0;       // LowerBound: local cost plus under-approximation
  double stage_cost = 0.0;  // local cost only
  double gap = 0.0;         // tail gap at x1
};

InitialSolve initial_stage_solve(const StageModel& stage1,
                                 const std::vector<double>& x0,
                                 const std::vector<double>& xi1, const Tail& tail,
                                 const lp::SolveOptions& opt = {});

SolveReport run(const Instance& inst, const SolveConfig& cfg = {});
SolveReport run(const Instance& inst,
                const std::vector<std::unique_ptr<StageOracle>>& oracles,
                const SolveConfig& cfg);

std::string report_to_json(const SolveReport& rep, int indent = -1);
void write_bounds_csv(const SolveReport& rep, const std::string& path);

}  // namespace wdro
