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

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "wdro/approx.hpp"
#include "wdro/ddp.hpp"
#include "wdro/model.hpp"
#include "wdro/problems.hpp"

namespace wdro {

// One batch of simulated policy rollouts.  Paths that hit an infeasible
// stage subproblem are dropped from the records and only counted.
struct PolicyRun {
  std::vector<std::size_t> path_index;           // original ids of kept paths
  std::vector<double> totals;                    // summed true stage costs
  std::vector<std::vector<double>> stage_costs;  // [kept path][stage]
  std::vector<std::vector<std::vector<double>>> states;  // [kept path][stage]
  std::size_t requested = 0;
  std::size_t aborted = 0;
  std::uint64_t seed = 0;
};

inline constexpr std::array<double, 7> kQuantileLevels = {
    0.01, 0.10, 0.25, 0.50, 0.75, 0.90, 0.99};

struct EvalStats {
  std::size_t paths = 0;
  std::size_t aborted = 0;
  double mean = 0.0;
  double stddev = 0.0;                // sample deviation, 0 for a single path
  std::array<double, 7> quantiles{};  // at kQuantileLevels
};

// Rolls the trained policy forward: at each stage the next state minimizes
// the stage cost plus the trained tail pool, while the accrued cost excludes
// the pool term.  `tails` are the pools for the cost-to-go of stages
// 1..T-1, as left in SolveReport::lower_pools.  Path k draws from
// Rng::stream(seed, k), so runs sharing a seed see identical uncertainty
// regardless of the trained model, and path order never depends on workers.
PolicyRun simulate_policy(const Instance& inst,
                          const std::vector<LowerApprox>& tails,
                          const PathSampler& sampler, std::size_t paths,
                          std::uint64_t seed, unsigned workers = 1);

// Order statistic with linear interpolation; `sorted` must be ascending.
double quantile(const std::vector<double>& sorted, double level);

// Mean, sample deviation, and the kQuantileLevels quantiles of the kept
// paths.  Throws std::invalid_argument when no path completed.
EvalStats summarize(const PolicyRun& run);

struct ConservatismReport {
  double difference = 0.0;  // robust-minus-nominal value estimate
  double budget = 0.0;      // sum over noninitial stages of lipschitz * radius
  double slack = 0.0;       // 2 * epsilon allowance for the two solve gaps
  double margin = 0.0;      // budget + slack - difference
  bool holds = false;
};

// Checks the in-sample conservatism bound
//   Q1^DR - Q1^Nominal <= sum_t l_t rho_t + 2 eps
// using the most pessimistic bound pairing (robust upper vs nominal lower).
// Radii come from the instance's transport ambiguity (nominal stages count
// as zero); the per-stage uncertainty Lipschitz constants must be declared.
ConservatismReport conservatism_check(const Instance& dr_instance,
                                      const SolveReport& dr,
                                      const SolveReport& nominal,
                                      double epsilon);

// One row per kept path and stage: path, stage, cost, then the outgoing
// state padded to the widest stage dimension.
void write_policy_csv(const PolicyRun& run, const std::string& path);

std::string stats_to_json(const EvalStats& stats, int indent = -1);

// Quantile trajectories over a radius grid, one polyline per quantile level,
// radii laid out left to right in the given order.
void write_quantile_radius_svg(const std::string& path,
                               const std::vector<double>& radii,
                               const std::vector<EvalStats>& stats);

// Mean-versus-deviation scatter, one labeled marker per model.
void write_mean_std_svg(const std::string& path,
                        const std::vector<std::string>& labels,
                        const std::vector<EvalStats>& stats);

}  // namespace wdro
