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
#include "wdro/model.hpp"

namespace wdro {

// Worst-case probability weights of the CVaR risk measure over the given
// outcome values: the maximizer of sum p_k values_k subject to sum p = 1 and
// 0 <= p_k <= beta/n + (1 - beta)/(alpha n).  Outcomes are filled greedily in
// decreasing value order, ties broken by index.  beta = 1 yields the uniform
// distribution for any alpha.
std::vector<double> cvar_weights(const std::vector<double>& values, double alpha,
                                 double beta);

// Risk-measure oracle over the empirical outcomes of one stage.  beta = 1
// reproduces the risk-neutral expectation.
class ScenarioOracle : public StageOracle {
 public:
  ScenarioOracle(StageModel stage, std::vector<std::vector<double>> atoms,
                 double alpha, double beta, double penalty, unsigned workers = 1);

  OracleOutput evaluate(const std::vector<double>& x_prev, const Tail& tail,
                        std::optional<std::size_t> forward_atom) override;
  std::size_t outcome_count() const override { return atoms_.size(); }

 private:
  StageModel stage_;
  std::vector<std::vector<double>> atoms_;
  double alpha_;
  double beta_;
  double penalty_;
  unsigned workers_;
};

// Worst-case oracle over the vertices of the stage support box.  The forward
// state follows the vertex attaining the worst lower estimate; the returned
// gap is not guaranteed to dominate the overestimate slack.
class RobustOracle : public StageOracle {
 public:
  RobustOracle(StageModel stage, double penalty, unsigned workers = 1);

  OracleOutput evaluate(const std::vector<double>& x_prev, const Tail& tail,
                        std::optional<std::size_t> forward_atom) override;
  std::size_t outcome_count() const override { return vertices_.size(); }

  const std::vector<std::vector<double>>& vertices() const { return vertices_; }

 private:
  StageModel stage_;
  std::vector<std::vector<double>> vertices_;
  double penalty_;
  unsigned workers_;
};

}  // namespace wdro
