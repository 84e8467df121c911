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

#include <optional>
#include <vector>

#include "wdro/ddp.hpp"
#include "wdro/lp.hpp"
#include "wdro/model.hpp"

namespace wdro {

struct TooManyVertices : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The support box is unbounded and no growth rate was declared, so the
// worst-case expectation has no finite certificate.
struct MissingGrowthRate : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A point of the support box paired with its transport distance from the
// empirical outcome the enumeration is anchored at.
struct LiftedVertex {
  std::vector<double> xi;
  double dist = 0.0;
};

// Vertices of {(xi, zeta) : xi in the box, zeta >= |xi - atom|_1}: the
// componentwise grid over {lower_i, upper_i, atom_i} restricted to finite
// coordinates, each paired with its exact distance.  Throws TooManyVertices
// past `cap` and UnboundedUncertainty when no coordinate choice is finite.
std::vector<LiftedVertex> lifted_vertices(const std::vector<double>& lower,
                                          const std::vector<double>& upper,
                                          const std::vector<double>& atom,
                                          std::size_t cap = 2000);

// Lower bound on the transport multiplier keeping mass from escaping an
// unbounded box: zero whenever the box is bounded, otherwise the declared
// per-unit-distance cost growth.  Throws MissingGrowthRate when unbounded
// and undeclared.
double growth_rate(const StageModel& s, std::optional<double> declared);

// Wasserstein oracle for uncertainty entering rows only (A = 0): solves one
// regularized stage LP per (outcome, vertex) pair, then prices the vertex
// values against the transport budget and moment constraints in a small
// master whose row duals recombine the per-pair cut gradients.
class ConvexOracle : public StageOracle {
 public:
  ConvexOracle(StageModel stage, std::vector<std::vector<double>> atoms,
               WassersteinSet set, double penalty,
               std::optional<double> declared_growth = std::nullopt,
               unsigned workers = 1);

  OracleOutput evaluate(const std::vector<double>& x_prev, const Tail& tail,
                        std::optional<std::size_t> forward_atom) override;
  std::size_t outcome_count() const override { return atoms_.size(); }

  const std::vector<std::vector<LiftedVertex>>& vertices() const { return vertices_; }
  double last_lambda0() const { return last_lambda0_; }
  // Master row duals of the most recent evaluation, indexed like vertices().
  const std::vector<std::vector<double>>& last_weights() const { return weights_; }

 private:
  StageModel stage_;
  std::vector<std::vector<double>> atoms_;
  WassersteinSet set_;
  double penalty_;
  double rate_;
  unsigned workers_;
  std::vector<std::vector<LiftedVertex>> vertices_;
  double last_lambda0_ = 0.0;
  std::vector<std::vector<double>> weights_;
};

}  // namespace wdro
