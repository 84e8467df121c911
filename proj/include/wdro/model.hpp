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

#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace wdro {

struct Matrix {
  std::size_t rows = 0, cols = 0;
  std::vector<double> v;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), v(r * c, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return v[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return v[i * cols + j]; }
  const double* row(std::size_t i) const { return &v[i * cols]; }
  bool is_zero() const {
    for (double x : v)
      if (x != 0.0) return false;
    return true;
  }
};

// One stage of the nested problem in the canonical linear form
//   f(prev, x; xi) = min_y (A xi + a)'y
//     s.t. E prev + F y + G x <= h + H xi,
//          y in [internal_lower, internal_upper], x in [state_lower, state_upper].
// Uncertainty may enter the objective (A) or the right-hand side (H) but not
// both within one stage.
struct StageModel {
  std::size_t prev_dim = 0, state_dim = 0, internal_dim = 0, xi_dim = 0;
  Matrix A;
  std::vector<double> a;
  Matrix E, F, G;
  std::vector<double> h;
  Matrix H;
  std::vector<double> internal_lower, internal_upper;
  std::vector<double> state_lower, state_upper;
  std::vector<double> xi_lower, xi_upper;  // support box, entries may be infinite

  std::size_t num_rows() const { return h.size(); }
};

struct MomentConstraint {
  std::vector<double> coef;  // affine statistic coef'xi + offset
  double offset = 0.0;
  double bound = 0.0;  // required expectation upper bound
};

struct WassersteinSet {
  double radius = 0.0;
  std::vector<MomentConstraint> moments;
};
struct NominalSet {};
struct CvarSet {
  double alpha = 0.1;
  double beta = 0.5;
};
struct RobustSet {};

using AmbiguitySpec = std::variant<NominalSet, WassersteinSet, CvarSet, RobustSet>;

enum class UncertaintyShape : char { None, Objective, RightHandSide, Mixed };

UncertaintyShape uncertainty_shape(const StageModel& s);

// Which single-stage solver a noninitial stage requires.
enum class OracleKind : char {
  ScenarioBased,          // nominal / cvar / robust
  WassersteinObjective,   // duality over objective-linear uncertainty
  WassersteinRhs,         // lifted vertex enumeration over rhs uncertainty
};

struct Instance {
  std::vector<StageModel> stages;  // stages[0] is the deterministic first stage
  std::vector<double> x0;
  std::vector<double> xi1;
  // One entry per noninitial stage (index t-2 for stage t).
  std::vector<AmbiguitySpec> ambiguity;
  std::vector<std::vector<std::vector<double>>> data;
  std::vector<double> regularization;  // copy-penalty coefficients M_t
  std::vector<double> growth_rate;     // value growth over unbounded support, 0 otherwise
  std::vector<double> lipschitz_xi;    // declared stage-value Lipschitz bounds in xi

  std::size_t horizon() const { return stages.size(); }
};

// Returns human-readable problems; empty means the instance is well-formed.
std::vector<std::string> validate(const Instance& inst);

OracleKind oracle_kind(const Instance& inst, std::size_t stage_index);

struct UnboundedLipschitzError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Per noninitial stage penalty coefficients: generator-declared values when
// present, otherwise derived from singleton relaxation columns; throws
// UnboundedLipschitzError when no finite bound can be established.
std::vector<double> recommended_regularization(const Instance& inst);

std::string instance_to_json(const Instance& inst, int indent = -1);
Instance instance_from_json(const std::string& text);
void save_instance(const Instance& inst, const std::string& path);
Instance load_instance(const std::string& path);

}  // namespace wdro
