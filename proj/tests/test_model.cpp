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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <limits>

#include "wdro/model.hpp"

using namespace wdro;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

StageModel simple_stage(std::size_t prev, std::size_t state, std::size_t ny,
                        std::size_t nxi) {
  StageModel s;
  s.prev_dim = prev;
  s.state_dim = state;
  s.internal_dim = ny;
  s.xi_dim = nxi;
  s.A = Matrix(ny, nxi);
  s.a.assign(ny, 0.0);
  s.E = Matrix(1, prev);
  s.F = Matrix(1, ny);
  s.G = Matrix(1, state);
  s.h.assign(1, 0.0);
  s.H = Matrix(1, nxi);
  s.internal_lower.assign(ny, 0.0);
  s.internal_upper.assign(ny, inf);
  s.state_lower.assign(state, 0.0);
  s.state_upper.assign(state, 1.0);
  s.xi_lower.assign(nxi, 0.0);
  s.xi_upper.assign(nxi, 1.0);
  return s;
}

Instance two_stage_instance() {
  Instance inst;
  inst.stages.push_back(simple_stage(1, 1, 1, 1));
  inst.stages.push_back(simple_stage(1, 1, 1, 1));
  inst.stages[1].H(0, 0) = 1.0;
  inst.x0 = {0.5};
  inst.xi1 = {0.0};
  inst.ambiguity.push_back(WassersteinSet{0.25, {}});
  inst.data.push_back({{0.2}, {0.8}});
  inst.regularization.push_back(2.0);
  return inst;
}

}  // namespace

TEST_CASE("well-formed instance validates cleanly") {
  const Instance inst = two_stage_instance();
  CHECK(validate(inst).empty());
}

TEST_CASE("validation reports structural defects") {
  Instance inst = two_stage_instance();
  inst.x0 = {0.5, 0.5};
  auto errs = validate(inst);
  REQUIRE(!errs.empty());
  CHECK(errs[0].find("x0") != std::string::npos);

  inst = two_stage_instance();
  inst.stages[1].A(0, 0) = 1.0;  // both A and H nonzero
  errs = validate(inst);
  REQUIRE(!errs.empty());
  CHECK(errs[0].find("both") != std::string::npos);

  inst = two_stage_instance();
  inst.data[0][1] = {5.0};  // outside the support box
  CHECK(!validate(inst).empty());

  inst = two_stage_instance();
  inst.regularization[0] = -1.0;
  CHECK(!validate(inst).empty());

  inst = two_stage_instance();
  inst.stages[1].prev_dim = 3;
  CHECK(!validate(inst).empty());

  // A moment bound at exactly the empirical average leaves no slack.
  inst = two_stage_instance();
  auto* w = std::get_if<WassersteinSet>(&inst.ambiguity[0]);
  w->moments.push_back({{1.0}, 0.0, 0.5});
  errs = validate(inst);
  REQUIRE(!errs.empty());
  CHECK(errs[0].find("strictly") != std::string::npos);
  w->moments[0].bound = 0.5 + 1e-9;
  CHECK(validate(inst).empty());
}

TEST_CASE("uncertainty shape and oracle dispatch") {
  Instance inst = two_stage_instance();
  CHECK(uncertainty_shape(inst.stages[1]) == UncertaintyShape::RightHandSide);
  CHECK(oracle_kind(inst, 1) == OracleKind::WassersteinRhs);

  inst.stages[1].H = Matrix(1, 1);
  inst.stages[1].A(0, 0) = 1.0;
  CHECK(uncertainty_shape(inst.stages[1]) == UncertaintyShape::Objective);
  CHECK(oracle_kind(inst, 1) == OracleKind::WassersteinObjective);

  inst.ambiguity[0] = CvarSet{0.1, 0.5};
  CHECK(oracle_kind(inst, 1) == OracleKind::ScenarioBased);
  inst.ambiguity[0] = NominalSet{};
  CHECK(oracle_kind(inst, 1) == OracleKind::ScenarioBased);
  inst.ambiguity[0] = RobustSet{};
  CHECK(oracle_kind(inst, 1) == OracleKind::ScenarioBased);
}

TEST_CASE("robust ambiguity requires bounded support") {
  Instance inst = two_stage_instance();
  inst.ambiguity[0] = RobustSet{};
  inst.stages[1].xi_upper = {inf};
  inst.data[0] = {{0.2}, {0.8}};
  CHECK(!validate(inst).empty());
}

TEST_CASE("json round trip preserves the instance exactly") {
  Instance inst = two_stage_instance();
  inst.stages[1].internal_upper[0] = inf;  // exercise infinite bound encoding
  inst.growth_rate = {0.0};
  inst.lipschitz_xi = {3.5};
  auto* w = std::get_if<WassersteinSet>(&inst.ambiguity[0]);
  w->moments.push_back({{1.0}, -0.125, 0.7});

  const std::string text = instance_to_json(inst, 2);
  const Instance back = instance_from_json(text);
  CHECK(validate(back).empty());
  CHECK(instance_to_json(back, 2) == text);
  CHECK(back.stages[1].internal_upper[0] == inf);
  CHECK(back.regularization == inst.regularization);
  CHECK(back.data == inst.data);
  const auto* wb = std::get_if<WassersteinSet>(&back.ambiguity[0]);
  REQUIRE(wb != nullptr);
  CHECK(wb->radius == w->radius);
  REQUIRE(wb->moments.size() == 1);
  CHECK(wb->moments[0].offset == -0.125);
}

TEST_CASE("penalty recommendation") {
  SUBCASE("declared values are echoed") {
    Instance inst = two_stage_instance();
    inst.regularization = {42.0};
    CHECK(recommended_regularization(inst) == std::vector<double>{42.0});
  }

  SUBCASE("state-independent stages need no penalty information") {
    Instance inst = two_stage_instance();
    inst.regularization = {0.0};  // force derivation
    inst.stages[1].E = Matrix(1, 1);
    CHECK(recommended_regularization(inst) == std::vector<double>{1.0});
  }

  SUBCASE("singleton relaxation column bounds the dual") {
    // Row: -prev + x - y <= 0 with cost 7 on the unbounded slack-like y.
    Instance inst = two_stage_instance();
    inst.regularization = {0.0};
    StageModel& s = inst.stages[1];
    s.E(0, 0) = -1.0;
    s.G(0, 0) = 1.0;
    s.F(0, 0) = -1.0;
    s.a[0] = 7.0;
    const auto rec = recommended_regularization(inst);
    CHECK(rec == std::vector<double>{7.0});
  }

  SUBCASE("underdetermined stages throw") {
    Instance inst = two_stage_instance();
    inst.regularization = {0.0};
    StageModel& s = inst.stages[1];
    s.E(0, 0) = -1.0;
    s.F(0, 0) = -1.0;
    s.internal_upper[0] = 4.0;  // bounded, so the column cannot relax the row
    CHECK_THROWS_AS(recommended_regularization(inst), UnboundedLipschitzError);
  }
}
