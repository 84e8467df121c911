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

#include <cmath>
#include <random>
#include <string>

#include "test_support.hpp"
#include "wdro/lp.hpp"

using namespace wdro::lp;

namespace {

LinearProgram random_lp(std::mt19937_64& rng) {
  LinearProgram lp;
  std::uniform_int_distribution<int> nd(1, 4), md(0, 4), coef(-3, 3);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const int n = nd(rng), m = md(rng);
  for (int j = 0; j < n; ++j) {
    const double lb = -std::floor(u01(rng) * 4.0);
    const double ub = std::floor(u01(rng) * 4.0);
    lp.add_var(lb, ub, coef(rng));
  }
  for (int i = 0; i < m; ++i) {
    std::vector<std::pair<int, double>> terms;
    for (int j = 0; j < n; ++j) {
      const int c = coef(rng);
      if (c != 0) terms.push_back({j, double(c)});
    }
    const RowSense s = u01(rng) < 0.25 ? RowSense::Equal : RowSense::LessEqual;
    lp.add_row(s, terms, std::floor(u01(rng) * 11.0) - 5.0);
  }
  return lp;
}

}  // namespace

TEST_CASE("bounded box LP with binding row") {
  LinearProgram lp;
  lp.add_var(0.0, 1.0, -1.0, "x");
  lp.add_var(0.0, 1.0, -1.0, "y");
  lp.add_row(RowSense::LessEqual, {{0, 1.0}, {1, 1.0}}, 1.0, "cap");
  const Solution sol = solve(lp);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(sol.duals[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sol.x[0] + sol.x[1] == doctest::Approx(1.0));
  CHECK(std::fabs(sol.objective - sol.dual_objective) <= 1e-9);
}

TEST_CASE("binding rhs sensitivity matches dual") {
  LinearProgram lp;
  lp.add_var(0.0, 10.0, -2.0);
  lp.add_var(0.0, 10.0, -3.0);
  lp.add_row(RowSense::LessEqual, {{0, 1.0}, {1, 2.0}}, 8.0);
  lp.add_row(RowSense::LessEqual, {{0, 3.0}, {1, 1.0}}, 9.0);
  const Solution base = solve(lp);
  REQUIRE(base.status == SolveStatus::Optimal);
  const double eps = 1e-5;
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    LinearProgram pert = lp;
    pert.rhs[i] += eps;
    const Solution p = solve(pert);
    REQUIRE(p.status == SolveStatus::Optimal);
    CHECK(p.objective - base.objective ==
          doctest::Approx(-base.duals[i] * eps).epsilon(1e-4));
  }
}

TEST_CASE("equality rows and free variables") {
  LinearProgram lp;
  lp.add_var(-kInf, kInf, 1.0);
  lp.add_var(0.0, kInf, 2.0);
  lp.add_row(RowSense::Equal, {{0, 1.0}, {1, 1.0}}, 3.0);
  lp.add_row(RowSense::LessEqual, {{0, -1.0}}, -1.0);  // x >= 1
  const Solution sol = solve(lp);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(3.0));
  CHECK(sol.x[0] == doctest::Approx(3.0));
  CHECK(sol.x[1] == doctest::Approx(0.0));
}

TEST_CASE("infeasible system yields separating certificate") {
  LinearProgram lp;
  lp.add_var(0.0, 5.0, 1.0);
  lp.add_var(0.0, 5.0, 0.0);
  lp.add_row(RowSense::LessEqual, {{0, 1.0}, {1, 1.0}}, -1.0);
  const Solution sol = solve(lp);
  REQUIRE(sol.status == SolveStatus::Infeasible);
  REQUIRE(sol.farkas.size() == 1);
  CHECK(farkas_gap(lp, sol.farkas) > 1e-9);

  LinearProgram eq;
  eq.add_var(0.0, 1.0, 0.0);
  eq.add_var(0.0, 1.0, 0.0);
  eq.add_row(RowSense::Equal, {{0, 1.0}, {1, 1.0}}, 3.0);
  const Solution sol2 = solve(eq);
  REQUIRE(sol2.status == SolveStatus::Infeasible);
  CHECK(farkas_gap(eq, sol2.farkas) > 1e-9);
}

TEST_CASE("unbounded direction is certified") {
  LinearProgram lp;
  lp.add_var(0.0, kInf, -1.0);
  lp.add_var(0.0, 2.0, 1.0);
  lp.add_row(RowSense::LessEqual, {{0, -1.0}, {1, 1.0}}, 4.0);
  const Solution sol = solve(lp);
  REQUIRE(sol.status == SolveStatus::Unbounded);
  REQUIRE(sol.ray.size() == 2);
  CHECK(ray_cost(lp, sol.ray) < -1e-9);
  // The ray must be a recession direction of the feasible set.
  double row_dir = -sol.ray[0] + sol.ray[1];
  CHECK(row_dir <= 1e-9);
  CHECK(sol.ray[0] >= -1e-9);
}

TEST_CASE("fixed variables and degenerate pivots") {
  LinearProgram lp;
  lp.add_var(2.0, 2.0, 5.0);
  lp.add_var(0.0, 4.0, 1.0);
  lp.add_var(0.0, 4.0, 1.0);
  lp.add_row(RowSense::Equal, {{0, 1.0}, {1, 1.0}, {2, -1.0}}, 2.0);
  lp.add_row(RowSense::LessEqual, {{1, 1.0}, {2, 1.0}}, 0.0);
  const Solution sol = solve(lp);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.x[0] == doctest::Approx(2.0));
  CHECK(sol.objective == doctest::Approx(10.0));
}

TEST_CASE("random LPs agree with vertex enumeration") {
  std::mt19937_64 rng(7);
  int optimal = 0, infeasible = 0;
  for (int rep = 0; rep < 400; ++rep) {
    const LinearProgram lp = random_lp(rng);
    const auto ref = testsupport::vertex_enumeration_solve(lp);
    const Solution sol = solve(lp);
    INFO("rep ", rep);
    if (ref.feasible) {
      ++optimal;
      REQUIRE(sol.status == SolveStatus::Optimal);
      CHECK(std::fabs(sol.objective - ref.objective) <=
            1e-7 * (1.0 + std::fabs(ref.objective)));
      CHECK(std::fabs(sol.objective - sol.dual_objective) <=
            1e-7 * (1.0 + std::fabs(sol.objective)));
      CHECK(sol.max_primal_residual <= 1e-7);
    } else {
      ++infeasible;
      REQUIRE(sol.status == SolveStatus::Infeasible);
      CHECK(farkas_gap(lp, sol.farkas) > 1e-9);
    }
  }
  // Both branches must actually be exercised.
  CHECK(optimal > 100);
  CHECK(infeasible > 20);
}

TEST_CASE("larger random dense LPs keep strong duality") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 25; ++rep) {
    LinearProgram lp;
    const int n = 30, m = 20;
    for (int j = 0; j < n; ++j) lp.add_var(-2.0, 3.0, u(rng));
    for (int i = 0; i < m; ++i) {
      std::vector<std::pair<int, double>> terms;
      for (int j = 0; j < n; ++j) terms.push_back({j, u(rng)});
      lp.add_row(i % 4 == 0 ? RowSense::Equal : RowSense::LessEqual, terms,
                 u(rng) * 5.0);
    }
    const Solution sol = solve(lp);
    if (sol.status == SolveStatus::Infeasible) {
      CHECK(farkas_gap(lp, sol.farkas) > 1e-9);
      continue;
    }
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(std::fabs(sol.objective - sol.dual_objective) <=
          1e-7 * (1.0 + std::fabs(sol.objective)));
    CHECK(sol.max_primal_residual <= 1e-6);
  }
}

TEST_CASE("mps export carries rows, columns and bounds") {
  LinearProgram lp;
  lp.add_var(0.0, 1.0, -1.0, "ship");
  lp.add_var(-kInf, kInf, 2.5, "level");
  lp.add_row(RowSense::LessEqual, {{0, 1.0}, {1, -2.0}}, 3.0, "cap");
  lp.add_row(RowSense::Equal, {{1, 1.0}}, 0.5, "bal");
  const std::string mps = to_mps(lp, "toy");
  CHECK(mps.find("NAME toy") != std::string::npos);
  CHECK(mps.find("ROWS") != std::string::npos);
  CHECK(mps.find(" L cap") != std::string::npos);
  CHECK(mps.find(" E bal") != std::string::npos);
  CHECK(mps.find("COLUMNS") != std::string::npos);
  CHECK(mps.find("ship OBJ -1") != std::string::npos);
  CHECK(mps.find("ship cap 1") != std::string::npos);
  CHECK(mps.find("RHS") != std::string::npos);
  CHECK(mps.find("BOUNDS") != std::string::npos);
  CHECK(mps.find(" FR BND level") != std::string::npos);
  CHECK(mps.find("ENDATA") != std::string::npos);
}

TEST_CASE("iteration and tolerance options are honored") {
  LinearProgram lp;
  lp.add_var(0.0, 1.0, -1.0);
  lp.add_row(RowSense::LessEqual, {{0, 1.0}}, 0.5);
  SolveOptions opts;
  opts.bland_only = true;
  const Solution sol = solve(lp, opts);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(-0.5));
}
