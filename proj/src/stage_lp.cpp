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

#include "wdro/stage_lp.hpp"

namespace wdro {

namespace {

struct Layout {
  int z0 = -1;   // copy block (soft variant only)
  int y0 = 0;    // internal decisions
  int x0 = 0;    // outgoing state
  int q = -1;    // tail epigraph scalar (only with a nonempty pool)
  int pp0 = -1;  // penalty split, positive part
  int pm0 = -1;  // penalty split, negative part
  int copy_row0 = -1;
};

void check_inputs(const StageModel& s, const std::vector<double>& x_prev,
                  const std::vector<double>& xi) {
  if (x_prev.size() != s.prev_dim)
    throw std::invalid_argument("incoming state dimension mismatch");
  if (xi.size() != s.xi_dim)
    throw std::invalid_argument("uncertainty dimension mismatch");
}

Layout assemble(lp::LinearProgram& prog, const StageModel& s,
                const LowerApprox& lower, const std::vector<double>& x_prev,
                const std::vector<double>& xi, double penalty) {
  const bool soft = penalty > 0.0;
  const std::size_t m = s.num_rows();
  Layout lay;

  if (soft) {
    lay.z0 = prog.num_vars();
    for (std::size_t i = 0; i < s.prev_dim; ++i)
      prog.add_var(-lp::kInf, lp::kInf, 0.0);
  }
  lay.y0 = prog.num_vars();
  for (std::size_t j = 0; j < s.internal_dim; ++j) {
    double c = s.a[j];
    for (std::size_t i = 0; i < s.xi_dim; ++i) c += s.A(j, i) * xi[i];
    prog.add_var(s.internal_lower[j], s.internal_upper[j], c);
  }
  lay.x0 = prog.num_vars();
  for (std::size_t j = 0; j < s.state_dim; ++j)
    prog.add_var(s.state_lower[j], s.state_upper[j], 0.0);
  if (!lower.empty()) {
    // The pool value is max(0, cuts), so the epigraph scalar is bounded below
    // by the zero member.
    lay.q = prog.num_vars();
    prog.add_var(0.0, lp::kInf, 1.0);
  }
  if (soft) {
    lay.pp0 = prog.num_vars();
    for (std::size_t i = 0; i < s.prev_dim; ++i) prog.add_var(0.0, lp::kInf, penalty);
    lay.pm0 = prog.num_vars();
    for (std::size_t i = 0; i < s.prev_dim; ++i) prog.add_var(0.0, lp::kInf, penalty);
  }

  for (std::size_t i = 0; i < m; ++i) {
    std::vector<std::pair<int, double>> terms;
    double rhs = s.h[i];
    for (std::size_t k = 0; k < s.xi_dim; ++k) rhs += s.H(i, k) * xi[k];
    for (std::size_t j = 0; j < s.prev_dim; ++j) {
      const double e = s.E(i, j);
      if (e == 0.0) continue;
      if (soft)
        terms.push_back({lay.z0 + int(j), e});
      else
        rhs -= e * x_prev[j];
    }
    for (std::size_t j = 0; j < s.internal_dim; ++j)
      if (s.F(i, j) != 0.0) terms.push_back({lay.y0 + int(j), s.F(i, j)});
    for (std::size_t j = 0; j < s.state_dim; ++j)
      if (s.G(i, j) != 0.0) terms.push_back({lay.x0 + int(j), s.G(i, j)});
    prog.add_row(lp::RowSense::LessEqual, std::move(terms), rhs);
  }

  if (soft) {
    lay.copy_row0 = prog.num_rows();
    for (std::size_t i = 0; i < s.prev_dim; ++i) {
      prog.add_row(lp::RowSense::Equal,
                   {{lay.z0 + int(i), 1.0},
                    {lay.pp0 + int(i), 1.0},
                    {lay.pm0 + int(i), -1.0}},
                   x_prev[i]);
    }
  }

  for (const Cut& c : lower.cuts()) {
    std::vector<std::pair<int, double>> terms;
    double rhs = -c.value;
    for (std::size_t j = 0; j < s.state_dim; ++j) {
      rhs += c.gradient[j] * c.anchor[j];
      if (c.gradient[j] != 0.0) terms.push_back({lay.x0 + int(j), c.gradient[j]});
    }
    terms.push_back({lay.q, -1.0});
    prog.add_row(lp::RowSense::LessEqual, std::move(terms), rhs);
  }
  return lay;
}

StageSolve run(const StageModel& s, const LowerApprox& lower,
               const std::vector<double>& x_prev, const std::vector<double>& xi,
               double penalty, const lp::SolveOptions& opt) {
  check_inputs(s, x_prev, xi);
  lp::LinearProgram prog;
  const Layout lay = assemble(prog, s, lower, x_prev, xi, penalty);
  const lp::Solution sol = lp::solve(prog, opt);
  if (sol.status != lp::SolveStatus::Optimal)
    throw StageLpError(sol.status, std::string("stage subproblem ") +
                                       lp::to_string(sol.status));

  StageSolve out;
  out.value = sol.objective;
  out.y.assign(sol.x.begin() + lay.y0, sol.x.begin() + lay.y0 + s.internal_dim);
  out.x.assign(sol.x.begin() + lay.x0, sol.x.begin() + lay.x0 + s.state_dim);
  for (std::size_t j = 0; j < s.internal_dim; ++j)
    out.stage_cost += prog.cost[lay.y0 + j] * out.y[j];
  if (penalty > 0.0) {
    out.state_grad.resize(s.prev_dim);
    for (std::size_t i = 0; i < s.prev_dim; ++i)
      out.state_grad[i] = -sol.duals[lay.copy_row0 + i];
  }
  return out;
}

}  // namespace

StageSolve solve_regularized_stage(const StageModel& s, const LowerApprox& lower,
                                   const std::vector<double>& x_prev,
                                   const std::vector<double>& xi, double penalty,
                                   const lp::SolveOptions& opt) {
  if (!(penalty > 0.0)) throw std::invalid_argument("penalty must be positive");
  return run(s, lower, x_prev, xi, penalty, opt);
}

StageSolve solve_stage(const StageModel& s, const LowerApprox& lower,
                       const std::vector<double>& x_prev,
                       const std::vector<double>& xi, const lp::SolveOptions& opt) {
  return run(s, lower, x_prev, xi, 0.0, opt);
}

lp::LinearProgram build_stage_lp(const StageModel& s, const LowerApprox& lower,
                                 const std::vector<double>& x_prev,
                                 const std::vector<double>& xi, double penalty) {
  check_inputs(s, x_prev, xi);
  lp::LinearProgram prog;
  assemble(prog, s, lower, x_prev, xi, penalty);
  return prog;
}

}  // namespace wdro
