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

#include "wdro/oracle_concave.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace wdro {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double moment_at(const MomentConstraint& m, const std::vector<double>& xi) {
  double v = m.offset;
  for (std::size_t i = 0; i < xi.size(); ++i) v += m.coef[i] * xi[i];
  return v;
}

}  // namespace

ConcaveMaster assemble_concave_master(const StageModel& s,
                                      const std::vector<std::vector<double>>& atoms,
                                      const WassersteinSet& set,
                                      const LowerApprox& lower,
                                      const std::vector<double>& x_prev,
                                      double penalty) {
  if (!s.H.is_zero())
    throw std::invalid_argument("concave master: uncertainty must not enter rows");
  if (atoms.empty()) throw std::invalid_argument("concave master: no outcomes");
  if (x_prev.size() != s.prev_dim)
    throw std::invalid_argument("concave master: incoming state dimension mismatch");
  if (!(penalty > 0.0))
    throw std::invalid_argument("concave master: penalty must be positive");
  for (std::size_t i = 0; i < s.xi_dim; ++i) {
    if (!std::isfinite(s.xi_lower[i]) || !std::isfinite(s.xi_upper[i]))
      throw UnboundedUncertainty("concave master: support box must be bounded");
  }

  const std::size_t n = atoms.size();
  const std::size_t m = set.moments.size();
  const std::size_t d = s.xi_dim;
  const double inv_n = 1.0 / static_cast<double>(n);
  const auto& cuts = lower.cuts();

  ConcaveMaster out;
  out.atoms = n;
  lp::LinearProgram& prog = out.lp;

  out.lambda0 = prog.add_var(0.0, lp::kInf, set.radius, "lambda0");
  out.moment0 = m > 0 ? static_cast<int>(prog.num_vars()) : -1;
  for (std::size_t j = 0; j < m; ++j) {
    double avg = 0.0;
    for (const auto& atom : atoms) avg += moment_at(set.moments[j], atom);
    prog.add_var(0.0, lp::kInf, set.moments[j].bound - avg * inv_n,
                 "lambda" + std::to_string(j + 1));
  }
  const int z0 = static_cast<int>(prog.num_vars());
  for (std::size_t i = 0; i < s.prev_dim; ++i) prog.add_var(-lp::kInf, lp::kInf, 0.0);
  const int pp0 = static_cast<int>(prog.num_vars());
  for (std::size_t i = 0; i < s.prev_dim; ++i) prog.add_var(0.0, lp::kInf, penalty);
  const int pm0 = static_cast<int>(prog.num_vars());
  for (std::size_t i = 0; i < s.prev_dim; ++i) prog.add_var(0.0, lp::kInf, penalty);

  std::vector<int> y0(n), zeta0(n), slack0(n);
  std::vector<int> q(n, -1);
  out.x_col0.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    y0[k] = static_cast<int>(prog.num_vars());
    for (std::size_t j = 0; j < s.internal_dim; ++j) {
      double c = s.a[j];
      for (std::size_t i = 0; i < d; ++i) c += s.A(j, i) * atoms[k][i];
      prog.add_var(s.internal_lower[j], s.internal_upper[j], c * inv_n);
    }
    out.x_col0[k] = static_cast<int>(prog.num_vars());
    for (std::size_t i = 0; i < s.state_dim; ++i)
      prog.add_var(s.state_lower[i], s.state_upper[i], 0.0);
    zeta0[k] = static_cast<int>(prog.num_vars());
    for (std::size_t i = 0; i < d; ++i) prog.add_var(-lp::kInf, lp::kInf, 0.0);
    slack0[k] = static_cast<int>(prog.num_vars());
    for (std::size_t i = 0; i < d; ++i) prog.add_var(0.0, lp::kInf, inv_n);
    if (!cuts.empty()) q[k] = prog.add_var(0.0, lp::kInf, inv_n);
  }

  std::vector<std::pair<int, double>> row;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t r = 0; r < s.num_rows(); ++r) {
      row.clear();
      for (std::size_t i = 0; i < s.prev_dim; ++i)
        if (s.E(r, i) != 0.0) row.emplace_back(z0 + static_cast<int>(i), s.E(r, i));
      for (std::size_t j = 0; j < s.internal_dim; ++j)
        if (s.F(r, j) != 0.0) row.emplace_back(y0[k] + static_cast<int>(j), s.F(r, j));
      for (std::size_t i = 0; i < s.state_dim; ++i)
        if (s.G(r, i) != 0.0)
          row.emplace_back(out.x_col0[k] + static_cast<int>(i), s.G(r, i));
      prog.add_row(lp::RowSense::LessEqual, row, s.h[r]);
    }
    for (std::size_t i = 0; i < d; ++i) {
      const int zc = zeta0[k] + static_cast<int>(i);
      prog.add_row(lp::RowSense::LessEqual, {{zc, 1.0}, {out.lambda0, -1.0}}, 0.0);
      prog.add_row(lp::RowSense::LessEqual, {{zc, -1.0}, {out.lambda0, -1.0}}, 0.0);
    }
    // s_{k,i} >= c * w_{k,i} for c spanning both signed distances from the
    // atom to the box walls, with w = zeta + A'y - sum_j lambda_j coef_j.
    for (std::size_t i = 0; i < d; ++i) {
      for (const double bound : {s.xi_lower[i], s.xi_upper[i]}) {
        const double c = bound - atoms[k][i];
        row.clear();
        if (c != 0.0) {
          row.emplace_back(zeta0[k] + static_cast<int>(i), c);
          for (std::size_t j = 0; j < s.internal_dim; ++j)
            if (s.A(j, i) != 0.0)
              row.emplace_back(y0[k] + static_cast<int>(j), c * s.A(j, i));
          for (std::size_t j = 0; j < m; ++j)
            if (set.moments[j].coef[i] != 0.0)
              row.emplace_back(out.moment0 + static_cast<int>(j),
                               -c * set.moments[j].coef[i]);
        }
        row.emplace_back(slack0[k] + static_cast<int>(i), -1.0);
        prog.add_row(lp::RowSense::LessEqual, row, 0.0);
      }
    }
    for (const Cut& cut : cuts) {
      row.clear();
      double rhs = -cut.value;
      for (std::size_t i = 0; i < s.state_dim; ++i) {
        if (cut.gradient[i] != 0.0)
          row.emplace_back(out.x_col0[k] + static_cast<int>(i), cut.gradient[i]);
        rhs += cut.gradient[i] * cut.anchor[i];
      }
      row.emplace_back(q[k], -1.0);
      prog.add_row(lp::RowSense::LessEqual, row, rhs);
    }
  }

  out.copy_row0 = static_cast<int>(prog.num_rows());
  for (std::size_t i = 0; i < s.prev_dim; ++i) {
    const int ic = static_cast<int>(i);
    prog.add_row(lp::RowSense::Equal,
                 {{z0 + ic, 1.0}, {pp0 + ic, 1.0}, {pm0 + ic, -1.0}}, x_prev[i]);
  }
  return out;
}

ConcaveOracle::ConcaveOracle(StageModel stage, std::vector<std::vector<double>> atoms,
                             WassersteinSet set, double penalty, unsigned workers)
    : stage_(std::move(stage)),
      atoms_(std::move(atoms)),
      set_(std::move(set)),
      penalty_(penalty),
      workers_(workers) {
  if (atoms_.empty()) throw std::invalid_argument("ConcaveOracle: no outcomes");
  for (const auto& atom : atoms_) {
    if (atom.size() != stage_.xi_dim)
      throw std::invalid_argument("ConcaveOracle: outcome dimension mismatch");
  }
}

OracleOutput ConcaveOracle::evaluate(const std::vector<double>& x_prev,
                                     const Tail& tail,
                                     std::optional<std::size_t> forward_atom) {
  ConcaveMaster master =
      assemble_concave_master(stage_, atoms_, set_, *tail.lower, x_prev, penalty_);
  lp::SolveOptions opt;
  const lp::Solution sol = lp::solve(master.lp, opt);
  if (sol.status != lp::SolveStatus::Optimal)
    throw OracleFailure(std::string("concave master solve failed: ") +
                        lp::to_string(sol.status));
  last_lambda0_ = sol.x[static_cast<std::size_t>(master.lambda0)];

  const std::size_t n = atoms_.size();
  OracleOutput out;
  out.cut.value = sol.objective;
  out.cut.anchor = x_prev;
  out.cut.gradient.resize(x_prev.size());
  for (std::size_t i = 0; i < x_prev.size(); ++i)
    out.cut.gradient[i] = -sol.duals[static_cast<std::size_t>(master.copy_row0) + i];

  std::vector<double> gaps(n);
  double total_gap = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> xk(stage_.state_dim);
    for (std::size_t i = 0; i < stage_.state_dim; ++i)
      xk[i] = sol.x[static_cast<std::size_t>(master.x_col0[k]) + i];
    gaps[k] = tail.gap(xk);
    total_gap += gaps[k];
    if (forward_atom ? k == std::min(*forward_atom, n - 1)
                     : (k == 0 || gaps[k] > out.gap)) {
      out.next_state = std::move(xk);
      out.gap = gaps[k];
    }
  }
  out.overestimate = sol.objective + total_gap / static_cast<double>(n);
  return out;
}

}  // namespace wdro
