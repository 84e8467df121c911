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

#include "wdro/oracle_convex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "wdro/parallel.hpp"
#include "wdro/stage_lp.hpp"

namespace wdro {
namespace {

std::size_t matrix_rank(std::vector<std::vector<double>> rows, std::size_t cols) {
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
    std::size_t pivot = rank;
    for (std::size_t r = rank + 1; r < rows.size(); ++r)
      if (std::fabs(rows[r][c]) > std::fabs(rows[pivot][c])) pivot = r;
    if (std::fabs(rows[pivot][c]) < 1e-9) continue;
    std::swap(rows[rank], rows[pivot]);
    for (std::size_t r = rank + 1; r < rows.size(); ++r) {
      const double f = rows[r][c] / rows[rank][c];
      if (f == 0.0) continue;
      for (std::size_t j = c; j < cols; ++j) rows[r][j] -= f * rows[rank][j];
    }
    ++rank;
  }
  return rank;
}

// Active-constraint rank test: a candidate is a vertex of the lifted set iff
// its active box walls and distance-epigraph facets span full dimension.  The
// exponentially many active facets sharing a coordinate sign pattern span the
// same space as one base facet plus one sign flip per tied coordinate.
bool is_lifted_vertex(const std::vector<double>& lower, const std::vector<double>& upper,
                      const std::vector<double>& atom, const std::vector<double>& xi) {
  const std::size_t d = atom.size();
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < d; ++i) {
    if (std::isfinite(lower[i]) && xi[i] == lower[i]) {
      std::vector<double> row(d + 1, 0.0);
      row[i] = 1.0;
      rows.push_back(std::move(row));
    }
    if (std::isfinite(upper[i]) && xi[i] == upper[i]) {
      std::vector<double> row(d + 1, 0.0);
      row[i] = 1.0;
      rows.push_back(std::move(row));
    }
  }
  std::vector<double> base(d + 1, 0.0);
  base[d] = 1.0;
  for (std::size_t i = 0; i < d; ++i) base[i] = xi[i] > atom[i] ? -1.0 : 1.0;
  rows.push_back(base);
  for (std::size_t i = 0; i < d; ++i) {
    if (xi[i] != atom[i]) continue;
    std::vector<double> row = base;
    row[i] = -row[i];
    rows.push_back(std::move(row));
  }
  return matrix_rank(std::move(rows), d + 1) == d + 1;
}

double moment_at(const MomentConstraint& m, const std::vector<double>& xi) {
  double v = m.offset;
  for (std::size_t i = 0; i < xi.size(); ++i) v += m.coef[i] * xi[i];
  return v;
}

}  // namespace

std::vector<LiftedVertex> lifted_vertices(const std::vector<double>& lower,
                                          const std::vector<double>& upper,
                                          const std::vector<double>& atom,
                                          std::size_t cap) {
  const std::size_t d = atom.size();
  if (lower.size() != d || upper.size() != d)
    throw std::invalid_argument("lifted_vertices: dimension mismatch");

  std::vector<std::vector<double>> candidates(d);
  std::size_t count = 1;
  for (std::size_t i = 0; i < d; ++i) {
    if (!std::isfinite(atom[i]))
      throw std::invalid_argument("lifted_vertices: outcome must be finite");
    for (const double v : {lower[i], atom[i], upper[i]}) {
      if (!std::isfinite(v)) continue;
      auto& c = candidates[i];
      if (std::find(c.begin(), c.end(), v) == c.end()) c.push_back(v);
    }
    if (candidates[i].empty())
      throw UnboundedUncertainty("lifted_vertices: no finite coordinate candidates");
    count *= candidates[i].size();
    if (count > cap)
      throw TooManyVertices("lifted_vertices: enumeration exceeds " +
                            std::to_string(cap) + " points");
  }

  std::vector<LiftedVertex> out;
  out.reserve(count);
  std::vector<std::size_t> idx(d, 0);
  while (true) {
    LiftedVertex v;
    v.xi.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
      v.xi[i] = candidates[i][idx[i]];
      v.dist += std::fabs(v.xi[i] - atom[i]);
    }
    if (is_lifted_vertex(lower, upper, atom, v.xi)) out.push_back(std::move(v));
    std::size_t i = 0;
    while (i < d && ++idx[i] == candidates[i].size()) idx[i++] = 0;
    if (i == d) break;
  }
  return out;
}

double growth_rate(const StageModel& s, std::optional<double> declared) {
  bool bounded = true;
  for (std::size_t i = 0; i < s.xi_dim; ++i)
    bounded = bounded && std::isfinite(s.xi_lower[i]) && std::isfinite(s.xi_upper[i]);
  if (bounded) return 0.0;
  if (!declared)
    throw MissingGrowthRate(
        "growth_rate: unbounded support requires a declared cost growth bound");
  return *declared;
}

ConvexOracle::ConvexOracle(StageModel stage, std::vector<std::vector<double>> atoms,
                           WassersteinSet set, double penalty,
                           std::optional<double> declared_growth, unsigned workers)
    : stage_(std::move(stage)),
      atoms_(std::move(atoms)),
      set_(std::move(set)),
      penalty_(penalty),
      rate_(growth_rate(stage_, declared_growth)),
      workers_(workers) {
  if (atoms_.empty()) throw std::invalid_argument("ConvexOracle: no outcomes");
  if (!stage_.A.is_zero())
    throw std::invalid_argument("ConvexOracle: uncertainty must not enter the objective");
  // The pricing master only sees enumerated vertices.  A statistic that
  // decreases along an unbounded support direction would let the true inner
  // supremum diverge while the enumeration stays finite.
  for (const MomentConstraint& mc : set_.moments) {
    if (mc.coef.size() != stage_.xi_dim)
      throw std::invalid_argument("ConvexOracle: moment statistic dimension mismatch");
    for (std::size_t i = 0; i < stage_.xi_dim; ++i) {
      if ((!std::isfinite(stage_.xi_upper[i]) && mc.coef[i] < 0.0) ||
          (!std::isfinite(stage_.xi_lower[i]) && mc.coef[i] > 0.0))
        throw std::invalid_argument(
            "ConvexOracle: moment statistic must be bounded below on the support");
    }
  }
  vertices_.reserve(atoms_.size());
  for (const auto& atom : atoms_) {
    if (atom.size() != stage_.xi_dim)
      throw std::invalid_argument("ConvexOracle: outcome dimension mismatch");
    vertices_.push_back(lifted_vertices(stage_.xi_lower, stage_.xi_upper, atom));
  }
}

OracleOutput ConvexOracle::evaluate(const std::vector<double>& x_prev,
                                    const Tail& tail,
                                    std::optional<std::size_t> forward_atom) {
  const std::size_t n = atoms_.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<std::size_t> offset(n + 1, 0);
  for (std::size_t k = 0; k < n; ++k) offset[k + 1] = offset[k] + vertices_[k].size();
  const std::size_t total = offset[n];

  std::vector<StageSolve> sols(total);
  parallel_for(total, workers_, [&](std::size_t f) {
    const std::size_t k =
        static_cast<std::size_t>(std::upper_bound(offset.begin(), offset.end(), f) -
                                 offset.begin()) -
        1;
    sols[f] = solve_regularized_stage(stage_, *tail.lower, x_prev,
                                      vertices_[k][f - offset[k]].xi, penalty_);
  });

  lp::LinearProgram prog;
  const int lam0 = prog.add_var(rate_, lp::kInf, set_.radius, "lambda0");
  const std::size_t m = set_.moments.size();
  for (std::size_t j = 0; j < m; ++j)
    prog.add_var(0.0, lp::kInf, set_.moments[j].bound, "lambda" + std::to_string(j + 1));
  const int tau0 = static_cast<int>(prog.num_vars());
  for (std::size_t k = 0; k < n; ++k) prog.add_var(-lp::kInf, lp::kInf, inv_n);

  std::vector<std::pair<int, double>> row;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = 0; l < vertices_[k].size(); ++l) {
      const LiftedVertex& v = vertices_[k][l];
      row.clear();
      if (v.dist != 0.0) row.emplace_back(lam0, -v.dist);
      for (std::size_t j = 0; j < m; ++j) {
        const double g = moment_at(set_.moments[j], v.xi);
        if (g != 0.0) row.emplace_back(lam0 + 1 + static_cast<int>(j), -g);
      }
      row.emplace_back(tau0 + static_cast<int>(k), -1.0);
      prog.add_row(lp::RowSense::LessEqual, row, -sols[offset[k] + l].value);
    }
  }

  const lp::Solution sol = lp::solve(prog);
  if (sol.status != lp::SolveStatus::Optimal)
    throw OracleFailure(std::string("transport pricing master failed: ") +
                        lp::to_string(sol.status));
  last_lambda0_ = sol.x[static_cast<std::size_t>(lam0)];

  OracleOutput out;
  out.cut.value = sol.objective;
  out.cut.anchor = x_prev;
  out.cut.gradient.assign(x_prev.size(), 0.0);
  weights_.assign(n, {});
  for (std::size_t k = 0; k < n; ++k) {
    weights_[k].resize(vertices_[k].size());
    for (std::size_t l = 0; l < vertices_[k].size(); ++l) {
      const double kappa = sol.duals[offset[k] + l];
      weights_[k][l] = kappa;
      if (kappa == 0.0) continue;
      const auto& grad = sols[offset[k] + l].state_grad;
      for (std::size_t i = 0; i < x_prev.size(); ++i)
        out.cut.gradient[i] += kappa * grad[i];
    }
  }

  double total_gap = 0.0;
  std::optional<std::size_t> want;
  if (forward_atom) want = std::min(*forward_atom, n - 1);
  for (std::size_t k = 0; k < n; ++k) {
    double gap_k = -std::numeric_limits<double>::infinity();
    std::size_t best_l = 0;
    for (std::size_t l = 0; l < vertices_[k].size(); ++l) {
      const double g = tail.gap(sols[offset[k] + l].x);
      if (g > gap_k) {
        gap_k = g;
        best_l = l;
      }
    }
    total_gap += gap_k;
    if (want ? k == *want : (k == 0 || gap_k > out.gap)) {
      out.next_state = sols[offset[k] + best_l].x;
      out.gap = gap_k;
    }
  }
  out.overestimate = sol.objective + total_gap * inv_n;
  return out;
}

}  // namespace wdro
