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

#include "wdro/oracle_baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "wdro/parallel.hpp"
#include "wdro/stage_lp.hpp"

namespace wdro {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Index of the largest finite-or-infinite gap, lowest index on ties.
std::size_t argmax_gap(const std::vector<double>& gaps) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < gaps.size(); ++k) {
    if (gaps[k] > gaps[best]) best = k;
  }
  return best;
}

}  // namespace

std::vector<double> cvar_weights(const std::vector<double>& values, double alpha,
                                 double beta) {
  const std::size_t n = values.size();
  if (n == 0) throw std::invalid_argument("cvar_weights: no outcomes");
  if (!(alpha > 0.0) || alpha > 1.0)
    throw std::invalid_argument("cvar_weights: alpha must lie in (0, 1]");
  if (beta < 0.0 || beta > 1.0)
    throw std::invalid_argument("cvar_weights: beta must lie in [0, 1]");

  const double cap =
      beta / static_cast<double>(n) + (1.0 - beta) / (alpha * static_cast<double>(n));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] > values[b];
  });

  std::vector<double> weights(n, 0.0);
  double remaining = 1.0;
  for (std::size_t k : order) {
    const double w = std::min(cap, remaining);
    weights[k] = w;
    remaining -= w;
    if (remaining <= 0.0) break;
  }
  return weights;
}

ScenarioOracle::ScenarioOracle(StageModel stage, std::vector<std::vector<double>> atoms,
                               double alpha, double beta, double penalty,
                               unsigned workers)
    : stage_(std::move(stage)),
      atoms_(std::move(atoms)),
      alpha_(alpha),
      beta_(beta),
      penalty_(penalty),
      workers_(workers) {
  if (atoms_.empty()) throw std::invalid_argument("ScenarioOracle: no outcomes");
  for (const auto& atom : atoms_) {
    if (atom.size() != stage_.xi_dim)
      throw std::invalid_argument("ScenarioOracle: outcome dimension mismatch");
  }
}

OracleOutput ScenarioOracle::evaluate(const std::vector<double>& x_prev,
                                      const Tail& tail,
                                      std::optional<std::size_t> forward_atom) {
  const std::size_t n = atoms_.size();
  std::vector<StageSolve> sols(n);
  parallel_for(n, workers_, [&](std::size_t k) {
    sols[k] = solve_regularized_stage(stage_, *tail.lower, x_prev, atoms_[k], penalty_);
  });

  std::vector<double> values(n), gaps(n);
  for (std::size_t k = 0; k < n; ++k) {
    values[k] = sols[k].value;
    gaps[k] = tail.gap(sols[k].x);
  }

  const std::vector<double> p_lo = cvar_weights(values, alpha_, beta_);
  Cut cut;
  cut.anchor = x_prev;
  cut.gradient.assign(x_prev.size(), 0.0);
  cut.value = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (p_lo[k] == 0.0) continue;
    cut.value += p_lo[k] * values[k];
    for (std::size_t i = 0; i < x_prev.size(); ++i)
      cut.gradient[i] += p_lo[k] * sols[k].state_grad[i];
  }

  double over = kInf;
  if (std::all_of(gaps.begin(), gaps.end(),
                  [](double g) { return std::isfinite(g); })) {
    std::vector<double> highs(n);
    for (std::size_t k = 0; k < n; ++k) highs[k] = values[k] + gaps[k];
    const std::vector<double> p_hi = cvar_weights(highs, alpha_, beta_);
    over = 0.0;
    for (std::size_t k = 0; k < n; ++k) over += p_hi[k] * highs[k];
  }

  const std::size_t k_star =
      forward_atom ? std::min(*forward_atom, n - 1) : argmax_gap(gaps);
  OracleOutput out;
  out.cut = std::move(cut);
  out.overestimate = over;
  out.next_state = sols[k_star].x;
  out.gap = gaps[k_star];
  return out;
}

RobustOracle::RobustOracle(StageModel stage, double penalty, unsigned workers)
    : stage_(std::move(stage)), penalty_(penalty), workers_(workers) {
  const std::size_t d = stage_.xi_dim;
  for (std::size_t i = 0; i < d; ++i) {
    if (!std::isfinite(stage_.xi_lower[i]) || !std::isfinite(stage_.xi_upper[i]))
      throw UnboundedUncertainty("RobustOracle: stage support must be a bounded box");
  }
  if (d > 20)
    throw std::invalid_argument("RobustOracle: support box has too many vertices");
  const std::size_t count = std::size_t{1} << d;
  vertices_.reserve(count);
  for (std::size_t mask = 0; mask < count; ++mask) {
    std::vector<double> v(d);
    for (std::size_t i = 0; i < d; ++i)
      v[i] = (mask >> i) & 1 ? stage_.xi_upper[i] : stage_.xi_lower[i];
    vertices_.push_back(std::move(v));
  }
}

OracleOutput RobustOracle::evaluate(const std::vector<double>& x_prev,
                                    const Tail& tail,
                                    std::optional<std::size_t> /*forward_atom*/) {
  const std::size_t n = vertices_.size();
  std::vector<StageSolve> sols(n);
  parallel_for(n, workers_, [&](std::size_t l) {
    sols[l] =
        solve_regularized_stage(stage_, *tail.lower, x_prev, vertices_[l], penalty_);
  });

  std::size_t worst = 0;
  double over = -kInf;
  for (std::size_t l = 0; l < n; ++l) {
    if (sols[l].value > sols[worst].value) worst = l;
    over = std::max(over, sols[l].value + tail.gap(sols[l].x));
  }

  OracleOutput out;
  out.cut.anchor = x_prev;
  out.cut.gradient = sols[worst].state_grad;
  out.cut.value = sols[worst].value;
  out.overestimate = over;
  out.next_state = sols[worst].x;
  out.gap = tail.gap(sols[worst].x);
  return out;
}

}  // namespace wdro
