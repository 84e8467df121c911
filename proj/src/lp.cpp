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

#include "wdro/lp.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "wdro/simd_kernels.hpp"

namespace wdro::lp {

int LinearProgram::add_var(double lb, double ub, double c, std::string name) {
  if (lb > ub) throw std::invalid_argument("variable with lb > ub");
  lower.push_back(lb);
  upper.push_back(ub);
  cost.push_back(c);
  if (!name.empty() || !var_names.empty()) {
    var_names.resize(cost.size());
    var_names.back() = std::move(name);
  }
  return static_cast<int>(cost.size()) - 1;
}

int LinearProgram::add_row(RowSense s, std::vector<std::pair<int, double>> terms,
                           double b, std::string name) {
  rows.push_back(std::move(terms));
  rhs.push_back(b);
  sense.push_back(s);
  if (!name.empty() || !row_names.empty()) {
    row_names.resize(rhs.size());
    row_names.back() = std::move(name);
  }
  return static_cast<int>(rhs.size()) - 1;
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::IterationLimit: return "iteration_limit";
    case SolveStatus::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

namespace {

enum class VarStat : char { Basic, AtLower, AtUpper, Free, Fixed };

// Bounded-variable two-phase revised simplex on the system
//   [A | I_slack | S_art] [x; s; a] = b,
// with an explicit dense basis inverse refreshed periodically.
class Simplex {
 public:
  Simplex(const LinearProgram& lp, const SolveOptions& opts)
      : lp_(lp), opts_(opts), m_(lp.num_rows()), n_(lp.num_vars()) {}

  Solution run();

 private:
  static constexpr double kPivTol = 1e-9;

  const LinearProgram& lp_;
  SolveOptions opts_;
  std::size_t m_, n_;
  std::size_t nt_ = 0;  // structural + slack + artificial count

  std::vector<double> cols_;   // column-major dense structural columns, m_*n_
  std::vector<double> lb_, ub_, val_, c1_, c2_;
  std::vector<VarStat> stat_;
  std::vector<int> basic_;     // var index per basis row
  std::vector<int> art_row_;   // row of each artificial
  std::vector<double> art_sign_;
  std::vector<double> binv_;   // m_*m_, row-major
  std::vector<double> y_, d_, w_, colbuf_;
  int iters_ = 0;
  int phase1_iters_ = 0;
  bool bland_ = false;
  int degenerate_run_ = 0;
  int since_refactor_ = 0;

  double& binv(std::size_t i, std::size_t j) { return binv_[i * m_ + j]; }
  const double* binv_row(std::size_t i) const { return &binv_[i * m_]; }
  double* binv_row(std::size_t i) { return &binv_[i * m_]; }

  bool is_artificial(int j) const { return j >= int(n_ + m_); }
  bool is_slack(int j) const { return j >= int(n_) && j < int(n_ + m_); }

  void build_columns();
  void choose_initial_point();
  void assemble_basis();
  double price_column(const std::vector<double>& y, int j) const;
  void column_into(int j, double* buf) const;
  void compute_y(const std::vector<double>& cost);
  void ftran(int j);  // w_ = Binv * column(j)
  bool refactor();
  void recompute_basics();
  int price(const std::vector<double>& cost, int* direction);
  SolveStatus iterate(const std::vector<double>& cost, int phase, int max_iters);
  Solution finish_infeasible();
  Solution finish(SolveStatus st, int phase);
  std::vector<double> make_ray(int entering, int direction) const;
};

void Simplex::build_columns() {
  cols_.assign(m_ * n_, 0.0);
  for (std::size_t i = 0; i < m_; ++i) {
    for (const auto& [j, v] : lp_.rows[i]) {
      if (j < 0 || j >= int(n_)) throw std::invalid_argument("row term out of range");
      cols_[std::size_t(j) * m_ + i] += v;
    }
  }
}

void Simplex::choose_initial_point() {
  lb_.assign(lp_.lower.begin(), lp_.lower.end());
  ub_.assign(lp_.upper.begin(), lp_.upper.end());
  c2_.assign(lp_.cost.begin(), lp_.cost.end());
  // slacks
  for (std::size_t i = 0; i < m_; ++i) {
    lb_.push_back(0.0);
    ub_.push_back(lp_.sense[i] == RowSense::LessEqual ? kInf : 0.0);
    c2_.push_back(0.0);
  }
  nt_ = n_ + m_;
  val_.assign(nt_, 0.0);
  stat_.assign(nt_, VarStat::AtLower);
  for (std::size_t j = 0; j < nt_; ++j) {
    if (lb_[j] == ub_[j]) {
      stat_[j] = VarStat::Fixed;
      val_[j] = lb_[j];
    } else if (std::isfinite(lb_[j]) &&
               (!std::isfinite(ub_[j]) || std::fabs(lb_[j]) <= std::fabs(ub_[j]))) {
      stat_[j] = VarStat::AtLower;
      val_[j] = lb_[j];
    } else if (std::isfinite(ub_[j])) {
      stat_[j] = VarStat::AtUpper;
      val_[j] = ub_[j];
    } else {
      stat_[j] = VarStat::Free;
      val_[j] = 0.0;
    }
  }
}

void Simplex::assemble_basis() {
  std::vector<double> resid(lp_.rhs.begin(), lp_.rhs.end());
  for (std::size_t j = 0; j < n_; ++j) {
    if (val_[j] != 0.0) simd::axpy(-val_[j], &cols_[j * m_], resid.data(), m_);
  }
  basic_.assign(m_, -1);
  art_row_.clear();
  art_sign_.clear();
  for (std::size_t i = 0; i < m_; ++i) {
    const double r = resid[i];
    const bool le = lp_.sense[i] == RowSense::LessEqual;
    if (le && r >= 0.0) {
      basic_[i] = int(n_ + i);
      stat_[n_ + i] = VarStat::Basic;
      val_[n_ + i] = r;
    } else if (!le && r == 0.0) {
      basic_[i] = int(n_ + i);
      stat_[n_ + i] = VarStat::Basic;
      val_[n_ + i] = 0.0;
    } else {
      const double sign = r >= 0.0 ? 1.0 : -1.0;
      art_row_.push_back(int(i));
      art_sign_.push_back(sign);
      lb_.push_back(0.0);
      ub_.push_back(kInf);
      c2_.push_back(0.0);
      val_.push_back(std::fabs(r));
      stat_.push_back(VarStat::Basic);
      basic_[i] = int(nt_);
      ++nt_;
    }
  }
  c1_.assign(nt_, 0.0);
  for (std::size_t a = 0; a < art_row_.size(); ++a) c1_[n_ + m_ + a] = 1.0;
  c2_.resize(nt_, 0.0);
  // The starting basis is diagonal: +1 for slack columns, the artificial's
  // sign where one was installed.
  binv_.assign(m_ * m_, 0.0);
  for (std::size_t i = 0; i < m_; ++i) binv(i, i) = 1.0;
  for (std::size_t a = 0; a < art_row_.size(); ++a)
    binv(art_row_[a], art_row_[a]) = art_sign_[a];
  y_.assign(m_, 0.0);
  d_.assign(nt_, 0.0);
  w_.assign(m_, 0.0);
  colbuf_.assign(m_, 0.0);
}

double Simplex::price_column(const std::vector<double>& y, int j) const {
  if (j < int(n_)) return simd::dot(y.data(), &cols_[std::size_t(j) * m_], m_);
  if (is_slack(j)) return y[j - int(n_)];
  const int a = j - int(n_ + m_);
  return art_sign_[a] * y[art_row_[a]];
}

void Simplex::column_into(int j, double* buf) const {
  std::fill(buf, buf + m_, 0.0);
  if (j < int(n_)) {
    std::copy(&cols_[std::size_t(j) * m_], &cols_[std::size_t(j) * m_] + m_, buf);
  } else if (is_slack(j)) {
    buf[j - int(n_)] = 1.0;
  } else {
    const int a = j - int(n_ + m_);
    buf[art_row_[a]] = art_sign_[a];
  }
}

void Simplex::compute_y(const std::vector<double>& cost) {
  std::fill(y_.begin(), y_.end(), 0.0);
  for (std::size_t i = 0; i < m_; ++i) {
    const double cb = cost[basic_[i]];
    if (cb != 0.0) simd::axpy(cb, binv_row(i), y_.data(), m_);
  }
}

void Simplex::ftran(int j) {
  if (j < int(n_)) {
    const double* col = &cols_[std::size_t(j) * m_];
    for (std::size_t i = 0; i < m_; ++i) w_[i] = simd::dot(binv_row(i), col, m_);
  } else {
    std::size_t r;
    double s;
    if (is_slack(j)) {
      r = std::size_t(j - int(n_));
      s = 1.0;
    } else {
      const int a = j - int(n_ + m_);
      r = std::size_t(art_row_[a]);
      s = art_sign_[a];
    }
    for (std::size_t i = 0; i < m_; ++i) w_[i] = s * binv_[i * m_ + r];
  }
}

bool Simplex::refactor() {
  // Gauss-Jordan inversion of the basis matrix with partial pivoting.
  std::vector<double> b(m_ * m_, 0.0);
  for (std::size_t i = 0; i < m_; ++i) {
    column_into(basic_[i], colbuf_.data());
    for (std::size_t r = 0; r < m_; ++r) b[r * m_ + i] = colbuf_[r];
  }
  std::vector<double> inv(m_ * m_, 0.0);
  for (std::size_t i = 0; i < m_; ++i) inv[i * m_ + i] = 1.0;
  for (std::size_t k = 0; k < m_; ++k) {
    std::size_t piv = k;
    double best = std::fabs(b[k * m_ + k]);
    for (std::size_t r = k + 1; r < m_; ++r) {
      const double v = std::fabs(b[r * m_ + k]);
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best < 1e-12) return false;
    if (piv != k) {
      for (std::size_t c = 0; c < m_; ++c) {
        std::swap(b[piv * m_ + c], b[k * m_ + c]);
        std::swap(inv[piv * m_ + c], inv[k * m_ + c]);
      }
    }
    const double inv_piv = 1.0 / b[k * m_ + k];
    simd::scale(inv_piv, &b[k * m_], m_);
    simd::scale(inv_piv, &inv[k * m_], m_);
    for (std::size_t r = 0; r < m_; ++r) {
      if (r == k) continue;
      const double f = b[r * m_ + k];
      if (f != 0.0) {
        simd::axpy(-f, &b[k * m_], &b[r * m_], m_);
        simd::axpy(-f, &inv[k * m_], &inv[r * m_], m_);
      }
    }
  }
  binv_ = std::move(inv);
  since_refactor_ = 0;
  return true;
}

void Simplex::recompute_basics() {
  std::vector<double> r(lp_.rhs.begin(), lp_.rhs.end());
  for (std::size_t j = 0; j < nt_; ++j) {
    if (stat_[j] == VarStat::Basic || val_[j] == 0.0) continue;
    column_into(int(j), colbuf_.data());
    simd::axpy(-val_[j], colbuf_.data(), r.data(), m_);
  }
  for (std::size_t i = 0; i < m_; ++i) {
    val_[basic_[i]] = simd::dot(binv_row(i), r.data(), m_);
  }
}

int Simplex::price(const std::vector<double>& cost, int* direction) {
  compute_y(cost);
  int best = -1, best_dir = 0;
  double best_score = opts_.tolerance;
  for (std::size_t j = 0; j < nt_; ++j) {
    const VarStat st = stat_[j];
    if (st == VarStat::Basic || st == VarStat::Fixed) continue;
    const double dj = cost[j] - price_column(y_, int(j));
    d_[j] = dj;
    int dir = 0;
    if ((st == VarStat::AtLower || st == VarStat::Free) && dj < -opts_.tolerance)
      dir = +1;
    else if ((st == VarStat::AtUpper || st == VarStat::Free) && dj > opts_.tolerance)
      dir = -1;
    if (dir == 0) continue;
    if (bland_ || opts_.bland_only) {
      best = int(j);
      best_dir = dir;
      break;
    }
    if (std::fabs(dj) > best_score) {
      best_score = std::fabs(dj);
      best = int(j);
      best_dir = dir;
    }
  }
  *direction = best_dir;
  return best;
}

SolveStatus Simplex::iterate(const std::vector<double>& cost, int phase,
                             int max_iters) {
  int local_iters = 0;
  while (true) {
    if (local_iters++ > max_iters) return SolveStatus::IterationLimit;
    int dir;
    const int j = price(cost, &dir);
    if (j < 0) return SolveStatus::Optimal;
    ftran(j);

    // Ratio test: largest step t >= 0 for the entering variable moving in
    // `dir` before a basic variable hits a bound or the entering variable
    // flips to its opposite bound.
    double t_limit = kInf;
    int leave = -1;        // basis row of the blocking variable
    int leave_bound = 0;   // -1 lower, +1 upper
    double span = ub_[j] - lb_[j];
    bool bound_flip = std::isfinite(span);
    if (bound_flip) t_limit = span;
    double best_piv = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const double wi = dir * w_[i];
      if (std::fabs(wi) <= kPivTol) continue;
      const int bj = basic_[i];
      double t;
      int hit;
      if (wi > 0.0) {
        if (!std::isfinite(lb_[bj])) continue;
        t = (val_[bj] - lb_[bj]) / wi;
        hit = -1;
      } else {
        if (!std::isfinite(ub_[bj])) continue;
        t = (val_[bj] - ub_[bj]) / wi;
        hit = +1;
      }
      if (t < 0.0) t = 0.0;
      const double tie = 1e-10 * (1.0 + std::fabs(t_limit));
      if (t < t_limit - tie ||
          (t < t_limit + tie && std::fabs(wi) > best_piv)) {
        t_limit = t;
        leave = int(i);
        leave_bound = hit;
        best_piv = std::fabs(wi);
        bound_flip = false;
        if (std::isfinite(span) && span <= t_limit) {
          bound_flip = true;
          leave = -1;
        }
      }
    }
    if (!std::isfinite(t_limit)) return SolveStatus::Unbounded;

    ++iters_;
    if (phase == 1) ++phase1_iters_;
    if (t_limit <= 1e-12) {
      if (++degenerate_run_ > int(2 * m_) + 20) bland_ = true;
    } else {
      degenerate_run_ = 0;
      bland_ = false;
    }

    if (bound_flip && leave < 0) {
      // The entering variable traverses to its other bound; basis unchanged.
      const double t = dir > 0 ? span : -span;
      for (std::size_t i = 0; i < m_; ++i) val_[basic_[i]] -= t * w_[i];
      val_[j] = dir > 0 ? ub_[j] : lb_[j];
      stat_[j] = dir > 0 ? VarStat::AtUpper : VarStat::AtLower;
      continue;
    }

    const double piv = w_[leave];
    if (std::fabs(piv) < 1e-10) {
      if (since_refactor_ > 0) {
        if (!refactor()) return SolveStatus::NumericalFailure;
        recompute_basics();
        continue;  // retry the iteration with a fresh inverse
      }
      return SolveStatus::NumericalFailure;
    }

    const double t = dir * t_limit;
    for (std::size_t i = 0; i < m_; ++i) val_[basic_[i]] -= t * w_[i];
    val_[j] = (stat_[j] == VarStat::Free ? 0.0 : val_[j]) + t;
    const int out = basic_[leave];
    val_[out] = leave_bound < 0 ? lb_[out] : ub_[out];
    stat_[out] = lb_[out] == ub_[out] ? VarStat::Fixed
                 : (leave_bound < 0 ? VarStat::AtLower : VarStat::AtUpper);
    stat_[j] = VarStat::Basic;
    basic_[leave] = j;

    // Product-form update of the explicit inverse.
    const double inv_piv = 1.0 / piv;
    simd::scale(inv_piv, binv_row(leave), m_);
    for (std::size_t i = 0; i < m_; ++i) {
      if (int(i) == leave) continue;
      const double f = w_[i];
      if (f != 0.0) simd::axpy(-f, binv_row(leave), binv_row(i), m_);
    }
    if (++since_refactor_ >= opts_.refactor_interval) {
      if (!refactor()) return SolveStatus::NumericalFailure;
      recompute_basics();
    }
  }
}

std::vector<double> Simplex::make_ray(int entering, int direction) const {
  std::vector<double> ray(n_, 0.0);
  if (entering < int(n_)) ray[entering] = double(direction);
  for (std::size_t i = 0; i < m_; ++i) {
    const int bj = basic_[i];
    if (bj < int(n_)) ray[bj] = -direction * w_[i];
  }
  return ray;
}

Solution Simplex::finish_infeasible() {
  Solution sol;
  sol.status = SolveStatus::Infeasible;
  sol.iterations = iters_;
  sol.phase1_iterations = phase1_iters_;
  compute_y(c1_);
  sol.farkas.assign(m_, 0.0);
  for (std::size_t i = 0; i < m_; ++i) {
    double yi = y_[i];
    if (lp_.sense[i] == RowSense::LessEqual && yi > 0.0) yi = 0.0;
    sol.farkas[i] = yi;
  }
  return sol;
}

Solution Simplex::finish(SolveStatus st, int phase) {
  Solution sol;
  sol.status = st;
  sol.iterations = iters_;
  sol.phase1_iterations = phase1_iters_;
  sol.x.assign(val_.begin(), val_.begin() + n_);
  sol.objective = lp_.cost_offset;
  for (std::size_t j = 0; j < n_; ++j) sol.objective += lp_.cost[j] * sol.x[j];

  if (st == SolveStatus::Optimal) {
    compute_y(c2_);
    sol.duals.assign(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) sol.duals[i] = -y_[i];
    sol.reduced_costs.assign(n_, 0.0);
    double dual_obj = lp_.cost_offset + simd::dot(y_.data(), lp_.rhs.data(), m_);
    for (std::size_t j = 0; j < nt_; ++j) {
      double dj = 0.0;
      if (stat_[j] != VarStat::Basic) dj = c2_[j] - price_column(y_, int(j));
      if (j < n_) sol.reduced_costs[j] = dj;
      if (is_artificial(int(j)) || dj == 0.0) continue;
      double bound = dj > 0.0 ? lb_[j] : ub_[j];
      if (!std::isfinite(bound)) bound = val_[j];
      dual_obj += dj * bound;
    }
    sol.dual_objective = dual_obj;
  } else if (st == SolveStatus::Unbounded) {
    sol.dual_objective = -kInf;
  }

  // Primal residual over rows and bounds.
  double res = 0.0;
  for (std::size_t i = 0; i < m_; ++i) {
    double ax = 0.0;
    for (const auto& [j, v] : lp_.rows[i]) ax += v * sol.x[j];
    const double slack = lp_.rhs[i] - ax;
    if (lp_.sense[i] == RowSense::Equal)
      res = std::max(res, std::fabs(slack));
    else
      res = std::max(res, -slack);
  }
  for (std::size_t j = 0; j < n_; ++j) {
    if (std::isfinite(lp_.lower[j])) res = std::max(res, lp_.lower[j] - sol.x[j]);
    if (std::isfinite(lp_.upper[j])) res = std::max(res, sol.x[j] - lp_.upper[j]);
  }
  sol.max_primal_residual = res;
  (void)phase;
  return sol;
}

Solution Simplex::run() {
  build_columns();
  choose_initial_point();
  assemble_basis();

  const int max_iters = opts_.max_iterations > 0
                            ? opts_.max_iterations
                            : int(1000 + 60 * (m_ + n_));

  if (!art_row_.empty()) {
    const SolveStatus st1 = iterate(c1_, 1, max_iters);
    if (st1 == SolveStatus::NumericalFailure || st1 == SolveStatus::IterationLimit) {
      Solution sol;
      sol.status = st1;
      sol.iterations = iters_;
      sol.phase1_iterations = phase1_iters_;
      return sol;
    }
    double infeas = 0.0;
    for (std::size_t a = 0; a < art_row_.size(); ++a) infeas += val_[n_ + m_ + a];
    double scale = 1.0;
    for (std::size_t i = 0; i < m_; ++i) scale = std::max(scale, std::fabs(lp_.rhs[i]));
    if (infeas > opts_.feasibility_tol * scale * 10.0) return finish_infeasible();
    // Pin artificials at zero for phase 2.
    for (std::size_t a = 0; a < art_row_.size(); ++a) {
      const std::size_t j = n_ + m_ + a;
      lb_[j] = ub_[j] = 0.0;
      if (stat_[j] != VarStat::Basic) {
        stat_[j] = VarStat::Fixed;
        val_[j] = 0.0;
      }
    }
  }

  degenerate_run_ = 0;
  bland_ = false;
  const SolveStatus st2 = iterate(c2_, 2, max_iters);
  if (st2 == SolveStatus::NumericalFailure || st2 == SolveStatus::IterationLimit) {
    Solution sol;
    sol.status = st2;
    sol.iterations = iters_;
    sol.phase1_iterations = phase1_iters_;
    return sol;
  }
  if (st2 == SolveStatus::Unbounded) {
    int dir;
    const int j = price(c2_, &dir);
    Solution sol = finish(SolveStatus::Unbounded, 2);
    if (j >= 0) {
      ftran(j);
      sol.ray = make_ray(j, dir);
    }
    return sol;
  }
  return finish(SolveStatus::Optimal, 2);
}

}  // namespace

Solution solve(const LinearProgram& lp, const SolveOptions& opts) {
  if (lp.lower.size() != lp.num_vars() || lp.upper.size() != lp.num_vars())
    throw std::invalid_argument("inconsistent variable arrays");
  if (lp.rows.size() != lp.num_rows() || lp.sense.size() != lp.num_rows())
    throw std::invalid_argument("inconsistent row arrays");
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    if (lp.lower[j] > lp.upper[j]) {
      Solution sol;
      sol.status = SolveStatus::Infeasible;
      return sol;
    }
  }
  Simplex s(lp, opts);
  return s.run();
}

double farkas_gap(const LinearProgram& lp, const std::vector<double>& y) {
  if (y.size() != lp.num_rows()) return -kInf;
  double gap = 0.0;
  std::vector<double> ya(lp.num_vars(), 0.0);
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    double yi = y[i];
    if (lp.sense[i] == RowSense::LessEqual && yi > 0.0) yi = 0.0;
    gap += yi * lp.rhs[i];
    for (const auto& [j, v] : lp.rows[i]) ya[j] += yi * v;
  }
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    if (ya[j] > 0.0)
      gap -= ya[j] * lp.upper[j];
    else if (ya[j] < 0.0)
      gap -= ya[j] * lp.lower[j];
    if (!std::isfinite(gap)) return -kInf;
  }
  return gap;
}

double ray_cost(const LinearProgram& lp, const std::vector<double>& ray) {
  double c = 0.0;
  for (std::size_t j = 0; j < lp.num_vars() && j < ray.size(); ++j)
    c += lp.cost[j] * ray[j];
  return c;
}

}  // namespace wdro::lp
