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

#include "wdro/measures.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "wdro/lp.hpp"

namespace wdro {

DiscreteMeasure DiscreteMeasure::uniform(std::vector<std::vector<double>> atoms) {
  DiscreteMeasure m;
  const double w = atoms.empty() ? 0.0 : 1.0 / double(atoms.size());
  m.weights.assign(atoms.size(), w);
  m.atoms = std::move(atoms);
  return m;
}

double l1_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] - b[i]);
  return s;
}

double wasserstein_l1(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  const std::size_t n = mu.size(), m = nu.size();
  if (n == 0 || m == 0) throw std::invalid_argument("empty measure");
  if (mu.dim() != nu.dim()) throw std::invalid_argument("dimension mismatch");
  lp::LinearProgram prog;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      prog.add_var(0.0, lp::kInf, l1_distance(mu.atoms[i], nu.atoms[j]));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::pair<int, double>> terms;
    for (std::size_t j = 0; j < m; ++j) terms.push_back({int(i * m + j), 1.0});
    prog.add_row(lp::RowSense::Equal, std::move(terms), mu.weights[i]);
  }
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<std::pair<int, double>> terms;
    for (std::size_t i = 0; i < n; ++i) terms.push_back({int(i * m + j), 1.0});
    prog.add_row(lp::RowSense::Equal, std::move(terms), nu.weights[j]);
  }
  const lp::Solution sol = lp::solve(prog);
  if (sol.status != lp::SolveStatus::Optimal)
    throw std::runtime_error("transport solve failed: " +
                             std::string(lp::to_string(sol.status)));
  return sol.objective;
}

double radius_hat(const DiscreteMeasure& m) {
  double best = 0.0;
  for (std::size_t k = 0; k < m.size(); ++k) {
    double s = 0.0;
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (j == k) continue;
      s += m.weights[j] * l1_distance(m.atoms[k], m.atoms[j]);
    }
    best = std::max(best, s);
  }
  return best;
}

namespace {

// Symmetric square root; eigenvalues in [-1e-10, 0) are clipped to zero,
// anything lower is rejected.
Eigen::MatrixXd covariance_factor(const Matrix& sigma) {
  const std::size_t d = sigma.rows;
  Eigen::MatrixXd s(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) s(i, j) = sigma(i, j);
  if (!s.isApprox(s.transpose(), 1e-12))
    throw NonPsdCovariance("covariance is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw NonPsdCovariance("covariance has a negative eigenvalue");
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal();
}

}  // namespace

std::vector<double> ArLogNormal::step(std::size_t t, const std::vector<double>& xi_prev,
                                      Rng& rng) const {
  const std::size_t T = horizon();
  const std::size_t d = xi1.size();
  if (t < 1 || t >= T) throw std::out_of_range("noninitial stage index");
  if (phi.size() != T - 1 || sigma.size() != T - 1)
    throw std::invalid_argument("inconsistent process description");
  if (xi_prev.size() != d || mu[t].size() != d || mu[t - 1].size() != d ||
      phi[t - 1].size() != d)
    throw std::invalid_argument("process dimension mismatch");
  const Eigen::MatrixXd factor = covariance_factor(sigma[t - 1]);
  Eigen::VectorXd z(d);
  for (std::size_t i = 0; i < d; ++i) z(i) = rng.normal();
  const Eigen::VectorXd eps = factor * z;
  std::vector<double> xi(d);
  for (std::size_t i = 0; i < d; ++i) {
    if (!(xi_prev[i] > 0.0))
      throw std::invalid_argument("autoregression needs positive previous values");
    const double ln =
        mu[t][i] + phi[t - 1][i] * (std::log(xi_prev[i]) - mu[t - 1][i]) + eps(i);
    xi[i] = std::max(std::exp(ln), floor);
  }
  return xi;
}

std::vector<std::vector<std::vector<double>>> ArLogNormal::simulate(
    std::size_t paths, std::uint64_t seed) const {
  const std::size_t T = horizon();
  if (T == 0) throw std::invalid_argument("empty process");
  std::vector<std::vector<std::vector<double>>> out(paths);
  for (std::size_t p = 0; p < paths; ++p) {
    Rng rng = Rng::stream(seed, p);
    std::vector<double> prev = xi1;
    out[p].reserve(T - 1);
    for (std::size_t t = 1; t < T; ++t) {
      prev = step(t, prev, rng);
      out[p].push_back(prev);
    }
  }
  return out;
}

std::vector<double> sample_normal(const std::vector<double>& mean, const Matrix& cov,
                                  Rng& rng) {
  const std::size_t d = mean.size();
  if (cov.rows != d || cov.cols != d)
    throw std::invalid_argument("covariance dimension mismatch");
  const Eigen::MatrixXd factor = covariance_factor(cov);
  Eigen::VectorXd z(d);
  for (std::size_t i = 0; i < d; ++i) z(i) = rng.normal();
  const Eigen::VectorXd eps = factor * z;
  std::vector<double> out(d);
  for (std::size_t i = 0; i < d; ++i) out[i] = mean[i] + eps(i);
  return out;
}

LognormalFit fit_lognormal(const std::vector<std::vector<double>>& samples) {
  if (samples.empty()) throw std::invalid_argument("no samples");
  const std::size_t n = samples.size();
  const std::size_t d = samples.front().size();
  Eigen::MatrixXd logs(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    if (samples[i].size() != d) throw std::invalid_argument("ragged samples");
    for (std::size_t j = 0; j < d; ++j) {
      if (!(samples[i][j] > 0.0))
        throw std::invalid_argument("lognormal fit needs positive samples");
      logs(i, j) = std::log(samples[i][j]);
    }
  }
  const Eigen::VectorXd mean = logs.colwise().mean();
  Eigen::MatrixXd centered = logs.rowwise() - mean.transpose();
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  if (n > 1) cov = centered.transpose() * centered / double(n - 1);

  LognormalFit fit;
  fit.log_mean.assign(mean.data(), mean.data() + d);
  fit.log_cov = Matrix(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) fit.log_cov(i, j) = cov(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  const double top = es.eigenvalues().cwiseAbs().maxCoeff();
  fit.degenerate = es.eigenvalues().minCoeff() <= 1e-12 * std::max(1.0, top);
  return fit;
}

DiscreteMeasure sample_lognormal(const LognormalFit& fit, std::size_t count,
                                 std::uint64_t seed) {
  const std::size_t d = fit.log_mean.size();
  if (fit.log_cov.rows != d || fit.log_cov.cols != d)
    throw std::invalid_argument("fit dimension mismatch");
  const Eigen::MatrixXd factor = covariance_factor(fit.log_cov);
  Eigen::VectorXd mean(d);
  for (std::size_t j = 0; j < d; ++j) mean(j) = fit.log_mean[j];

  DiscreteMeasure out;
  Rng rng = Rng::stream(seed, 0x5aa5);
  for (std::size_t k = 0; k < count; ++k) {
    Eigen::VectorXd z(d);
    for (std::size_t j = 0; j < d; ++j) z(j) = rng.normal();
    const Eigen::VectorXd v = mean + factor * z;
    std::vector<double> atom(d);
    for (std::size_t j = 0; j < d; ++j) atom[j] = std::exp(v(j));
    out.atoms.push_back(std::move(atom));
  }
  out.weights.assign(count, count ? 1.0 / double(count) : 0.0);
  return out;
}

void save_measure_csv(const DiscreteMeasure& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  const std::size_t d = m.dim();
  for (std::size_t j = 0; j < d; ++j) out << "x" << j << ",";
  out << "weight\n";
  char buf[40];
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m.atoms[i][j]);
      out << buf << ",";
    }
    std::snprintf(buf, sizeof buf, "%.17g", m.weights[i]);
    out << buf << "\n";
  }
}

DiscreteMeasure load_measure_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  DiscreteMeasure m;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.empty()) continue;
    m.weights.push_back(row.back());
    row.pop_back();
    m.atoms.push_back(std::move(row));
  }
  return m;
}

}  // namespace wdro
