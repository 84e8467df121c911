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

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "wdro/model.hpp"
#include "wdro/rng.hpp"

namespace wdro {

struct DiscreteMeasure {
  std::vector<std::vector<double>> atoms;
  std::vector<double> weights;

  static DiscreteMeasure uniform(std::vector<std::vector<double>> atoms);
  std::size_t size() const { return atoms.size(); }
  std::size_t dim() const { return atoms.empty() ? 0 : atoms.front().size(); }
};

double l1_distance(const std::vector<double>& a, const std::vector<double>& b);

// Exact order-1 transport distance under the L1 ground metric, via the
// transportation linear program.
double wasserstein_l1(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

// Dispersion statistic used to scale ambiguity radii:
//   max_k sum_{k'} w_{k'} |atom_k - atom_{k'}|_1,
// the largest transport distance from the measure to one of its own atoms.
double radius_hat(const DiscreteMeasure& m);

struct NonPsdCovariance : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Log-space first-order autoregressive process
//   ln xi_t - mu_t = phi_t . (ln xi_{t-1} - mu_{t-1}) + eps_t,
//   eps_t ~ Normal(0, Sigma_t)  (componentwise phi),
// with a deterministic first-stage value and outputs floored after
// exponentiation.  mu has one entry per stage; phi and sigma have one entry
// per noninitial stage.
struct ArLogNormal {
  std::vector<std::vector<double>> mu;
  std::vector<std::vector<double>> phi;
  std::vector<Matrix> sigma;
  std::vector<double> xi1;
  double floor = 0.0;

  std::size_t horizon() const { return mu.size(); }

  // One recursion step onto stage t (1-based noninitial index, 1 <= t < T).
  // Throws NonPsdCovariance when Sigma_t has an eigenvalue below -1e-10;
  // smaller negative eigenvalues are clipped to zero.
  std::vector<double> step(std::size_t t, const std::vector<double>& xi_prev,
                           Rng& rng) const;

  // paths x noninitial-stages x dim; path p uses Rng::stream(seed, p).
  std::vector<std::vector<std::vector<double>>> simulate(std::size_t paths,
                                                         std::uint64_t seed) const;
};

// Componentwise-correlated lognormal fitted by log-space mean and sample
// covariance.  `degenerate` flags a singular covariance (draws then live in
// a proper affine subspace).
struct LognormalFit {
  std::vector<double> log_mean;
  Matrix log_cov;
  bool degenerate = false;
};

LognormalFit fit_lognormal(const std::vector<std::vector<double>>& samples);

DiscreteMeasure sample_lognormal(const LognormalFit& fit, std::size_t count,
                                 std::uint64_t seed);

inline DiscreteMeasure fit_lognormal_saa(const std::vector<std::vector<double>>& samples,
                                         std::size_t count, std::uint64_t seed) {
  return sample_lognormal(fit_lognormal(samples), count, seed);
}

// One draw from Normal(mean, cov).  Covariance eigenvalues in [-1e-10, 0)
// are clipped to zero; anything lower throws NonPsdCovariance.
std::vector<double> sample_normal(const std::vector<double>& mean, const Matrix& cov,
                                  Rng& rng);

// CSV with one atom per line, coordinate columns first, weight column last.
void save_measure_csv(const DiscreteMeasure& m, const std::string& path);
DiscreteMeasure load_measure_csv(const std::string& path);

}  // namespace wdro
