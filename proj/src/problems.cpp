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

#include "wdro/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "wdro/measures.hpp"

namespace wdro {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

void check_inventory(const InventoryParams& p) {
  require(p.products > 0, "inventory needs at least one product");
  require(p.stages > 0, "inventory needs at least one stage");
  require(p.period > 0.0, "demand period must be positive");
  require(p.fixed_cost >= 0.0 && p.express_cost >= 0.0 && p.standard_cost >= 0.0 &&
              p.holding_cost >= 0.0 && p.backlog_cost >= 0.0 &&
              p.rejection_cost >= 0.0,
          "inventory costs must be nonnegative");
  require(p.express_budget > 0.0 && p.express_bound > 0.0 && p.standard_bound > 0.0 &&
              p.backlog_limit > 0.0 && p.stock_limit > 0.0,
          "inventory bounds must be positive");
  require(p.demand_base >= 0.0 && p.demand_swing >= 0.0,
          "demand parameters must be nonnegative");
  require(p.price_base >= 0.0 && p.express_factor >= 0.0 && p.price_variance > 0.0 &&
              p.price_floor > 0.0,
          "price parameters must be positive");
}

enum class Wave : char { Cosine, Sine };

double seasonal(double scale, std::size_t t, std::size_t j, double period, Wave w) {
  const double arg = 2.0 * std::numbers::pi * double(t + j) / period;
  return scale * (1.0 + (w == Wave::Cosine ? std::cos(arg) : std::sin(arg)));
}

// Variable layout shared by both inventory variants.  Internal order: the
// fixed-charge unit, express orders, rejections, standard orders, then the
// positive and negative inventory parts.  States are levels then pipeline.
struct InventoryLayout {
  std::size_t J = 0;
  std::size_t unit() const { return 0; }
  std::size_t express(std::size_t j) const { return 1 + j; }
  std::size_t reject(std::size_t j) const { return 1 + J + j; }
  std::size_t standard(std::size_t j) const { return 1 + 2 * J + j; }
  std::size_t positive(std::size_t j) const { return 1 + 3 * J + j; }
  std::size_t negative(std::size_t j) const { return 1 + 4 * J + j; }
  std::size_t internal_dim() const { return 1 + 5 * J; }
  std::size_t level(std::size_t j) const { return j; }
  std::size_t pipeline(std::size_t j) const { return J + j; }
  std::size_t state_dim() const { return 2 * J; }
};

// Stage subproblem of the inventory model, 1-based stage index t.  When
// demand is uncertain the rejection cap becomes a row with the demand swing
// on the uncertainty; when prices are uncertain the order costs move into
// the uncertainty-coefficient matrix.
StageModel inventory_stage(const InventoryParams& p, std::size_t t,
                           bool uncertain_demand) {
  const std::size_t J = p.products;
  const InventoryLayout lay{J};
  StageModel s;
  s.prev_dim = lay.state_dim();
  s.state_dim = lay.state_dim();
  s.internal_dim = lay.internal_dim();
  s.xi_dim = J;

  s.a.assign(s.internal_dim, 0.0);
  s.A = Matrix(s.internal_dim, J);
  s.a[lay.unit()] = p.fixed_cost;
  for (std::size_t j = 0; j < J; ++j) {
    s.a[lay.reject(j)] = p.rejection_cost;
    s.a[lay.positive(j)] = p.holding_cost;
    s.a[lay.negative(j)] = p.backlog_cost;
    if (uncertain_demand) {
      s.a[lay.express(j)] = p.express_cost;
      s.a[lay.standard(j)] = p.standard_cost;
    } else {
      s.A(lay.express(j), j) = p.express_factor;
      s.A(lay.standard(j), j) = 1.0;
    }
  }

  s.internal_lower.assign(s.internal_dim, 0.0);
  s.internal_upper.assign(s.internal_dim, kInf);
  s.internal_lower[lay.unit()] = 1.0;
  s.internal_upper[lay.unit()] = 1.0;
  for (std::size_t j = 0; j < J; ++j) {
    s.internal_upper[lay.express(j)] = p.express_bound;
    s.internal_upper[lay.standard(j)] = p.standard_bound;
    if (!uncertain_demand) {
      const double demand =
          seasonal(p.demand_base, t, j + 1, p.period, Wave::Cosine) + p.demand_swing;
      s.internal_upper[lay.reject(j)] = demand;
    }
  }

  s.state_lower.assign(s.state_dim, 0.0);
  s.state_upper.assign(s.state_dim, 0.0);
  for (std::size_t j = 0; j < J; ++j) {
    s.state_lower[lay.level(j)] = -p.backlog_limit;
    s.state_upper[lay.level(j)] = p.stock_limit;
    s.state_lower[lay.pipeline(j)] = 0.0;
    s.state_upper[lay.pipeline(j)] = p.standard_bound;
  }

  const std::size_t rows = uncertain_demand ? 6 * J + 1 : 5 * J + 1;
  s.E = Matrix(rows, s.prev_dim);
  s.F = Matrix(rows, s.internal_dim);
  s.G = Matrix(rows, s.state_dim);
  s.H = Matrix(rows, J);
  s.h.assign(rows, 0.0);

  std::size_t r = 0;
  for (std::size_t j = 0; j < J; ++j, ++r) {
    // New level is at most carried stock plus arrivals minus demand.
    s.G(r, lay.level(j)) = 1.0;
    s.E(r, lay.level(j)) = -1.0;
    s.E(r, lay.pipeline(j)) = -1.0;
    s.F(r, lay.express(j)) = -1.0;
    s.F(r, lay.reject(j)) = -1.0;
    const double base = seasonal(p.demand_base, t, j + 1, p.period, Wave::Cosine);
    if (uncertain_demand) {
      s.h[r] = -base;
      s.H(r, j) = -p.demand_swing;
    } else {
      s.h[r] = -(base + p.demand_swing);
    }
  }
  if (uncertain_demand) {
    for (std::size_t j = 0; j < J; ++j, ++r) {
      // Rejections cannot exceed the realized demand.
      s.F(r, lay.reject(j)) = 1.0;
      s.h[r] = seasonal(p.demand_base, t, j + 1, p.period, Wave::Cosine);
      s.H(r, j) = p.demand_swing;
    }
  }
  for (std::size_t j = 0; j < J; ++j) {
    s.G(r, lay.level(j)) = 1.0;
    s.F(r, lay.positive(j)) = -1.0;
    ++r;
    s.G(r, lay.level(j)) = -1.0;
    s.F(r, lay.negative(j)) = -1.0;
    ++r;
  }
  for (std::size_t j = 0; j < J; ++j) {
    // The pipeline state copies the standard order placed this stage.
    s.G(r, lay.pipeline(j)) = 1.0;
    s.F(r, lay.standard(j)) = -1.0;
    ++r;
    s.G(r, lay.pipeline(j)) = -1.0;
    s.F(r, lay.standard(j)) = 1.0;
    ++r;
  }
  for (std::size_t j = 0; j < J; ++j) s.F(r, lay.express(j)) = 1.0;
  s.h[r] = p.express_budget;

  if (uncertain_demand) {
    s.xi_lower.assign(J, 0.0);
    s.xi_upper.assign(J, 1.0);
  }
  return s;
}

std::vector<double> demand_chain_draw(std::size_t J, Rng& rng) {
  std::vector<double> xi(J);
  xi[0] = rng.uniform();
  for (std::size_t j = 1; j < J; ++j) {
    if (xi[j - 1] <= 0.5)
      xi[j] = rng.uniform(0.0, (1.0 + xi[j - 1]) / 2.0);
    else
      xi[j] = rng.uniform(xi[j - 1] / 2.0, 1.0);
  }
  return xi;
}

// data[t-1][k] = stage-(t+1) uncertainty of path k, paths seeded by index so
// a larger sample extends a smaller one.
std::vector<std::vector<std::vector<double>>> sample_paths(
    const PathSampler& sampler, std::size_t horizon, std::uint64_t seed,
    std::size_t count, const std::vector<double>& xi1) {
  std::vector<std::vector<std::vector<double>>> data(horizon - 1);
  for (auto& stage : data) stage.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Rng rng = Rng::stream(seed, k);
    std::vector<double> prev = xi1;
    for (std::size_t t = 1; t < horizon; ++t) {
      prev = sampler(t, prev, rng);
      data[t - 1].push_back(prev);
    }
  }
  return data;
}

void finish_instance(Instance& inst, const PathSampler& sampler,
                     std::uint64_t data_seed, std::size_t samples_per_stage) {
  const std::size_t T = inst.horizon();
  if (T > 1) {
    require(samples_per_stage > 0, "need at least one sample per stage");
    inst.data = sample_paths(sampler, T, data_seed, samples_per_stage, inst.xi1);
  }
  inst.ambiguity.assign(T - 1, NominalSet{});
  const std::vector<std::string> errs = validate(inst);
  if (!errs.empty()) throw std::logic_error("generated instance invalid: " + errs[0]);
}

}  // namespace

InventoryParams inventory_price_defaults() {
  InventoryParams p;
  p.products = 5;
  p.stages = 10;
  p.period = 5.0;
  p.holding_cost = 1.0;
  p.backlog_limit = 20.0;
  p.stock_limit = 20.0;
  p.demand_base = 5.0;
  p.demand_swing = 10.0;
  return p;
}

GeneratedProblem build_inventory_demand(const InventoryParams& p,
                                        std::uint64_t data_seed,
                                        std::size_t samples_per_stage) {
  check_inventory(p);
  const std::size_t J = p.products;
  GeneratedProblem out;
  Instance& inst = out.instance;
  inst.stages.reserve(p.stages);
  for (std::size_t t = 1; t <= p.stages; ++t)
    inst.stages.push_back(inventory_stage(p, t, true));
  inst.x0.assign(2 * J, 0.0);
  inst.xi1.assign(J, 0.5);
  inst.regularization.assign(p.stages - 1, double(J) * p.rejection_cost);
  inst.lipschitz_xi.assign(p.stages - 1, p.rejection_cost * p.demand_swing);

  const std::vector<double> xi1 = inst.xi1;
  out.sampler = [J, xi1](std::size_t t, const std::vector<double>&, Rng& rng) {
    if (t == 0) return xi1;
    return demand_chain_draw(J, rng);
  };
  finish_instance(inst, out.sampler, data_seed, samples_per_stage);
  return out;
}

GeneratedProblem build_inventory_price(const InventoryParams& p,
                                       std::uint64_t data_seed,
                                       std::size_t samples_per_stage) {
  check_inventory(p);
  const std::size_t J = p.products;
  const double sigma_cap = 6.0 * std::sqrt(p.price_variance);

  std::vector<std::vector<double>> mean(p.stages);
  std::vector<Matrix> cov(p.stages);
  for (std::size_t t = 1; t <= p.stages; ++t) {
    mean[t - 1].resize(J);
    for (std::size_t j = 0; j < J; ++j)
      mean[t - 1][j] = seasonal(p.price_base, t, j + 1, p.period, Wave::Sine);
    Rng rng = Rng::stream(data_seed, (std::uint64_t(1) << 48) + t);
    cov[t - 1] = random_normalized_covariance(J, rng);
    for (double& v : cov[t - 1].v) v *= p.price_variance;
  }

  GeneratedProblem out;
  Instance& inst = out.instance;
  inst.stages.reserve(p.stages);
  for (std::size_t t = 1; t <= p.stages; ++t) {
    StageModel s = inventory_stage(p, t, false);
    s.xi_lower.assign(J, p.price_floor);
    s.xi_upper.resize(J);
    for (std::size_t j = 0; j < J; ++j)
      s.xi_upper[j] = std::max(mean[t - 1][j] + sigma_cap, p.price_floor);
    inst.stages.push_back(std::move(s));
  }
  inst.x0.assign(2 * J, 0.0);
  inst.xi1.resize(J);
  for (std::size_t j = 0; j < J; ++j)
    inst.xi1[j] = std::clamp(mean[0][j], p.price_floor,
                             inst.stages[0].xi_upper[j]);
  inst.regularization.assign(p.stages - 1, double(J) * p.rejection_cost);
  inst.lipschitz_xi.assign(
      p.stages - 1, p.standard_bound + p.express_factor * p.express_bound);

  const std::vector<double> xi1 = inst.xi1;
  const double floor = p.price_floor;
  out.sampler = [mean, cov, xi1, floor, sigma_cap](
                    std::size_t t, const std::vector<double>&, Rng& rng) {
    if (t == 0) return xi1;
    std::vector<double> xi = sample_normal(mean[t], cov[t], rng);
    for (std::size_t j = 0; j < xi.size(); ++j)
      xi[j] = std::clamp(std::max(xi[j], floor), floor, mean[t][j] + sigma_cap);
    return xi;
  };
  finish_instance(inst, out.sampler, data_seed, samples_per_stage);
  return out;
}

GeneratedProblem build_hydro(const HydroParams& p, std::uint64_t data_seed,
                             std::size_t samples_per_stage) {
  const std::size_t J = p.regions;
  require(J > 0, "hydro needs at least one region");
  require(p.stages > 0, "hydro needs at least one stage");
  require(p.plants_per_region.size() == J, "one plant count per region");
  require(p.demand.size() == J && p.storage_bound.size() == J &&
              p.hydro_bound.size() == J && p.initial_storage.size() == J,
          "one demand and bound entry per region");
  require(p.spill_cost > 0.0 && p.exchange_cost >= 0.0 && p.deficit_cost >= 0.0,
          "hydro costs must be nonnegative with positive spill cost");
  require(p.exchange_bound >= 0.0 && p.thermal_upper >= p.thermal_lower &&
              p.thermal_lower >= 0.0,
          "hydro bounds must be ordered and nonnegative");
  require(p.inflow_variance > 0.0 && p.seasonal_period > 0.0,
          "inflow process parameters must be positive");
  std::size_t plants = 0;
  for (std::size_t c : p.plants_per_region) plants += c;
  require(p.thermal_cost.size() == plants, "one thermal cost per plant");
  require(J > 1, "deficit accounts need at least two regions");

  // Internal order: spill, hydro, thermal plants, exchanges, then deficit
  // accounts; exchanges and deficits are indexed by ordered region pairs.
  const std::size_t pairs = J * (J - 1);
  const std::size_t spill0 = 0, hydro0 = J, thermal0 = 2 * J,
                    exch0 = 2 * J + plants, deficit0 = exch0 + pairs;
  const std::size_t internal_dim = deficit0 + pairs;
  const auto pair_index = [J](std::size_t j, std::size_t q) {
    // q enumerates the J-1 other regions of j in increasing order.
    return j * (J - 1) + q;
  };

  StageModel s;
  s.prev_dim = J;
  s.state_dim = J;
  s.internal_dim = internal_dim;
  s.xi_dim = J;
  s.a.assign(internal_dim, 0.0);
  s.A = Matrix(internal_dim, J);
  s.internal_lower.assign(internal_dim, 0.0);
  s.internal_upper.assign(internal_dim, kInf);
  for (std::size_t j = 0; j < J; ++j) {
    s.a[spill0 + j] = p.spill_cost;
    s.internal_upper[hydro0 + j] = p.hydro_bound[j];
  }
  for (std::size_t l = 0; l < plants; ++l) {
    s.a[thermal0 + l] = p.thermal_cost[l];
    s.internal_lower[thermal0 + l] = p.thermal_lower;
    s.internal_upper[thermal0 + l] = p.thermal_upper;
  }
  for (std::size_t j = 0; j < J; ++j) {
    std::size_t q = 0;
    for (std::size_t jp = 0; jp < J; ++jp) {
      if (jp == j) continue;
      const std::size_t idx = pair_index(j, q++);
      s.a[exch0 + idx] = p.exchange_cost;
      s.internal_upper[exch0 + idx] = p.exchange_bound;
      s.a[deficit0 + idx] = p.deficit_cost;
      // Deficit accounts jointly cover the whole regional demand.
      s.internal_upper[deficit0 + idx] = p.demand[j] / double(J - 1);
    }
  }
  s.state_lower.assign(J, 0.0);
  s.state_upper = p.storage_bound;

  const std::size_t rows = 4 * J;
  s.E = Matrix(rows, J);
  s.F = Matrix(rows, internal_dim);
  s.G = Matrix(rows, J);
  s.H = Matrix(rows, J);
  s.h.assign(rows, 0.0);
  std::vector<std::size_t> plant0(J + 1, 0);
  for (std::size_t j = 0; j < J; ++j)
    plant0[j + 1] = plant0[j] + p.plants_per_region[j];
  std::size_t r = 0;
  for (std::size_t j = 0; j < J; ++j) {
    // Water balance: storage plus generation plus spill equals carried
    // storage plus inflow, written as a pair of inequalities.
    for (int sign : {+1, -1}) {
      const double f = double(sign);
      s.G(r, j) = f;
      s.F(r, hydro0 + j) = f;
      s.F(r, spill0 + j) = f;
      s.E(r, j) = -f;
      s.H(r, j) = f;
      ++r;
    }
  }
  for (std::size_t j = 0; j < J; ++j) {
    // Demand balance: hydro, local thermal, net imports and deficits match
    // the regional demand.
    for (int sign : {+1, -1}) {
      const double f = double(sign);
      s.F(r, hydro0 + j) = f;
      for (std::size_t l = plant0[j]; l < plant0[j + 1]; ++l)
        s.F(r, thermal0 + l) = f;
      std::size_t q = 0;
      for (std::size_t jp = 0; jp < J; ++jp) {
        if (jp == j) continue;
        s.F(r, deficit0 + pair_index(j, q)) = f;
        s.F(r, exch0 + pair_index(j, q)) = -f;
        // Position of j in the other region's pair list.
        const std::size_t back = jp * (J - 1) + (j < jp ? j : j - 1);
        s.F(r, exch0 + back) = f;
        ++q;
      }
      s.h[r] = f * p.demand[j];
      ++r;
    }
  }
  s.xi_lower.assign(J, 0.0);
  s.xi_upper.assign(J, kInf);

  ArLogNormal process;
  process.mu.resize(p.stages);
  process.phi.assign(p.stages - 1, std::vector<double>(J, p.autocorrelation));
  Matrix noise(J, J);
  for (std::size_t j = 0; j < J; ++j) noise(j, j) = p.inflow_variance;
  process.sigma.assign(p.stages - 1, noise);
  for (std::size_t t = 0; t < p.stages; ++t) {
    process.mu[t].resize(J);
    for (std::size_t j = 0; j < J; ++j)
      process.mu[t][j] =
          p.inflow_log_center +
          p.seasonal_amplitude *
              std::sin(2.0 * std::numbers::pi * double(t + 1 + j) /
                       p.seasonal_period);
  }
  process.xi1.resize(J);
  for (std::size_t j = 0; j < J; ++j) process.xi1[j] = std::exp(process.mu[0][j]);

  GeneratedProblem out;
  Instance& inst = out.instance;
  inst.stages.assign(p.stages, s);
  inst.x0 = p.initial_storage;
  inst.xi1 = process.xi1;
  const double lip = std::max(p.spill_cost, p.deficit_cost);
  inst.regularization.assign(p.stages - 1, lip);
  inst.lipschitz_xi.assign(p.stages - 1, lip);
  inst.growth_rate.assign(p.stages - 1, p.spill_cost);

  out.sampler = [process](std::size_t t, const std::vector<double>& prev,
                          Rng& rng) {
    if (t == 0) return process.xi1;
    return process.step(t, prev, rng);
  };
  finish_instance(inst, out.sampler, data_seed, samples_per_stage);
  return out;
}

Matrix random_normalized_covariance(std::size_t dim, Rng& rng) {
  if (dim == 0) throw std::invalid_argument("covariance needs a positive dimension");
  Eigen::MatrixXd u(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) u(i, j) = rng.uniform();
  Eigen::MatrixXd m = u * u.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  const double top = es.eigenvalues().maxCoeff();
  if (!(top > 0.0)) throw std::invalid_argument("degenerate covariance draw");
  m /= top;
  Matrix out(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) out(i, j) = m(i, j);
  return out;
}

}  // namespace wdro
