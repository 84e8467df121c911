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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "wdro/model.hpp"
#include "wdro/rng.hpp"

namespace wdro {

// Draws the uncertainty of 0-based stage t along a path.  prev is the
// realized stage t-1 value; stagewise independent processes ignore it and
// stage 0 returns the fixed initial value without touching the generator.
using PathSampler = std::function<std::vector<double>(
    std::size_t t, const std::vector<double>& prev, Rng& rng)>;

// An instance together with the data-generating process it was sampled from.
// The instance ships with nominal ambiguity sets; callers swap in the
// ambiguity they want to solve under.
struct GeneratedProblem {
  Instance instance;
  PathSampler sampler;
};

// Multi-commodity inventory control: each stage places express orders
// (delivered now) and standard orders (delivered next stage), carries
// inventory with holding and backlog costs, and may reject demand at a
// penalty.  Defaults are the small demand-uncertain configuration.
struct InventoryParams {
  std::size_t products = 3;
  std::size_t stages = 5;
  double period = 5.0;           // seasonality period of the base demand
  double fixed_cost = 1.0;       // constant charge per stage
  double express_cost = 5.0;     // unit price of an express order
  double standard_cost = 1.0;    // unit price of a standard order
  double holding_cost = 2.0;     // per unit of positive inventory
  double backlog_cost = 10.0;    // per unit of backlog
  double rejection_cost = 100.0; // per unit of rejected demand
  double express_budget = 15.0;  // cap on total express orders per stage
  double express_bound = 10.0;   // per-product express order cap
  double standard_bound = 20.0;  // per-product standard order cap
  double backlog_limit = 10.0;   // inventory may drop to minus this
  double stock_limit = 100.0;    // inventory may rise to this
  double demand_base = 5.0;      // scale of the seasonal base demand
  double demand_swing = 50.0;    // demand added per unit of uncertainty

  // Price-uncertainty process (used by the price variant only).
  double price_base = 1.0;       // scale of the seasonal mean price
  double express_factor = 5.0;   // express price as a multiple of standard
  double price_variance = 0.1;   // covariance magnitude
  double price_floor = 0.001;    // truncation from below
};

// The larger price-uncertain configuration: more products, longer horizon,
// tighter inventory box, deterministic demands.
InventoryParams inventory_price_defaults();

// Hydro-thermal dispatch over interconnected regions: reservoirs receive
// uncertain inflows, regions generate hydro and thermal power, exchange
// energy, and book deficits at a penalty.  Inflows follow a seasonal
// log-space autoregression, so the true process is stagewise dependent.
struct HydroParams {
  std::size_t regions = 4;
  std::size_t stages = 13;
  std::vector<std::size_t> plants_per_region = {2, 2, 2, 2};
  std::vector<double> thermal_cost = {5.0, 12.0, 8.0, 18.0,
                                      6.0, 14.0, 9.0, 20.0};  // per plant
  double thermal_lower = 0.0;
  double thermal_upper = 15.0;
  double spill_cost = 1.0;
  double exchange_cost = 1.0;
  double deficit_cost = 50.0;
  double exchange_bound = 10.0;
  std::vector<double> demand = {45.0, 35.0, 25.0, 15.0};
  std::vector<double> storage_bound = {100.0, 80.0, 60.0, 40.0};
  std::vector<double> hydro_bound = {30.0, 25.0, 20.0, 15.0};
  std::vector<double> initial_storage = {50.0, 40.0, 30.0, 20.0};

  // Inflow process in log space: seasonal mean, one-lag feedback, and
  // independent per-region noise.
  double inflow_log_center = 3.0;
  double seasonal_amplitude = 0.3;
  double seasonal_period = 12.0;
  double autocorrelation = 0.5;
  double inflow_variance = 0.1;
};

// Demand-uncertain inventory: demands enter stage right-hand sides, so
// noninitial stages use the right-hand-side worst-case oracle.  Empirical
// data are samples_per_stage independent draws per noninitial stage; path k
// is reproducible from Rng::stream(data_seed, k), so enlarging the sample
// only appends paths.
GeneratedProblem build_inventory_demand(const InventoryParams& p,
                                        std::uint64_t data_seed,
                                        std::size_t samples_per_stage);

// Price-uncertain inventory: order prices enter stage objectives, so
// noninitial stages use the objective worst-case oracle.  Prices follow a
// truncated correlated normal around a seasonal mean; the support box is
// capped six standard deviations above the mean and samples are clipped.
GeneratedProblem build_inventory_price(const InventoryParams& p,
                                       std::uint64_t data_seed,
                                       std::size_t samples_per_stage);

// Hydro-thermal planning: inflows enter stage right-hand sides over an
// unbounded nonnegative support, with the spill cost declared as the value
// growth rate.  Empirical data are per-stage marginals of sampled paths.
GeneratedProblem build_hydro(const HydroParams& p, std::uint64_t data_seed,
                             std::size_t samples_per_stage);

// Random covariance with maximum eigenvalue one: a uniform square matrix
// times its transpose, rescaled.
Matrix random_normalized_covariance(std::size_t dim, Rng& rng);

}  // namespace wdro
