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
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "wdro/approx.hpp"
#include "wdro/ddp.hpp"
#include "wdro/evaluation.hpp"
#include "wdro/problems.hpp"

namespace wdro {

// A rejected experiment description; `field` names the offending entry
// (dotted for nested objects, indexed for arrays, e.g. "models[1].gamma").
struct ConfigError : std::runtime_error {
  std::string field;
  ConfigError(std::string fld, const std::string& msg)
      : std::runtime_error(msg), field(std::move(fld)) {}
};

struct ModelSpec {
  enum class Kind : char { Nominal, Wasserstein, Cvar, Robust };
  Kind kind = Kind::Nominal;
  double gamma = 0.0;  // ambiguity radius per unit of the stage radius scale
  double alpha = 0.1;  // tail mass of the risk measure
  double beta = 0.5;   // weight on the tail term
  // Filesystem-safe artifact prefix, e.g. "nominal" or "wasserstein_0.5".
  std::string label() const;
};

struct ExperimentConfig {
  std::string problem;  // inventory_demand | inventory_price | hydro
  InventoryParams inventory;
  HydroParams hydro;
  std::size_t samples_per_stage = 0;
  std::size_t evaluation_paths = 0;
  double epsilon = 1e-4;
  std::size_t max_iterations = 200;
  double time_cap_seconds = 0.0;  // nonpositive means no cap
  ForwardMode forward = ForwardMode::GapMax;
  unsigned workers = 1;
  std::uint64_t data_seed = 1;
  std::uint64_t algorithm_seed = 2;
  std::uint64_t evaluation_seed = 3;
  std::string radius_basis = "spread";  // spread | saa
  std::size_t saa_count = 0;            // 0 means samples_per_stage
  std::vector<ModelSpec> models;
  std::string output_dir = "out";
};

// Parses the single-file JSON experiment description.  Unknown fields, wrong
// types, and out-of-range values all throw ConfigError naming the field.
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::string& path);

GeneratedProblem build_problem(const ExperimentConfig& cfg);

// Per-noninitial-stage radius unit multiplied by a model's gamma: the
// dispersion of the stage's empirical measure for basis "spread", its
// transport distance to a same-family fitted sample for basis "saa".
std::vector<double> radius_units(const Instance& inst, const ExperimentConfig& cfg);

// Copy of the instance with every noninitial stage's ambiguity replaced by
// the set the model calls for; `units` is consulted only by transport models.
Instance configure_instance(const Instance& base, const ModelSpec& spec,
                            const std::vector<double>& units);

struct ModelRun {
  ModelSpec spec;
  SolveReport report;
  PolicyRun run;
  EvalStats stats;
};

struct ExperimentResult {
  std::vector<ModelRun> models;
  std::string summary;  // contents of the emitted summary.csv
};

// Trains every configured model and writes <label>.report.json,
// <label>.bounds.csv, and <label>.cuts.json into cfg.output_dir.  Progress
// lines go to `log` when nonnull.
std::vector<ModelRun> solve_phase(const ExperimentConfig& cfg,
                                  std::ostream* log = nullptr);

// Reads the solve artifacts back, simulates the shared evaluation paths for
// every model, and writes <label>.eval.csv, <label>.eval.json, summary.csv,
// and the figures.  The sampled paths depend only on the evaluation seed, so
// every model faces identical uncertainty.
std::vector<ModelRun> evaluate_phase(const ExperimentConfig& cfg,
                                     std::ostream* log = nullptr);

// solve_phase followed by evaluation of the in-memory pools; emits the same
// artifact set.  Rerunning with an identical config reproduces summary.csv
// byte for byte.
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                std::ostream* log = nullptr);

// Writes instance.json plus one MPS file per stage, assembled at canonical
// query points: the first stage at (x0, xi1), later stages at the previous
// stage's state-box midpoint and the stage's first empirical atom.
void export_lps(const ExperimentConfig& cfg, std::ostream* log = nullptr);

// Cut pools for the cost-to-go of stages 1..T-1 as one JSON document.
std::string pools_to_json(const std::vector<LowerApprox>& pools, int indent = -1);
std::vector<LowerApprox> pools_from_json(const std::string& text);

}  // namespace wdro
