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

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "wdro/experiment.hpp"

namespace {

// One line of machine-readable diagnostics on stderr; `field` only for
// configuration problems.
std::string error_json(const std::string& kind, const std::string& field,
                       const std::string& message) {
  nlohmann::json j;
  j["error"]["kind"] = kind;
  if (!field.empty()) j["error"]["field"] = field;
  j["error"]["message"] = message;
  return j.dump();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data-driven distributionally robust multistage LP toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  unsigned workers_override = 0;
  bool verbose = false;

  CLI::App* solve = app.add_subcommand(
      "solve", "train every configured model; write reports, bounds, and cut pools");
  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "simulate previously trained policies on shared sample paths");
  CLI::App* full =
      app.add_subcommand("run", "solve then evaluate, emitting the full artifact set");
  CLI::App* export_cmd = app.add_subcommand(
      "export-lp", "write the instance and one MPS file per stage");
  for (CLI::App* sub : {solve, evaluate, full, export_cmd}) {
    sub->add_option("--config", config_path, "experiment description JSON")->required();
    sub->add_option("--out", out_override, "override the configured output directory");
    sub->add_option("--workers", workers_override,
                    "override the configured worker count");
    sub->add_flag("--verbose", verbose, "log progress to stderr");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << error_json("usage", "", e.what()) << "\n";
    return 2;
  }

  try {
    wdro::ExperimentConfig cfg = wdro::load_config(config_path);
    if (!out_override.empty()) cfg.output_dir = out_override;
    if (workers_override > 0) cfg.workers = workers_override;
    std::ostream* log = verbose ? &std::cerr : nullptr;
    if (solve->parsed())
      wdro::solve_phase(cfg, log);
    else if (evaluate->parsed())
      wdro::evaluate_phase(cfg, log);
    else if (full->parsed())
      wdro::run_experiment(cfg, log);
    else
      wdro::export_lps(cfg, log);
    return 0;
  } catch (const wdro::ConfigError& e) {
    std::cerr << error_json("config", e.field, e.what()) << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << error_json("solver", "", e.what()) << "\n";
    return 3;
  }
}
