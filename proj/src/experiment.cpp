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

#include "wdro/experiment.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wdro/lp.hpp"
#include "wdro/measures.hpp"
#include "wdro/stage_lp.hpp"

namespace wdro {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void bad_field(const std::string& field, const std::string& msg) {
  throw ConfigError(field, "config field '" + field + "': " + msg);
}

std::string joined(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

const json* find(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

const json& need(const json& obj, const char* key, const std::string& prefix) {
  const json* v = find(obj, key);
  if (!v) {
    const std::string path = joined(prefix, key);
    throw ConfigError(path, "missing config field '" + path + "'");
  }
  return *v;
}

void reject_unknown(const json& obj, const std::string& prefix,
                    std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* a : allowed)
      if (item.key() == a) {
        known = true;
        break;
      }
    if (!known) {
      const std::string path = joined(prefix, item.key());
      throw ConfigError(path, "unknown config field '" + path + "'");
    }
  }
}

double as_number(const json& v, const std::string& field) {
  if (!v.is_number()) bad_field(field, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) bad_field(field, "must be finite");
  return x;
}

std::int64_t as_integer(const json& v, const std::string& field) {
  if (!v.is_number_integer() && !v.is_number_unsigned())
    bad_field(field, "expected an integer");
  return v.get<std::int64_t>();
}

std::size_t as_count(const json& v, const std::string& field, std::int64_t min) {
  const std::int64_t x = as_integer(v, field);
  if (x < min) bad_field(field, "must be at least " + std::to_string(min));
  return static_cast<std::size_t>(x);
}

std::uint64_t as_seed(const json& v, const std::string& field) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  const std::int64_t x = as_integer(v, field);
  if (x < 0) bad_field(field, "must be nonnegative");
  return static_cast<std::uint64_t>(x);
}

std::string as_text(const json& v, const std::string& field) {
  if (!v.is_string()) bad_field(field, "expected a string");
  return v.get<std::string>();
}

std::vector<double> as_numbers(const json& v, const std::string& field) {
  if (!v.is_array()) bad_field(field, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(as_number(e, field));
  return out;
}

std::vector<std::size_t> as_counts(const json& v, const std::string& field) {
  if (!v.is_array()) bad_field(field, "expected an array of integers");
  std::vector<std::size_t> out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(as_count(e, field, 0));
  return out;
}

constexpr std::pair<const char*, double InventoryParams::*> kInventoryNumbers[] = {
    {"period", &InventoryParams::period},
    {"fixed_cost", &InventoryParams::fixed_cost},
    {"express_cost", &InventoryParams::express_cost},
    {"standard_cost", &InventoryParams::standard_cost},
    {"holding_cost", &InventoryParams::holding_cost},
    {"backlog_cost", &InventoryParams::backlog_cost},
    {"rejection_cost", &InventoryParams::rejection_cost},
    {"express_budget", &InventoryParams::express_budget},
    {"express_bound", &InventoryParams::express_bound},
    {"standard_bound", &InventoryParams::standard_bound},
    {"backlog_limit", &InventoryParams::backlog_limit},
    {"stock_limit", &InventoryParams::stock_limit},
    {"demand_base", &InventoryParams::demand_base},
    {"demand_swing", &InventoryParams::demand_swing},
    {"price_base", &InventoryParams::price_base},
    {"express_factor", &InventoryParams::express_factor},
    {"price_variance", &InventoryParams::price_variance},
    {"price_floor", &InventoryParams::price_floor},
};

void apply_inventory(const json& p, InventoryParams& out) {
  reject_unknown(p, "problem_params",
                 {"products", "stages", "period", "fixed_cost", "express_cost",
                  "standard_cost", "holding_cost", "backlog_cost", "rejection_cost",
                  "express_budget", "express_bound", "standard_bound", "backlog_limit",
                  "stock_limit", "demand_base", "demand_swing", "price_base",
                  "express_factor", "price_variance", "price_floor"});
  if (const json* v = find(p, "products"))
    out.products = as_count(*v, "problem_params.products", 1);
  if (const json* v = find(p, "stages"))
    out.stages = as_count(*v, "problem_params.stages", 2);
  for (const auto& [key, slot] : kInventoryNumbers)
    if (const json* v = find(p, key))
      out.*slot = as_number(*v, joined("problem_params", key));
}

constexpr std::pair<const char*, double HydroParams::*> kHydroNumbers[] = {
    {"thermal_lower", &HydroParams::thermal_lower},
    {"thermal_upper", &HydroParams::thermal_upper},
    {"spill_cost", &HydroParams::spill_cost},
    {"exchange_cost", &HydroParams::exchange_cost},
    {"deficit_cost", &HydroParams::deficit_cost},
    {"exchange_bound", &HydroParams::exchange_bound},
    {"inflow_log_center", &HydroParams::inflow_log_center},
    {"seasonal_amplitude", &HydroParams::seasonal_amplitude},
    {"seasonal_period", &HydroParams::seasonal_period},
    {"autocorrelation", &HydroParams::autocorrelation},
    {"inflow_variance", &HydroParams::inflow_variance},
};

constexpr std::pair<const char*, std::vector<double> HydroParams::*> kHydroVectors[] = {
    {"thermal_cost", &HydroParams::thermal_cost},
    {"demand", &HydroParams::demand},
    {"storage_bound", &HydroParams::storage_bound},
    {"hydro_bound", &HydroParams::hydro_bound},
    {"initial_storage", &HydroParams::initial_storage},
};

void apply_hydro(const json& p, HydroParams& out) {
  reject_unknown(p, "problem_params",
                 {"regions", "stages", "plants_per_region", "thermal_cost",
                  "thermal_lower", "thermal_upper", "spill_cost", "exchange_cost",
                  "deficit_cost", "exchange_bound", "demand", "storage_bound",
                  "hydro_bound", "initial_storage", "inflow_log_center",
                  "seasonal_amplitude", "seasonal_period", "autocorrelation",
                  "inflow_variance"});
  if (const json* v = find(p, "regions"))
    out.regions = as_count(*v, "problem_params.regions", 2);
  if (const json* v = find(p, "stages"))
    out.stages = as_count(*v, "problem_params.stages", 2);
  if (const json* v = find(p, "plants_per_region"))
    out.plants_per_region = as_counts(*v, "problem_params.plants_per_region");
  for (const auto& [key, slot] : kHydroVectors)
    if (const json* v = find(p, key))
      out.*slot = as_numbers(*v, joined("problem_params", key));
  for (const auto& [key, slot] : kHydroNumbers)
    if (const json* v = find(p, key))
      out.*slot = as_number(*v, joined("problem_params", key));
}

ModelSpec parse_model(const json& m, const std::string& prefix) {
  if (!m.is_object()) bad_field(prefix, "expected an object");
  ModelSpec spec;
  const std::string kind = as_text(need(m, "kind", prefix), prefix + ".kind");
  if (kind == "nominal") {
    reject_unknown(m, prefix, {"kind"});
    spec.kind = ModelSpec::Kind::Nominal;
  } else if (kind == "robust") {
    reject_unknown(m, prefix, {"kind"});
    spec.kind = ModelSpec::Kind::Robust;
  } else if (kind == "wasserstein") {
    reject_unknown(m, prefix, {"kind", "gamma"});
    spec.kind = ModelSpec::Kind::Wasserstein;
    spec.gamma = as_number(need(m, "gamma", prefix), prefix + ".gamma");
    if (spec.gamma < 0.0) bad_field(prefix + ".gamma", "must be nonnegative");
  } else if (kind == "cvar") {
    reject_unknown(m, prefix, {"kind", "alpha", "beta"});
    spec.kind = ModelSpec::Kind::Cvar;
    if (const json* v = find(m, "alpha")) spec.alpha = as_number(*v, prefix + ".alpha");
    if (const json* v = find(m, "beta")) spec.beta = as_number(*v, prefix + ".beta");
    if (!(spec.alpha > 0.0 && spec.alpha <= 1.0))
      bad_field(prefix + ".alpha", "must lie in (0, 1]");
    if (!(spec.beta >= 0.0 && spec.beta <= 1.0))
      bad_field(prefix + ".beta", "must lie in [0, 1]");
  } else {
    bad_field(prefix + ".kind", "unknown model kind '" + kind + "'");
  }
  return spec;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string params_text(const ModelSpec& spec) {
  char buf[80];
  switch (spec.kind) {
    case ModelSpec::Kind::Wasserstein:
      std::snprintf(buf, sizeof buf, "gamma=%.17g", spec.gamma);
      return buf;
    case ModelSpec::Kind::Cvar:
      std::snprintf(buf, sizeof buf, "alpha=%.17g;beta=%.17g", spec.alpha, spec.beta);
      return buf;
    default:
      return "";
  }
}

std::string summary_csv(const std::vector<ModelRun>& runs) {
  std::string out =
      "model,params,lower_bound,upper_bound,paths,aborted,"
      "mean,stddev,q1,q10,q25,q50,q75,q90,q99\n";
  for (const ModelRun& m : runs) {
    out += m.spec.label() + "," + params_text(m.spec);
    out += "," + fmt(m.report.lower_bound) + "," + fmt(m.report.upper_bound);
    out += "," + std::to_string(m.stats.paths) + "," + std::to_string(m.stats.aborted);
    out += "," + fmt(m.stats.mean) + "," + fmt(m.stats.stddev);
    for (double q : m.stats.quantiles) out += "," + fmt(q);
    out += "\n";
  }
  return out;
}

SolveConfig solver_config(const ExperimentConfig& cfg) {
  SolveConfig s;
  s.epsilon = cfg.epsilon;
  s.max_iterations = cfg.max_iterations;
  s.time_cap_seconds = cfg.time_cap_seconds;
  s.forward = cfg.forward;
  s.sample_seed = cfg.algorithm_seed;
  s.workers = cfg.workers;
  return s;
}

EvalStats stats_or_empty(const PolicyRun& run) {
  if (!run.totals.empty()) return summarize(run);
  EvalStats s;
  s.aborted = run.aborted;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  s.mean = nan;
  s.stddev = nan;
  s.quantiles.fill(nan);
  return s;
}

std::vector<ModelRun> solve_models(const ExperimentConfig& cfg,
                                   const GeneratedProblem& gp, std::ostream* log) {
  std::vector<double> units;
  for (const ModelSpec& spec : cfg.models)
    if (spec.kind == ModelSpec::Kind::Wasserstein) {
      units = radius_units(gp.instance, cfg);
      break;
    }
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  std::vector<ModelRun> out;
  out.reserve(cfg.models.size());
  for (const ModelSpec& spec : cfg.models) {
    const Instance inst = configure_instance(gp.instance, spec, units);
    SolveReport rep = run(inst, solver_config(cfg));
    const std::string label = spec.label();
    write_text(dir / (label + ".report.json"), report_to_json(rep, 2) + "\n");
    write_bounds_csv(rep, (dir / (label + ".bounds.csv")).string());
    write_text(dir / (label + ".cuts.json"), pools_to_json(rep.lower_pools, 2) + "\n");
    if (log)
      *log << "solve " << label << ": lower " << rep.lower_bound << " upper "
           << rep.upper_bound << " iterations " << rep.iterations.size() << " ("
           << to_string(rep.status) << ")\n";
    out.push_back({spec, std::move(rep), {}, {}});
  }
  return out;
}

void evaluate_models(const ExperimentConfig& cfg, const GeneratedProblem& gp,
                     std::vector<ModelRun>& runs, std::ostream* log) {
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  for (ModelRun& m : runs) {
    m.run = simulate_policy(gp.instance, m.report.lower_pools, gp.sampler,
                            cfg.evaluation_paths, cfg.evaluation_seed, cfg.workers);
    m.stats = stats_or_empty(m.run);
    const std::string label = m.spec.label();
    write_policy_csv(m.run, (dir / (label + ".eval.csv")).string());
    write_text(dir / (label + ".eval.json"), stats_to_json(m.stats, 2) + "\n");
    if (log)
      *log << "evaluate " << label << ": mean " << m.stats.mean << " stddev "
           << m.stats.stddev << " paths " << m.stats.paths << " aborted "
           << m.stats.aborted << "\n";
  }
}

std::string emit_summary(const ExperimentConfig& cfg,
                         const std::vector<ModelRun>& runs, std::ostream* log) {
  const fs::path dir(cfg.output_dir);
  const std::string text = summary_csv(runs);
  write_text(dir / "summary.csv", text);

  std::vector<double> gammas;
  std::vector<EvalStats> grid;
  std::vector<std::string> labels;
  std::vector<EvalStats> all;
  for (const ModelRun& m : runs) {
    if (m.stats.paths == 0) continue;
    labels.push_back(m.spec.label());
    all.push_back(m.stats);
    if (m.spec.kind == ModelSpec::Kind::Wasserstein) {
      gammas.push_back(m.spec.gamma);
      grid.push_back(m.stats);
    }
  }
  if (gammas.size() >= 2)
    write_quantile_radius_svg((dir / "quantiles.svg").string(), gammas, grid);
  if (!all.empty()) write_mean_std_svg((dir / "profiles.svg").string(), labels, all);
  if (log) *log << "wrote " << (dir / "summary.csv").string() << "\n";
  return text;
}

double box_midpoint(double lo, double hi) {
  const bool flo = std::isfinite(lo), fhi = std::isfinite(hi);
  if (flo && fhi) return 0.5 * (lo + hi);
  if (flo) return lo;
  if (fhi) return hi;
  return 0.0;
}

}  // namespace

std::string ModelSpec::label() const {
  char buf[64];
  switch (kind) {
    case Kind::Nominal:
      return "nominal";
    case Kind::Robust:
      return "robust";
    case Kind::Wasserstein:
      std::snprintf(buf, sizeof buf, "wasserstein_%g", gamma);
      return buf;
    case Kind::Cvar:
      std::snprintf(buf, sizeof buf, "cvar_%g_%g", alpha, beta);
      return buf;
  }
  return "model";
}

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError("json", std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("json", "config must be a JSON object");
  reject_unknown(j, "",
                 {"problem", "problem_params", "samples_per_stage", "evaluation_paths",
                  "epsilon", "max_iterations", "time_cap_seconds", "forward", "workers",
                  "seeds", "radius_basis", "saa_count", "models", "output_dir"});

  ExperimentConfig cfg;
  cfg.problem = as_text(need(j, "problem", ""), "problem");
  if (cfg.problem == "inventory_price") {
    cfg.inventory = inventory_price_defaults();
  } else if (cfg.problem != "inventory_demand" && cfg.problem != "hydro") {
    bad_field("problem", "expected inventory_demand, inventory_price, or hydro");
  }
  if (const json* p = find(j, "problem_params")) {
    if (!p->is_object()) bad_field("problem_params", "expected an object");
    if (cfg.problem == "hydro")
      apply_hydro(*p, cfg.hydro);
    else
      apply_inventory(*p, cfg.inventory);
  }
  cfg.samples_per_stage = as_count(need(j, "samples_per_stage", ""), "samples_per_stage", 1);
  cfg.evaluation_paths = as_count(need(j, "evaluation_paths", ""), "evaluation_paths", 1);
  if (const json* v = find(j, "epsilon")) {
    cfg.epsilon = as_number(*v, "epsilon");
    if (!(cfg.epsilon > 0.0)) bad_field("epsilon", "must be positive");
  }
  if (const json* v = find(j, "max_iterations"))
    cfg.max_iterations = as_count(*v, "max_iterations", 1);
  if (const json* v = find(j, "time_cap_seconds")) {
    cfg.time_cap_seconds = as_number(*v, "time_cap_seconds");
    if (cfg.time_cap_seconds < 0.0) bad_field("time_cap_seconds", "must be nonnegative");
  }
  if (const json* v = find(j, "forward")) {
    const std::string f = as_text(*v, "forward");
    if (f == "gap_max")
      cfg.forward = ForwardMode::GapMax;
    else if (f == "sampled")
      cfg.forward = ForwardMode::Sampled;
    else
      bad_field("forward", "expected gap_max or sampled");
  }
  if (const json* v = find(j, "workers"))
    cfg.workers = static_cast<unsigned>(as_count(*v, "workers", 1));
  if (const json* s = find(j, "seeds")) {
    if (!s->is_object()) bad_field("seeds", "expected an object");
    reject_unknown(*s, "seeds", {"data", "algorithm", "evaluation"});
    if (const json* v = find(*s, "data")) cfg.data_seed = as_seed(*v, "seeds.data");
    if (const json* v = find(*s, "algorithm"))
      cfg.algorithm_seed = as_seed(*v, "seeds.algorithm");
    if (const json* v = find(*s, "evaluation"))
      cfg.evaluation_seed = as_seed(*v, "seeds.evaluation");
  }
  if (const json* v = find(j, "radius_basis")) {
    cfg.radius_basis = as_text(*v, "radius_basis");
    if (cfg.radius_basis != "spread" && cfg.radius_basis != "saa")
      bad_field("radius_basis", "expected spread or saa");
  }
  if (const json* v = find(j, "saa_count")) cfg.saa_count = as_count(*v, "saa_count", 1);
  const json& models = need(j, "models", "");
  if (!models.is_array() || models.empty())
    bad_field("models", "expected a nonempty array");
  cfg.models.reserve(models.size());
  for (std::size_t i = 0; i < models.size(); ++i)
    cfg.models.push_back(parse_model(models[i], "models[" + std::to_string(i) + "]"));
  if (const json* v = find(j, "output_dir")) {
    cfg.output_dir = as_text(*v, "output_dir");
    if (cfg.output_dir.empty()) bad_field("output_dir", "must be nonempty");
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

GeneratedProblem build_problem(const ExperimentConfig& cfg) {
  try {
    if (cfg.problem == "inventory_demand")
      return build_inventory_demand(cfg.inventory, cfg.data_seed, cfg.samples_per_stage);
    if (cfg.problem == "inventory_price")
      return build_inventory_price(cfg.inventory, cfg.data_seed, cfg.samples_per_stage);
    if (cfg.problem == "hydro")
      return build_hydro(cfg.hydro, cfg.data_seed, cfg.samples_per_stage);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("problem_params", e.what());
  }
  throw ConfigError("problem", "unknown problem '" + cfg.problem + "'");
}

std::vector<double> radius_units(const Instance& inst, const ExperimentConfig& cfg) {
  std::vector<double> units;
  units.reserve(inst.data.size());
  for (std::size_t i = 0; i < inst.data.size(); ++i) {
    const DiscreteMeasure emp = DiscreteMeasure::uniform(inst.data[i]);
    if (cfg.radius_basis == "saa") {
      const std::size_t count = cfg.saa_count ? cfg.saa_count : cfg.samples_per_stage;
      const std::uint64_t seed = cfg.data_seed + 0x9e3779b97f4a7c15ull * (i + 1);
      units.push_back(wasserstein_l1(emp, fit_lognormal_saa(inst.data[i], count, seed)));
    } else {
      units.push_back(radius_hat(emp));
    }
  }
  return units;
}

Instance configure_instance(const Instance& base, const ModelSpec& spec,
                            const std::vector<double>& units) {
  Instance inst = base;
  if (spec.kind == ModelSpec::Kind::Wasserstein && units.size() != inst.ambiguity.size())
    throw std::invalid_argument("configure_instance: one radius unit per noninitial stage");
  for (std::size_t i = 0; i < inst.ambiguity.size(); ++i) {
    switch (spec.kind) {
      case ModelSpec::Kind::Nominal:
        inst.ambiguity[i] = NominalSet{};
        break;
      case ModelSpec::Kind::Wasserstein:
        inst.ambiguity[i] = WassersteinSet{spec.gamma * units[i], {}};
        break;
      case ModelSpec::Kind::Cvar:
        inst.ambiguity[i] = CvarSet{spec.alpha, spec.beta};
        break;
      case ModelSpec::Kind::Robust:
        inst.ambiguity[i] = RobustSet{};
        break;
    }
  }
  return inst;
}

std::vector<ModelRun> solve_phase(const ExperimentConfig& cfg, std::ostream* log) {
  const GeneratedProblem gp = build_problem(cfg);
  return solve_models(cfg, gp, log);
}

std::vector<ModelRun> evaluate_phase(const ExperimentConfig& cfg, std::ostream* log) {
  const GeneratedProblem gp = build_problem(cfg);
  const fs::path dir(cfg.output_dir);
  std::vector<ModelRun> runs;
  runs.reserve(cfg.models.size());
  for (const ModelSpec& spec : cfg.models) {
    ModelRun m;
    m.spec = spec;
    const std::string label = spec.label();
    const json rep = json::parse(slurp(dir / (label + ".report.json")));
    m.report.lower_bound = rep.at("lower_bound").get<double>();
    m.report.upper_bound = rep.at("upper_bound").is_null()
                               ? std::numeric_limits<double>::infinity()
                               : rep.at("upper_bound").get<double>();
    m.report.lower_pools = pools_from_json(slurp(dir / (label + ".cuts.json")));
    runs.push_back(std::move(m));
  }
  evaluate_models(cfg, gp, runs, log);
  emit_summary(cfg, runs, log);
  return runs;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream* log) {
  const GeneratedProblem gp = build_problem(cfg);
  ExperimentResult res;
  res.models = solve_models(cfg, gp, log);
  evaluate_models(cfg, gp, res.models, log);
  res.summary = emit_summary(cfg, res.models, log);
  return res;
}

void export_lps(const ExperimentConfig& cfg, std::ostream* log) {
  const GeneratedProblem gp = build_problem(cfg);
  const Instance& inst = gp.instance;
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  save_instance(inst, (dir / "instance.json").string());
  const LowerApprox zero_tail;
  for (std::size_t t = 0; t < inst.horizon(); ++t) {
    std::vector<double> x_prev;
    std::vector<double> xi;
    if (t == 0) {
      x_prev = inst.x0;
      xi = inst.xi1;
    } else {
      const StageModel& prev = inst.stages[t - 1];
      x_prev.resize(prev.state_dim);
      for (std::size_t i = 0; i < prev.state_dim; ++i)
        x_prev[i] = box_midpoint(prev.state_lower[i], prev.state_upper[i]);
      xi = inst.data[t - 1].front();
    }
    const lp::LinearProgram stage =
        build_stage_lp(inst.stages[t], zero_tail, x_prev, xi, 0.0);
    char name[32];
    std::snprintf(name, sizeof name, "stage_%02zu", t + 1);
    write_text(dir / (std::string(name) + ".mps"), lp::to_mps(stage, name));
  }
  if (log) *log << "wrote " << inst.horizon() << " stage LPs to " << dir.string() << "\n";
}

std::string pools_to_json(const std::vector<LowerApprox>& pools, int indent) {
  json arr = json::array();
  for (const LowerApprox& p : pools) arr.push_back(json::parse(lower_to_json(p)));
  json j;
  j["pools"] = std::move(arr);
  return j.dump(indent);
}

std::vector<LowerApprox> pools_from_json(const std::string& text) {
  const json j = json::parse(text);
  std::vector<LowerApprox> out;
  for (const auto& p : j.at("pools")) out.push_back(lower_from_json(p.dump()));
  return out;
}

}  // namespace wdro
