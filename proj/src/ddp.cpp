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

#include "wdro/ddp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <utility>
#include <variant>

#include "nlohmann/json.hpp"
#include "wdro/oracle_baselines.hpp"
#include "wdro/oracle_concave.hpp"
#include "wdro/oracle_convex.hpp"
#include "wdro/rng.hpp"
#include "wdro/stage_lp.hpp"

namespace wdro {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::GapReached: return "gap_reached";
    case RunStatus::IterationCap: return "iteration_cap";
    case RunStatus::TimeCap: return "time_cap";
  }
  return "unknown";
}

std::unique_ptr<StageOracle> make_stage_oracle(const Instance& inst, std::size_t t,
                                               unsigned workers) {
  if (t == 0 || t >= inst.horizon())
    throw std::out_of_range("make_stage_oracle: noninitial stage index required");
  const StageModel& s = inst.stages[t];
  const auto& atoms = inst.data[t - 1];
  const double penalty = inst.regularization.empty()
                             ? recommended_regularization(inst)[t - 1]
                             : inst.regularization[t - 1];
  const AmbiguitySpec& amb = inst.ambiguity[t - 1];

  switch (oracle_kind(inst, t)) {
    case OracleKind::ScenarioBased: {
      if (std::holds_alternative<RobustSet>(amb))
        return std::make_unique<RobustOracle>(s, penalty, workers);
      if (const CvarSet* c = std::get_if<CvarSet>(&amb))
        return std::make_unique<ScenarioOracle>(s, atoms, c->alpha, c->beta, penalty,
                                                workers);
      return std::make_unique<ScenarioOracle>(s, atoms, 1.0, 1.0, penalty, workers);
    }
    case OracleKind::WassersteinObjective:
      return std::make_unique<ConcaveOracle>(s, atoms, std::get<WassersteinSet>(amb),
                                             penalty, workers);
    case OracleKind::WassersteinRhs: {
      std::optional<double> declared;
      if (!inst.growth_rate.empty()) declared = inst.growth_rate[t - 1];
      return std::make_unique<ConvexOracle>(s, atoms, std::get<WassersteinSet>(amb),
                                            penalty, declared, workers);
    }
  }
  throw std::logic_error("make_stage_oracle: unhandled oracle kind");
}

InitialSolve initial_stage_solve(const StageModel& stage1,
                                 const std::vector<double>& x0,
                                 const std::vector<double>& xi1, const Tail& tail,
                                 const lp::SolveOptions& opt) {
  const StageSolve sol = solve_stage(stage1, *tail.lower, x0, xi1, opt);
  InitialSolve out;
  out.x1 = sol.x;
  out.value = sol.value;
  out.stage_cost = sol.stage_cost;
  out.gap = tail.gap(sol.x);
  return out;
}

SolveReport run(const Instance& inst, const SolveConfig& cfg) {
  const std::vector<std::string> problems = validate(inst);
  if (!problems.empty()) {
    std::string msg = "instance rejected:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw std::invalid_argument(msg);
  }
  std::vector<std::unique_ptr<StageOracle>> oracles;
  for (std::size_t t = 1; t < inst.horizon(); ++t)
    oracles.push_back(make_stage_oracle(inst, t, cfg.workers));
  return run(inst, oracles, cfg);
}

SolveReport run(const Instance& inst,
                const std::vector<std::unique_ptr<StageOracle>>& oracles,
                const SolveConfig& cfg) {
  const std::size_t T = inst.horizon();
  if (oracles.size() + 1 != T)
    throw std::invalid_argument("run: expected one oracle per noninitial stage");
  const auto start = std::chrono::steady_clock::now();

  std::vector<double> penalties = inst.regularization.empty()
                                      ? recommended_regularization(inst)
                                      : inst.regularization;
  SolveReport rep;
  rep.lower_pools.reserve(T > 0 ? T - 1 : 0);
  rep.upper_pools.reserve(T > 0 ? T - 1 : 0);
  for (std::size_t p = 0; p + 1 < T; ++p) {
    rep.lower_pools.emplace_back(penalties[p]);
    rep.upper_pools.emplace_back(penalties[p]);
  }
  static const LowerApprox kZeroTail;
  rep.upper_bound = kInf;
  rep.lower_bound = -kInf;
  rep.status = RunStatus::IterationCap;

  const auto tail_after = [&](std::size_t s) {
    Tail tail;
    if (s + 1 < T) {
      tail.lower = &rep.lower_pools[s];
      tail.upper = &rep.upper_pools[s];
    } else {
      tail.lower = &kZeroTail;
      tail.upper = nullptr;
    }
    return tail;
  };
  const auto out_of_time = [&] {
    return cfg.time_cap_seconds > 0.0 && seconds_since(start) >= cfg.time_cap_seconds;
  };

  for (std::size_t iter = 1;; ++iter) {
    InitialSolve init;
    try {
      init = initial_stage_solve(inst.stages[0], inst.x0, inst.xi1, tail_after(0),
                                 cfg.lp);
    } catch (const StageLpError& e) {
      throw OracleFailure("iteration " + std::to_string(iter) +
                          ", stage 1: " + e.what());
    }
    rep.lower_bound = init.value;
    const double candidate = init.stage_cost + tail_after(0).upper_eval(init.x1);
    if (rep.incumbent_x1.empty() || candidate < rep.upper_bound)
      rep.incumbent_x1 = init.x1;
    rep.upper_bound = std::min(rep.upper_bound, candidate);

    rep.iterations.push_back(IterationRecord{iter, rep.lower_bound, rep.upper_bound,
                                             seconds_since(start), {}});
    IterationRecord& rec = rep.iterations.back();

    if (rep.upper_bound - rep.lower_bound <= cfg.epsilon) {
      rep.status = RunStatus::GapReached;
      break;
    }
    if (iter >= cfg.max_iterations) {
      rep.status = RunStatus::IterationCap;
      break;
    }
    if (out_of_time()) {
      rep.status = RunStatus::TimeCap;
      break;
    }

    Rng sampler = Rng::stream(cfg.sample_seed, iter);
    std::vector<double> x_prev = init.x1;
    bool timed_out = false;
    for (std::size_t s = 1; s < T; ++s) {
      if (out_of_time()) {
        timed_out = true;
        break;
      }
      std::optional<std::size_t> forced;
      if (cfg.forward == ForwardMode::Sampled)
        forced = sampler.below(oracles[s - 1]->outcome_count());
      OracleOutput out;
      try {
        out = oracles[s - 1]->evaluate(x_prev, tail_after(s), forced);
      } catch (const StageLpError& e) {
        throw OracleFailure("iteration " + std::to_string(iter) + ", stage " +
                            std::to_string(s + 1) + ": " + e.what());
      } catch (const OracleFailure& e) {
        throw OracleFailure("iteration " + std::to_string(iter) + ", stage " +
                            std::to_string(s + 1) + ": " + e.what());
      }
      ++rep.oracle_evaluations;
      rec.stage_gaps.push_back(out.gap);
      rep.lower_pools[s - 1].add(out.cut);
      if (std::isfinite(out.overestimate))
        rep.upper_pools[s - 1].add(x_prev, out.overestimate);
      x_prev = out.next_state;
    }
    if (timed_out) {
      rep.status = RunStatus::TimeCap;
      break;
    }
  }
  return rep;
}

std::string report_to_json(const SolveReport& rep, int indent) {
  nlohmann::json j;
  j["status"] = to_string(rep.status);
  j["lower_bound"] = rep.lower_bound;
  j["upper_bound"] = std::isfinite(rep.upper_bound) ? nlohmann::json(rep.upper_bound)
                                                    : nlohmann::json();
  j["incumbent_x1"] = rep.incumbent_x1;
  j["oracle_evaluations"] = rep.oracle_evaluations;
  j["iterations"] = nlohmann::json::array();
  for (const auto& it : rep.iterations) {
    nlohmann::json r;
    r["iteration"] = it.iteration;
    r["lower"] = it.lower;
    r["upper"] = std::isfinite(it.upper) ? nlohmann::json(it.upper) : nlohmann::json();
    r["seconds"] = it.seconds;
    r["stage_gaps"] = it.stage_gaps;
    j["iterations"].push_back(std::move(r));
  }
  j["lower_pools"] = nlohmann::json::array();
  j["upper_pools"] = nlohmann::json::array();
  for (const auto& p : rep.lower_pools)
    j["lower_pools"].push_back(nlohmann::json::parse(lower_to_json(p)));
  for (const auto& p : rep.upper_pools)
    j["upper_pools"].push_back(nlohmann::json::parse(upper_to_json(p)));
  return j.dump(indent);
}

void write_bounds_csv(const SolveReport& rep, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "iteration,lower,upper,seconds\n";
  char buf[128];
  for (const auto& it : rep.iterations) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.6f\n", it.iteration, it.lower,
                  it.upper, it.seconds);
    out << buf;
  }
}

}  // namespace wdro
