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

// End-to-end acceptance gate: one pass/fail line per criterion, nonzero exit
// when any fails.  Every reference value comes from an independent solver
// (deterministic-equivalent trees, vertex enumeration, transport-plan
// programs), never from the code paths under test.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "../tests/test_support.hpp"
#include "wdro/ddp.hpp"
#include "wdro/evaluation.hpp"
#include "wdro/experiment.hpp"
#include "wdro/measures.hpp"
#include "wdro/model.hpp"
#include "wdro/oracle_baselines.hpp"
#include "wdro/oracle_concave.hpp"
#include "wdro/oracle_convex.hpp"
#include "wdro/problems.hpp"
#include "wdro/rng.hpp"
#include "wdro/stage_lp.hpp"

using namespace wdro;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Line {
  bool ok = false;
  std::string detail;
};

std::string fmt(const char* pattern, ...) {
  char buf[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof buf, pattern, args);
  va_end(args);
  return buf;
}

// Everything later criteria need from earlier ones.
enum class TailReference : char {
  NominalExact,     // deterministic-equivalent tree is the exact cost-to-go
  TransportScalar,  // two-stage scalar uncertainty, exact via a transport plan
  Sandwich,         // ambiguous tail bracketed by the nominal tree plus budget
};

struct TrainedModel {
  std::string tag;
  Instance inst;
  SolveReport report;
  TailReference ref = TailReference::NominalExact;
  std::vector<double> tail_budget;  // per tail, only for Sandwich
};

struct Context {
  GeneratedProblem base;             // inventory, two products, three stages
  std::vector<double> units;         // per-stage empirical dispersion radii
  std::vector<TrainedModel> suite;   // criteria 1-4 artifacts for cut audits
  std::vector<SolveReport> reports;  // every run, for the bound discipline audit
  double nominal_value = 0.0;
  double extensive_value = 0.0;
};

InventoryParams two_product_params() {
  InventoryParams p;
  p.products = 2;
  p.stages = 3;
  return p;
}

SolveConfig tight_config(double eps, std::size_t iters, unsigned workers = 1) {
  SolveConfig cfg;
  cfg.epsilon = eps;
  cfg.max_iterations = iters;
  cfg.workers = workers;
  return cfg;
}

SolveReport train(Context& ctx, const Instance& inst, const SolveConfig& cfg) {
  SolveReport rep = run(inst, cfg);
  ctx.reports.push_back(rep);
  return rep;
}

// Exact empirical-average cost-to-go after 0-based stage `after`, evaluated
// at state x: a passthrough head stage pins x, then the remaining stages
// branch over their atoms in one deterministic-equivalent tree.
double exact_nominal_tail(const Instance& inst, std::size_t after,
                          const std::vector<double>& x) {
  const StageModel& anchor = inst.stages[after];
  const std::size_t dim = anchor.state_dim;
  StageModel pass;
  pass.prev_dim = dim;
  pass.state_dim = dim;
  pass.internal_dim = 0;
  pass.xi_dim = 0;
  pass.A = Matrix(0, 0);
  pass.E = Matrix(2 * dim, dim);
  pass.F = Matrix(2 * dim, 0);
  pass.G = Matrix(2 * dim, dim);
  pass.H = Matrix(2 * dim, 0);
  pass.h.assign(2 * dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    pass.E(i, i) = -1.0;
    pass.G(i, i) = 1.0;
    pass.E(dim + i, i) = 1.0;
    pass.G(dim + i, i) = -1.0;
  }
  pass.state_lower = anchor.state_lower;
  pass.state_upper = anchor.state_upper;

  Instance sub;
  sub.stages.push_back(std::move(pass));
  for (std::size_t t = after + 1; t < inst.horizon(); ++t)
    sub.stages.push_back(inst.stages[t]);
  sub.x0 = x;
  sub.xi1 = {};
  for (std::size_t t = after; t + 1 < inst.horizon(); ++t)
    sub.data.push_back(inst.data[t]);
  return testsupport::extensive_form_value(sub);
}

// Exact ambiguous cost-to-go of a two-stage instance with scalar uncertainty:
// worst expectation of the terminal stage value over the transport ball,
// solved as a plan over atom/wall destinations (exact for values affine in
// the uncertainty).
double exact_transport_tail(const Instance& inst, const std::vector<double>& x) {
  const StageModel& s2 = inst.stages[1];
  static const LowerApprox none;
  const auto phi = [&](double xi) { return solve_stage(s2, none, x, {xi}).value; };
  const auto& set = std::get<WassersteinSet>(inst.ambiguity[0]);
  std::vector<double> atoms;
  for (const auto& a : inst.data[0]) atoms.push_back(a[0]);
  std::vector<double> candidates = {s2.xi_lower[0], s2.xi_upper[0]};
  candidates.insert(candidates.end(), atoms.begin(), atoms.end());
  return testsupport::transport_worst_expectation(atoms, set.radius, candidates, phi);
}

// Deterministic first stage choosing x in [0,1] at marginal cost 0.6.
StageModel toy_first_stage() {
  StageModel s;
  s.prev_dim = 0;
  s.state_dim = 1;
  s.internal_dim = 1;
  s.xi_dim = 0;
  s.A = Matrix(1, 0);
  s.a = {0.6};
  s.E = Matrix(2, 0);
  s.F = Matrix(2, 1);
  s.F(0, 0) = -1.0;
  s.F(1, 0) = 1.0;
  s.G = Matrix(2, 1);
  s.G(0, 0) = 1.0;
  s.G(1, 0) = -1.0;
  s.h = {0.0, 0.0};
  s.H = Matrix(2, 0);
  s.internal_lower = {0.0};
  s.internal_upper = {1.0};
  s.state_lower = {0.0};
  s.state_upper = {1.0};
  return s;
}

// Terminal value 2(xi - x) + 3 written with the uncertainty in the rows.
StageModel toy_rhs_stage() {
  StageModel s;
  s.prev_dim = 1;
  s.state_dim = 0;
  s.internal_dim = 2;  // recourse y in [-5,5] at cost 2, constant at cost 3
  s.xi_dim = 1;
  s.A = Matrix(2, 1);
  s.a = {2.0, 3.0};
  s.E = Matrix(1, 1);
  s.E(0, 0) = -1.0;
  s.F = Matrix(1, 2);
  s.F(0, 0) = -1.0;
  s.G = Matrix(1, 0);
  s.h = {0.0};
  s.H = Matrix(1, 1);
  s.H(0, 0) = -1.0;
  s.internal_lower = {-5.0, 1.0};
  s.internal_upper = {5.0, 1.0};
  s.xi_lower = {0.0};
  s.xi_upper = {1.0};
  return s;
}

// The same terminal value written with the uncertainty in the objective.
StageModel toy_objective_stage() {
  StageModel s;
  s.prev_dim = 1;
  s.state_dim = 0;
  s.internal_dim = 2;  // carrier pinned at one, copy pinned to the state
  s.xi_dim = 1;
  s.A = Matrix(2, 1);
  s.A(0, 0) = 2.0;
  s.a = {3.0, -2.0};
  s.E = Matrix(2, 1);
  s.E(0, 0) = 1.0;
  s.E(1, 0) = -1.0;
  s.F = Matrix(2, 2);
  s.F(0, 1) = -1.0;
  s.F(1, 1) = 1.0;
  s.G = Matrix(2, 0);
  s.h = {0.0, 0.0};
  s.H = Matrix(2, 1);
  s.internal_lower = {1.0, -5.0};
  s.internal_upper = {1.0, 5.0};
  s.xi_lower = {0.0};
  s.xi_upper = {1.0};
  return s;
}

Instance toy_instance(StageModel terminal) {
  Instance inst;
  inst.stages = {toy_first_stage(), std::move(terminal)};
  inst.x0 = {};
  inst.xi1 = {};
  inst.ambiguity = {WassersteinSet{0.3, {}}};
  inst.data = {{{0.2}, {0.8}}};
  inst.regularization = {4.0};
  inst.growth_rate = {0.0};
  inst.lipschitz_xi = {2.0};
  return inst;
}

// Value xi itself: one carrier variable pinned at one, priced at xi.
StageModel identity_value_stage() {
  StageModel s;
  s.prev_dim = 1;
  s.state_dim = 0;
  s.internal_dim = 1;
  s.xi_dim = 1;
  s.A = Matrix(1, 1);
  s.A(0, 0) = 1.0;
  s.a = {0.0};
  s.E = Matrix(0, 1);
  s.F = Matrix(0, 1);
  s.G = Matrix(0, 0);
  s.H = Matrix(0, 1);
  s.internal_lower = {1.0};
  s.internal_upper = {1.0};
  s.xi_lower = {0.0};
  s.xi_upper = {1.0};
  return s;
}

// Same value with the uncertainty moved into the row system.
StageModel identity_value_rhs_stage() {
  StageModel s;
  s.prev_dim = 1;
  s.state_dim = 0;
  s.internal_dim = 1;
  s.xi_dim = 1;
  s.A = Matrix(1, 1);
  s.a = {1.0};
  s.E = Matrix(1, 1);
  s.F = Matrix(1, 1);
  s.F(0, 0) = -1.0;
  s.G = Matrix(1, 0);
  s.h = {0.0};
  s.H = Matrix(1, 1);
  s.H(0, 0) = -1.0;
  s.internal_lower = {0.0};
  s.internal_upper = {5.0};
  s.xi_lower = {0.0};
  s.xi_upper = {1.0};
  return s;
}

Tail zero_tail() {
  static const LowerApprox empty;
  Tail t;
  t.lower = &empty;
  t.upper = nullptr;
  return t;
}

// ---------------------------------------------------------------------------

Line criterion_extensive_equivalence(Context& ctx) {
  ctx.base = build_inventory_demand(two_product_params(), 42, 2);
  ctx.units.clear();
  for (const auto& atoms : ctx.base.instance.data)
    ctx.units.push_back(radius_hat(DiscreteMeasure::uniform(atoms)));

  const auto t0 = std::chrono::steady_clock::now();
  const SolveReport rep = train(ctx, ctx.base.instance, tight_config(1e-6, 500, 4));
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  ctx.extensive_value = testsupport::extensive_form_value(ctx.base.instance);
  ctx.nominal_value = rep.lower_bound;
  ctx.suite.push_back({"nominal", ctx.base.instance, rep, TailReference::NominalExact, {}});

  const double rel = std::fabs(rep.upper_bound - ctx.extensive_value) /
                     std::fabs(ctx.extensive_value);
  const bool ok = rep.status == RunStatus::GapReached && rel <= 1e-3 && seconds < 60.0;
  return {ok, fmt("ddp %.10g vs tree %.10g (rel %.2e), %.2fs", rep.upper_bound,
                  ctx.extensive_value, rel, seconds)};
}

Line criterion_zero_radius(Context& ctx) {
  ModelSpec zero;
  zero.kind = ModelSpec::Kind::Wasserstein;
  zero.gamma = 0.0;
  const Instance inst = configure_instance(ctx.base.instance, zero, ctx.units);
  const SolveReport rep = train(ctx, inst, tight_config(1e-9, 1000, 4));
  ctx.suite.push_back({"radius-zero", inst, rep, TailReference::NominalExact, {}});

  const double diff = std::fabs(rep.lower_bound - ctx.nominal_value);
  const bool ok = rep.status == RunStatus::GapReached && diff <= 1e-5;
  return {ok, fmt("|%.10g - %.10g| = %.2e", rep.lower_bound, ctx.nominal_value, diff)};
}

Line criterion_radius_monotonicity(Context& ctx) {
  const double eps = 1e-9;
  const std::vector<double> gammas = {0.0, 0.1, 0.5, 1.0, 2.0};
  double slope_budget = 0.0;
  for (std::size_t j = 0; j < ctx.units.size(); ++j)
    slope_budget += ctx.base.instance.lipschitz_xi[j] * ctx.units[j];

  std::vector<double> values;
  bool converged = true;
  for (double g : gammas) {
    ModelSpec spec;
    spec.kind = ModelSpec::Kind::Wasserstein;
    spec.gamma = g;
    const Instance inst = configure_instance(ctx.base.instance, spec, ctx.units);
    const SolveReport rep = train(ctx, inst, tight_config(eps, 3000, 4));
    converged = converged && rep.status == RunStatus::GapReached;
    values.push_back(rep.lower_bound);
    if (g > 0.0) {
      std::vector<double> budget(ctx.units.size());
      for (std::size_t i = 0; i < ctx.units.size(); ++i)
        for (std::size_t j = i; j < ctx.units.size(); ++j)
          budget[i] += g * ctx.base.instance.lipschitz_xi[j] * ctx.units[j];
      ctx.suite.push_back({fmt("radius-%g", g), inst, rep, TailReference::Sandwich,
                           std::move(budget)});
    }
  }

  bool monotone = true;
  double max_slope = -kInf;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    monotone = monotone && values[i + 1] >= values[i] - 1e-8;
    const double dg = gammas[i + 1] - gammas[i];
    max_slope = std::max(max_slope, (values[i + 1] - values[i] - 2.0 * eps) / dg);
  }
  const bool ok = converged && monotone && max_slope <= slope_budget + 1e-9;
  return {ok, fmt("values %.6g..%.6g monotone=%d, max slope %.6g <= budget %.6g",
                  values.front(), values.back(), int(monotone), max_slope,
                  slope_budget)};
}

Line criterion_oracle_agreement(Context& ctx) {
  const Instance rhs_form = toy_instance(toy_rhs_stage());
  const Instance obj_form = toy_instance(toy_objective_stage());
  if (!validate(rhs_form).empty() || !validate(obj_form).empty())
    return {false, "toy instances failed validation"};
  if (oracle_kind(rhs_form, 1) != OracleKind::WassersteinRhs ||
      oracle_kind(obj_form, 1) != OracleKind::WassersteinObjective)
    return {false, "toy instances did not select distinct oracles"};

  const SolveReport a = train(ctx, rhs_form, tight_config(1e-7, 200, 1));
  const SolveReport b = train(ctx, obj_form, tight_config(1e-7, 200, 1));
  ctx.suite.push_back({"affine-rows", rhs_form, a, TailReference::TransportScalar, {}});
  ctx.suite.push_back({"affine-costs", obj_form, b, TailReference::TransportScalar, {}});

  // Closed form: x*=1, worst mean = 0.8, value 0.6 + 2(0.8 - 1) + 3 = 3.2.
  const double diff = std::fabs(a.lower_bound - b.lower_bound);
  const bool ok = a.status == RunStatus::GapReached &&
                  b.status == RunStatus::GapReached && diff <= 1e-4 &&
                  std::fabs(a.lower_bound - 3.2) <= 1e-5;
  return {ok, fmt("rows-form %.8g vs costs-form %.8g (diff %.2e, closed form 3.2)",
                  a.lower_bound, b.lower_bound, diff)};
}

Line criterion_budget_toy(Context&) {
  WassersteinSet set;
  set.radius = 0.2;
  const double brute = testsupport::transport_worst_expectation(
      {0.5}, set.radius, {0.0, 0.5, 1.0}, [](double v) { return v; });

  ConcaveOracle concave(identity_value_stage(), {{0.5}}, set, 10.0);
  const double via_objective =
      concave.evaluate({0.1}, zero_tail(), std::nullopt).cut.value;
  ConvexOracle convex(identity_value_rhs_stage(), {{0.5}}, set, 10.0);
  const double via_rows = convex.evaluate({0.1}, zero_tail(), std::nullopt).cut.value;

  const double dev = std::max(std::fabs(via_objective - 0.7), std::fabs(via_rows - 0.7));
  const bool ok =
      std::fabs(brute - 0.7) <= 1e-12 && dev <= 1e-6;
  return {ok, fmt("brute %.10g, costs-oracle %.10g, rows-oracle %.10g (max dev %.2e)",
                  brute, via_objective, via_rows, dev)};
}

Line criterion_cvar_weights(Context&) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> value_dist(-5.0, 5.0), u01(0.0, 1.0);
  std::uniform_int_distribution<int> size_dist(2, 6);
  double max_gap = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const int n = size_dist(rng);
    std::vector<double> values(n);
    for (double& v : values) v = value_dist(rng);
    const double alpha = 0.05 + 0.95 * u01(rng);
    const double beta = u01(rng);
    const std::vector<double> w = cvar_weights(values, alpha, beta);
    const std::vector<double> ref = testsupport::cvar_weights_reference(values, alpha, beta);
    double got = 0.0, want = 0.0, total = 0.0;
    for (int k = 0; k < n; ++k) {
      got += w[k] * values[k];
      want += ref[k] * values[k];
      total += w[k];
    }
    max_gap = std::max(max_gap, std::fabs(got - want));
    max_gap = std::max(max_gap, std::fabs(total - 1.0));
  }

  bool uniform_exact = true;
  for (int n : {2, 3, 7}) {
    std::vector<double> values(n);
    for (int k = 0; k < n; ++k) values[k] = value_dist(rng);
    for (double w : cvar_weights(values, 0.3, 1.0))
      uniform_exact = uniform_exact && w == 1.0 / double(n);
  }
  const bool ok = max_gap <= 1e-9 && uniform_exact;
  return {ok, fmt("100 triples, max gap %.2e; beta=1 uniform exact=%d", max_gap,
                  int(uniform_exact))};
}

Line criterion_transport_lp(Context&) {
  const std::vector<DiscreteMeasure> fixed = {
      {{{0.0, 0.0}}, {1.0}},
      {{{1.0, 2.0}, {3.0, -1.0}}, {0.3, 0.7}},
      {{{0.5, 0.5}, {2.0, 2.0}, {-1.0, 1.0}}, {1.0 / 3, 1.0 / 3, 1.0 / 3}},
      {{{0.5, 0.5}, {2.0, 2.0}, {-1.0, 1.0}}, {0.6, 0.1, 0.3}},
      {{{2.0, 2.0}, {0.0, 0.0}}, {0.5, 0.5}},
  };
  double max_dev = 0.0;
  for (const auto& mu : fixed) {
    for (const auto& nu : fixed) {
      const double got = wasserstein_l1(mu, nu);
      const double want = testsupport::transport_l1_bruteforce(mu.atoms, mu.weights,
                                                               nu.atoms, nu.weights);
      max_dev = std::max(max_dev, std::fabs(got - want));
    }
  }

  Rng rng(314);
  double worst_slack = 0.0, max_asym = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const auto random_measure = [&]() {
      DiscreteMeasure m;
      const int n = 2 + int(rng.uniform() * 2.0);
      double total = 0.0;
      for (int k = 0; k < n; ++k) {
        m.atoms.push_back({rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)});
        m.weights.push_back(0.1 + rng.uniform());
        total += m.weights.back();
      }
      for (double& w : m.weights) w /= total;
      return m;
    };
    const DiscreteMeasure a = random_measure(), b = random_measure(),
                          c = random_measure();
    max_asym = std::max(max_asym, std::fabs(wasserstein_l1(a, b) - wasserstein_l1(b, a)));
    worst_slack = std::max(worst_slack, wasserstein_l1(a, c) - wasserstein_l1(a, b) -
                                            wasserstein_l1(b, c));
  }
  const bool ok = max_dev <= 1e-9 && max_asym <= 1e-8 && worst_slack <= 1e-8;
  return {ok, fmt("25 pairs max dev %.2e; asymmetry %.2e; triangle slack %.2e",
                  max_dev, max_asym, worst_slack)};
}

Line criterion_cut_validity(Context& ctx) {
  std::size_t cut_checks = 0, over_checks = 0;
  double worst = 0.0;
  for (const TrainedModel& model : ctx.suite) {
    const std::size_t tails = model.report.lower_pools.size();
    for (std::size_t i = 0; i < tails; ++i) {
      const StageModel& owner = model.inst.stages[i];
      const auto reference = [&](const std::vector<double>& x) {
        return model.ref == TailReference::TransportScalar
                   ? exact_transport_tail(model.inst, x)
                   : exact_nominal_tail(model.inst, i, x);
      };
      const double budget =
          model.ref == TailReference::Sandwich ? model.tail_budget[i] : 0.0;

      Rng rng(900 + 31 * i + std::hash<std::string>{}(model.tag) % 1000);
      std::vector<std::vector<double>> states(100);
      std::vector<double> exact(100);
      for (std::size_t r = 0; r < 100; ++r) {
        states[r].resize(owner.state_dim);
        for (std::size_t d = 0; d < owner.state_dim; ++d)
          states[r][d] = rng.uniform(owner.state_lower[d], owner.state_upper[d]);
        exact[r] = reference(states[r]);
      }
      for (const Cut& cut : model.report.lower_pools[i].cuts()) {
        for (std::size_t r = 0; r < 100; ++r) {
          worst = std::max(worst, cut.eval(states[r]) - (exact[r] + budget));
          ++cut_checks;
        }
      }
      const UpperApprox& up = model.report.upper_pools[i];
      for (std::size_t k = 0; k < up.points().size(); ++k) {
        worst = std::max(worst, reference(up.points()[k]) - up.values()[k]);
        ++over_checks;
      }
    }
  }
  const bool ok = worst <= 1e-5 && cut_checks > 0 && over_checks > 0;
  return {ok, fmt("%zu cut checks, %zu overestimate checks, worst violation %.2e",
                  cut_checks, over_checks, worst)};
}

Line criterion_bound_discipline(Context& ctx) {
  std::size_t iterations = 0, violations = 0;
  for (const SolveReport& rep : ctx.reports) {
    double prev = -kInf;
    for (const IterationRecord& it : rep.iterations) {
      ++iterations;
      if (it.lower < prev) ++violations;
      if (it.upper < it.lower) ++violations;
      prev = it.lower;
    }
  }
  const bool ok = violations == 0 && iterations > 0 && ctx.reports.size() >= 10;
  return {ok, fmt("%zu runs, %zu iterations, %zu violations", ctx.reports.size(),
                  iterations, violations)};
}

Line criterion_lp_engine(Context&) {
  std::mt19937_64 rng(7);
  int optimal = 0, infeasible = 0;
  double max_obj_dev = 0.0, max_dual_gap = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    lp::LinearProgram prog;
    std::uniform_int_distribution<int> nd(1, 4), md(0, 4), coef(-3, 3);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const int n = nd(rng), m = md(rng);
    for (int j = 0; j < n; ++j) {
      const double lb = -std::floor(u01(rng) * 4.0);
      const double ub = std::floor(u01(rng) * 4.0);
      prog.add_var(lb, ub, coef(rng));
    }
    for (int i = 0; i < m; ++i) {
      std::vector<std::pair<int, double>> terms;
      for (int j = 0; j < n; ++j) {
        const int c = coef(rng);
        if (c != 0) terms.push_back({j, double(c)});
      }
      const lp::RowSense s =
          u01(rng) < 0.25 ? lp::RowSense::Equal : lp::RowSense::LessEqual;
      prog.add_row(s, terms, std::floor(u01(rng) * 11.0) - 5.0);
    }

    const auto ref = testsupport::vertex_enumeration_solve(prog);
    const lp::Solution sol = lp::solve(prog);
    if (ref.feasible) {
      ++optimal;
      if (sol.status != lp::SolveStatus::Optimal)
        return {false, fmt("rep %d: reference feasible but solver said %s", rep,
                           lp::to_string(sol.status))};
      const double scale = 1.0 + std::fabs(ref.objective);
      max_obj_dev =
          std::max(max_obj_dev, std::fabs(sol.objective - ref.objective) / scale);
      max_dual_gap = std::max(max_dual_gap,
                              std::fabs(sol.objective - sol.dual_objective) / scale);
    } else {
      ++infeasible;
      if (sol.status != lp::SolveStatus::Infeasible)
        return {false, fmt("rep %d: reference infeasible but solver said %s", rep,
                           lp::to_string(sol.status))};
    }
  }
  const bool ok = max_obj_dev <= 1e-7 && max_dual_gap <= 1e-7 && optimal >= 250 &&
                  infeasible >= 50;
  return {ok, fmt("1000 LPs (%d optimal / %d infeasible), vertex dev %.2e, "
                  "duality gap %.2e",
                  optimal, infeasible, max_obj_dev, max_dual_gap)};
}

Line criterion_eval_guarantee(Context& ctx) {
  const InventoryParams p = two_product_params();
  int success = 0;
  double first_margin = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const GeneratedProblem gp = build_inventory_demand(p, 1000 + trial, 5);
    std::vector<double> units;
    for (const auto& atoms : gp.instance.data)
      units.push_back(radius_hat(DiscreteMeasure::uniform(atoms)));
    ModelSpec spec;
    spec.kind = ModelSpec::Kind::Wasserstein;
    spec.gamma = 1.0;
    const Instance inst = configure_instance(gp.instance, spec, units);
    const SolveReport rep = train(ctx, inst, tight_config(1e-5, 800, 4));
    const PolicyRun sim =
        simulate_policy(inst, rep.lower_pools, gp.sampler, 2000, 5000 + trial, 4);
    const double eval_mean = summarize(sim).mean;
    if (trial == 0) first_margin = rep.upper_bound - eval_mean;
    if (eval_mean <= rep.upper_bound) ++success;
  }
  const bool ok = success >= 7;
  return {ok, fmt("%d/10 trials with evaluation mean below the trained value "
                  "(first margin %.4g)",
                  success, first_margin)};
}

Line criterion_quantile_profile(Context& ctx) {
  const GeneratedProblem gp = build_inventory_demand(two_product_params(), 2026, 5);
  std::vector<double> units;
  for (const auto& atoms : gp.instance.data)
    units.push_back(radius_hat(DiscreteMeasure::uniform(atoms)));

  const std::vector<double> gammas = {0.0, std::pow(10.0, -1.4),
                                      std::pow(10.0, -1.2), std::pow(10.0, -1.0)};
  std::vector<double> q90;
  for (double g : gammas) {
    ModelSpec spec;
    spec.kind = ModelSpec::Kind::Wasserstein;
    spec.gamma = g;
    const Instance inst = configure_instance(gp.instance, spec, units);
    const SolveReport rep = train(ctx, inst, tight_config(1e-5, 800, 4));
    const PolicyRun sim =
        simulate_policy(inst, rep.lower_pools, gp.sampler, 5000, 777, 4);
    q90.push_back(summarize(sim).quantiles[5]);
  }
  double best = kInf;
  double best_gamma = 0.0;
  for (std::size_t i = 1; i < gammas.size(); ++i)
    if (q90[i] < best) {
      best = q90[i];
      best_gamma = gammas[i];
    }
  const bool ok = best <= q90[0];
  return {ok, fmt("90%% quantile %.6g at gamma 0 vs %.6g at gamma %.4g", q90[0], best,
                  best_gamma)};
}

}  // namespace

int main() {
  Context ctx;
  std::map<int, std::pair<const char*, Line>> lines;
  const auto guard = [&](int id, const char* name, const std::function<Line()>& fn) {
    try {
      lines[id] = {name, fn()};
    } catch (const std::exception& e) {
      lines[id] = {name, {false, std::string("exception: ") + e.what()}};
    }
  };

  guard(1, "deterministic-equivalent agreement", [&] { return criterion_extensive_equivalence(ctx); });
  guard(2, "zero-radius consistency", [&] { return criterion_zero_radius(ctx); });
  guard(3, "radius monotonicity and slope cap", [&] { return criterion_radius_monotonicity(ctx); });
  guard(4, "rows/costs oracle agreement", [&] { return criterion_oracle_agreement(ctx); });
  guard(5, "transport budget toy value", [&] { return criterion_budget_toy(ctx); });
  guard(6, "risk-measure weights", [&] { return criterion_cvar_weights(ctx); });
  guard(7, "transport distance properties", [&] { return criterion_transport_lp(ctx); });
  guard(8, "cut and overestimate validity", [&] { return criterion_cut_validity(ctx); });
  guard(10, "simplex certificates", [&] { return criterion_lp_engine(ctx); });
  guard(11, "out-of-sample guarantee trials", [&] { return criterion_eval_guarantee(ctx); });
  guard(12, "tail-quantile improvement", [&] { return criterion_quantile_profile(ctx); });
  guard(9, "bound discipline", [&] { return criterion_bound_discipline(ctx); });

  int failures = 0;
  for (const auto& [id, entry] : lines) {
    const auto& [name, line] = entry;
    std::printf("[%s] %2d %-36s %s\n", line.ok ? "PASS" : "FAIL", id, name,
                line.detail.c_str());
    if (!line.ok) ++failures;
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
