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

#include "wdro/model.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace wdro {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string dim_err(const std::string& what, std::size_t got, std::size_t want) {
  std::ostringstream os;
  os << what << ": have " << got << ", expected " << want;
  return os.str();
}

void check_matrix(std::vector<std::string>& errs, const std::string& name,
                  const Matrix& m, std::size_t rows, std::size_t cols) {
  if (m.rows == 0 && m.cols == 0 && m.v.empty()) return;  // absent means zero
  if (m.rows != rows || m.cols != cols)
    errs.push_back(name + ": have " + std::to_string(m.rows) + "x" +
                   std::to_string(m.cols) + ", expected " + std::to_string(rows) +
                   "x" + std::to_string(cols));
  if (m.v.size() != m.rows * m.cols)
    errs.push_back(name + ": storage size mismatch");
}

}  // namespace

UncertaintyShape uncertainty_shape(const StageModel& s) {
  const bool obj = !(s.A.v.empty() || s.A.is_zero());
  const bool rhs = !(s.H.v.empty() || s.H.is_zero());
  if (obj && rhs) return UncertaintyShape::Mixed;
  if (obj) return UncertaintyShape::Objective;
  if (rhs) return UncertaintyShape::RightHandSide;
  return UncertaintyShape::None;
}

std::vector<std::string> validate(const Instance& inst) {
  std::vector<std::string> errs;
  const std::size_t T = inst.horizon();
  if (T == 0) {
    errs.push_back("instance has no stages");
    return errs;
  }
  for (std::size_t t = 0; t < T; ++t) {
    const StageModel& s = inst.stages[t];
    const std::string tag = "stage " + std::to_string(t + 1);
    const std::size_t m = s.num_rows();
    check_matrix(errs, tag + " A", s.A, s.internal_dim, s.xi_dim);
    check_matrix(errs, tag + " E", s.E, m, s.prev_dim);
    check_matrix(errs, tag + " F", s.F, m, s.internal_dim);
    check_matrix(errs, tag + " G", s.G, m, s.state_dim);
    check_matrix(errs, tag + " H", s.H, m, s.xi_dim);
    if (s.a.size() != s.internal_dim)
      errs.push_back(dim_err(tag + " a", s.a.size(), s.internal_dim));
    if (s.internal_lower.size() != s.internal_dim ||
        s.internal_upper.size() != s.internal_dim)
      errs.push_back(tag + " internal bounds size mismatch");
    if (s.state_lower.size() != s.state_dim || s.state_upper.size() != s.state_dim)
      errs.push_back(tag + " state bounds size mismatch");
    if (s.xi_lower.size() != s.xi_dim || s.xi_upper.size() != s.xi_dim)
      errs.push_back(tag + " support box size mismatch");
    for (std::size_t i = 0; i < s.state_dim; ++i) {
      if (!(s.state_lower[i] <= s.state_upper[i]))
        errs.push_back(tag + " empty state box");
      if (!std::isfinite(s.state_lower[i]) || !std::isfinite(s.state_upper[i]))
        errs.push_back(tag + " state box must be bounded");
    }
    for (std::size_t i = 0; i < s.xi_dim; ++i) {
      if (!(s.xi_lower[i] <= s.xi_upper[i]))
        errs.push_back(tag + " empty support box");
    }
    if (uncertainty_shape(s) == UncertaintyShape::Mixed)
      errs.push_back(tag + " has uncertainty in both objective and right-hand side");
    if (t > 0 && s.prev_dim != inst.stages[t - 1].state_dim)
      errs.push_back(tag + " incoming state dimension does not chain");
  }
  if (inst.x0.size() != inst.stages[0].prev_dim)
    errs.push_back(dim_err("x0", inst.x0.size(), inst.stages[0].prev_dim));
  if (inst.xi1.size() != inst.stages[0].xi_dim)
    errs.push_back(dim_err("xi1", inst.xi1.size(), inst.stages[0].xi_dim));
  if (inst.ambiguity.size() != T - 1)
    errs.push_back(dim_err("ambiguity entries", inst.ambiguity.size(), T - 1));
  if (inst.data.size() != T - 1)
    errs.push_back(dim_err("data entries", inst.data.size(), T - 1));
  if (inst.regularization.size() != T - 1)
    errs.push_back(dim_err("regularization entries", inst.regularization.size(), T - 1));
  if (!inst.growth_rate.empty() && inst.growth_rate.size() != T - 1)
    errs.push_back(dim_err("growth_rate entries", inst.growth_rate.size(), T - 1));
  if (!inst.lipschitz_xi.empty() && inst.lipschitz_xi.size() != T - 1)
    errs.push_back(dim_err("lipschitz_xi entries", inst.lipschitz_xi.size(), T - 1));
  for (std::size_t k = 0; k < inst.regularization.size(); ++k) {
    if (!(inst.regularization[k] > 0.0) || !std::isfinite(inst.regularization[k]))
      errs.push_back("regularization for stage " + std::to_string(k + 2) +
                     " must be positive and finite");
  }
  for (std::size_t k = 0; k + 1 < T && k < inst.data.size(); ++k) {
    const StageModel& s = inst.stages[k + 1];
    const std::string tag = "stage " + std::to_string(k + 2);
    if (inst.data[k].empty()) errs.push_back(tag + " has no outcome atoms");
    for (const auto& atom : inst.data[k]) {
      if (atom.size() != s.xi_dim) {
        errs.push_back(tag + " atom dimension mismatch");
        break;
      }
      for (std::size_t i = 0; i < atom.size(); ++i) {
        if (atom[i] < s.xi_lower[i] - 1e-12 || atom[i] > s.xi_upper[i] + 1e-12) {
          errs.push_back(tag + " atom outside the support box");
          break;
        }
      }
    }
    if (k < inst.ambiguity.size()) {
      if (const auto* w = std::get_if<WassersteinSet>(&inst.ambiguity[k])) {
        if (!(w->radius >= 0.0)) errs.push_back(tag + " negative radius");
        for (std::size_t j = 0; j < w->moments.size(); ++j) {
          const MomentConstraint& mc = w->moments[j];
          if (mc.coef.size() != s.xi_dim) {
            errs.push_back(tag + " moment statistic dimension mismatch");
            continue;
          }
          // The bound must leave slack at the empirical average, otherwise
          // the ambiguity set has empty relative interior.
          double avg = 0.0;
          bool sized = true;
          for (const auto& atom : inst.data[k]) {
            if (atom.size() != s.xi_dim) {
              sized = false;
              break;
            }
            double g = mc.offset;
            for (std::size_t i = 0; i < s.xi_dim; ++i) g += mc.coef[i] * atom[i];
            avg += g;
          }
          if (sized && !inst.data[k].empty() &&
              avg / double(inst.data[k].size()) >= mc.bound) {
            errs.push_back(tag + " moment bound " + std::to_string(j) +
                           " does not strictly exceed the empirical average");
          }
        }
      } else if (const auto* c = std::get_if<CvarSet>(&inst.ambiguity[k])) {
        if (!(c->alpha > 0.0 && c->alpha <= 1.0))
          errs.push_back(tag + " cvar alpha outside (0,1]");
        if (!(c->beta >= 0.0 && c->beta <= 1.0))
          errs.push_back(tag + " cvar beta outside [0,1]");
      } else if (std::holds_alternative<RobustSet>(inst.ambiguity[k])) {
        for (std::size_t i = 0; i < s.xi_dim; ++i) {
          if (!std::isfinite(s.xi_lower[i]) || !std::isfinite(s.xi_upper[i])) {
            errs.push_back(tag + " robust set needs a bounded support box");
            break;
          }
        }
      }
    }
  }
  return errs;
}

OracleKind oracle_kind(const Instance& inst, std::size_t stage_index) {
  if (stage_index == 0 || stage_index >= inst.horizon())
    throw std::out_of_range("oracle_kind is defined for noninitial stages");
  const AmbiguitySpec& amb = inst.ambiguity[stage_index - 1];
  if (!std::holds_alternative<WassersteinSet>(amb)) return OracleKind::ScenarioBased;
  switch (uncertainty_shape(inst.stages[stage_index])) {
    case UncertaintyShape::Objective:
      return OracleKind::WassersteinObjective;
    case UncertaintyShape::RightHandSide:
    case UncertaintyShape::None:
      return OracleKind::WassersteinRhs;
    case UncertaintyShape::Mixed:
      break;
  }
  throw std::invalid_argument("stage mixes objective and rhs uncertainty");
}

namespace {

// Finds, per row with incoming-state coefficients, a relaxation column: an
// internal variable appearing only in that row, unbounded in the relaxing
// direction, with certain nonnegative cost.  The ratio cost/|coef| bounds the
// row's dual multiplier, which in turn bounds the value gradient.
double derive_penalty(const StageModel& s) {
  const std::size_t m = s.num_rows();
  if (s.E.v.empty() || s.E.is_zero()) return 1.0;
  std::vector<int> count(s.internal_dim, 0);
  std::vector<int> only_row(s.internal_dim, -1);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < s.internal_dim; ++j) {
      if (s.F(i, j) != 0.0) {
        ++count[j];
        only_row[j] = int(i);
      }
    }
  }
  std::vector<double> dual_bound(m, 0.0);
  std::vector<bool> have(m, false);
  for (std::size_t j = 0; j < s.internal_dim; ++j) {
    if (count[j] != 1) continue;
    bool uncertain_cost = false;
    for (std::size_t c = 0; c < s.A.cols && !uncertain_cost; ++c)
      uncertain_cost = s.A(j, c) != 0.0;
    if (uncertain_cost || s.a[j] < 0.0) continue;
    const int i = only_row[j];
    const double f = s.F(std::size_t(i), j);
    const bool relaxes = (f < 0.0 && std::isinf(s.internal_upper[j])) ||
                         (f > 0.0 && std::isinf(s.internal_lower[j]));
    if (!relaxes) continue;
    const double b = s.a[j] / std::fabs(f);
    if (!have[i] || b < dual_bound[i]) {
      have[i] = true;
      dual_bound[i] = b;
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    bool uses_state = false;
    for (std::size_t c = 0; c < s.prev_dim && !uses_state; ++c)
      uses_state = s.E(i, c) != 0.0;
    if (uses_state && !have[i])
      throw UnboundedLipschitzError(
          "no finite penalty bound derivable; supply regularization explicitly");
  }
  double best = 0.0;
  for (std::size_t c = 0; c < s.prev_dim; ++c) {
    double col = 0.0;
    for (std::size_t i = 0; i < m; ++i) col += std::fabs(s.E(i, c)) * dual_bound[i];
    best = std::max(best, col);
  }
  return std::max(best, 1e-12);
}

}  // namespace

std::vector<double> recommended_regularization(const Instance& inst) {
  std::vector<double> out;
  for (std::size_t t = 1; t < inst.horizon(); ++t) {
    const std::size_t k = t - 1;
    if (k < inst.regularization.size() && inst.regularization[k] > 0.0 &&
        std::isfinite(inst.regularization[k])) {
      out.push_back(inst.regularization[k]);
    } else {
      out.push_back(derive_penalty(inst.stages[t]));
    }
  }
  return out;
}

namespace {

json bound_to_json(double v) {
  if (std::isinf(v)) return nullptr;
  return v;
}

double bound_from_json(const json& j, double inf_value) {
  if (j.is_null()) return inf_value;
  return j.get<double>();
}

json vec_to_json(const std::vector<double>& v) { return json(v); }

json bounds_to_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(bound_to_json(x));
  return a;
}

std::vector<double> bounds_from_json(const json& j, double inf_value) {
  std::vector<double> v;
  for (const auto& e : j) v.push_back(bound_from_json(e, inf_value));
  return v;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows; ++i) {
    json r = json::array();
    for (std::size_t j = 0; j < m.cols; ++j) r.push_back(m(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, std::size_t cols_hint) {
  Matrix m;
  m.rows = j.size();
  m.cols = m.rows ? j[0].size() : cols_hint;
  m.v.reserve(m.rows * m.cols);
  for (const auto& row : j) {
    if (row.size() != m.cols) throw std::invalid_argument("ragged matrix rows");
    for (const auto& e : row) m.v.push_back(e.get<double>());
  }
  return m;
}

json stage_to_json(const StageModel& s) {
  json j;
  j["prev_dim"] = s.prev_dim;
  j["state_dim"] = s.state_dim;
  j["internal_dim"] = s.internal_dim;
  j["xi_dim"] = s.xi_dim;
  j["A"] = matrix_to_json(s.A);
  j["a"] = vec_to_json(s.a);
  j["E"] = matrix_to_json(s.E);
  j["F"] = matrix_to_json(s.F);
  j["G"] = matrix_to_json(s.G);
  j["h"] = vec_to_json(s.h);
  j["H"] = matrix_to_json(s.H);
  j["internal_lower"] = bounds_to_json(s.internal_lower);
  j["internal_upper"] = bounds_to_json(s.internal_upper);
  j["state_lower"] = bounds_to_json(s.state_lower);
  j["state_upper"] = bounds_to_json(s.state_upper);
  j["xi_lower"] = bounds_to_json(s.xi_lower);
  j["xi_upper"] = bounds_to_json(s.xi_upper);
  return j;
}

StageModel stage_from_json(const json& j) {
  StageModel s;
  s.prev_dim = j.at("prev_dim").get<std::size_t>();
  s.state_dim = j.at("state_dim").get<std::size_t>();
  s.internal_dim = j.at("internal_dim").get<std::size_t>();
  s.xi_dim = j.at("xi_dim").get<std::size_t>();
  s.A = matrix_from_json(j.at("A"), s.xi_dim);
  s.a = j.at("a").get<std::vector<double>>();
  s.E = matrix_from_json(j.at("E"), s.prev_dim);
  s.F = matrix_from_json(j.at("F"), s.internal_dim);
  s.G = matrix_from_json(j.at("G"), s.state_dim);
  s.h = j.at("h").get<std::vector<double>>();
  s.H = matrix_from_json(j.at("H"), s.xi_dim);
  s.internal_lower = bounds_from_json(j.at("internal_lower"), -kInf);
  s.internal_upper = bounds_from_json(j.at("internal_upper"), kInf);
  s.state_lower = bounds_from_json(j.at("state_lower"), -kInf);
  s.state_upper = bounds_from_json(j.at("state_upper"), kInf);
  s.xi_lower = bounds_from_json(j.at("xi_lower"), -kInf);
  s.xi_upper = bounds_from_json(j.at("xi_upper"), kInf);
  return s;
}

json ambiguity_to_json(const AmbiguitySpec& amb) {
  json j;
  if (std::holds_alternative<NominalSet>(amb)) {
    j["type"] = "nominal";
  } else if (const auto* w = std::get_if<WassersteinSet>(&amb)) {
    j["type"] = "wasserstein";
    j["radius"] = w->radius;
    json ms = json::array();
    for (const auto& mc : w->moments) {
      ms.push_back({{"coef", mc.coef}, {"offset", mc.offset}, {"bound", mc.bound}});
    }
    j["moments"] = std::move(ms);
  } else if (const auto* c = std::get_if<CvarSet>(&amb)) {
    j["type"] = "cvar";
    j["alpha"] = c->alpha;
    j["beta"] = c->beta;
  } else {
    j["type"] = "robust";
  }
  return j;
}

AmbiguitySpec ambiguity_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "nominal") return NominalSet{};
  if (type == "robust") return RobustSet{};
  if (type == "cvar") {
    CvarSet c;
    c.alpha = j.at("alpha").get<double>();
    c.beta = j.at("beta").get<double>();
    return c;
  }
  if (type == "wasserstein") {
    WassersteinSet w;
    w.radius = j.at("radius").get<double>();
    if (j.contains("moments")) {
      for (const auto& m : j.at("moments")) {
        MomentConstraint mc;
        mc.coef = m.at("coef").get<std::vector<double>>();
        mc.offset = m.value("offset", 0.0);
        mc.bound = m.at("bound").get<double>();
        w.moments.push_back(std::move(mc));
      }
    }
    return w;
  }
  throw std::invalid_argument("unknown ambiguity type: " + type);
}

}  // namespace

std::string instance_to_json(const Instance& inst, int indent) {
  json j;
  json stages = json::array();
  for (const auto& s : inst.stages) stages.push_back(stage_to_json(s));
  j["stages"] = std::move(stages);
  j["x0"] = inst.x0;
  j["xi1"] = inst.xi1;
  json amb = json::array();
  for (const auto& a : inst.ambiguity) amb.push_back(ambiguity_to_json(a));
  j["ambiguity"] = std::move(amb);
  j["data"] = inst.data;
  j["regularization"] = inst.regularization;
  if (!inst.growth_rate.empty()) j["growth_rate"] = inst.growth_rate;
  if (!inst.lipschitz_xi.empty()) j["lipschitz_xi"] = inst.lipschitz_xi;
  return j.dump(indent);
}

Instance instance_from_json(const std::string& text) {
  const json j = json::parse(text);
  Instance inst;
  for (const auto& s : j.at("stages")) inst.stages.push_back(stage_from_json(s));
  inst.x0 = j.at("x0").get<std::vector<double>>();
  inst.xi1 = j.at("xi1").get<std::vector<double>>();
  for (const auto& a : j.at("ambiguity")) inst.ambiguity.push_back(ambiguity_from_json(a));
  inst.data = j.at("data").get<std::vector<std::vector<std::vector<double>>>>();
  inst.regularization = j.at("regularization").get<std::vector<double>>();
  if (j.contains("growth_rate"))
    inst.growth_rate = j.at("growth_rate").get<std::vector<double>>();
  if (j.contains("lipschitz_xi"))
    inst.lipschitz_xi = j.at("lipschitz_xi").get<std::vector<double>>();
  return inst;
}

void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << instance_to_json(inst, 1);
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return instance_from_json(ss.str());
}

}  // namespace wdro
