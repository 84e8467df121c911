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

#include "wdro/approx.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "wdro/lp.hpp"
#include "wdro/simd_kernels.hpp"

namespace wdro {

using nlohmann::json;

double Cut::eval(const std::vector<double>& x) const {
  double v = value + simd::dot(gradient.data(), x.data(), gradient.size());
  v -= simd::dot(gradient.data(), anchor.data(), gradient.size());
  return v;
}

double LowerApprox::eval(const std::vector<double>& x) const {
  // The pool starts as the zero function and each added cut only joins the
  // max, so zero stays a member forever.
  double best = 0.0;
  for (const Cut& c : cuts_) best = std::max(best, c.eval(x));
  return best;
}

void LowerApprox::add(Cut c) {
  if (!cuts_.empty() && c.gradient.size() != cuts_.front().gradient.size())
    throw std::invalid_argument("cut dimension mismatch");
  if (max_gradient_ > 0.0) {
    for (double g : c.gradient) {
      if (std::fabs(g) > max_gradient_ + 1e-9)
        throw CutRejected("cut gradient exceeds the slope bound " +
                          std::to_string(max_gradient_));
    }
  }
  cuts_.push_back(std::move(c));
}

void UpperApprox::add(std::vector<double> point, double value) {
  if (!points_.empty() && point.size() != points_.front().size())
    throw std::invalid_argument("point dimension mismatch");
  points_.push_back(std::move(point));
  values_.push_back(value);
}

double UpperApprox::eval(const std::vector<double>& x) const {
  if (points_.empty()) return std::numeric_limits<double>::infinity();
  const std::size_t k = points_.size();
  const std::size_t d = x.size();
  lp::LinearProgram prog;
  for (std::size_t i = 0; i < k; ++i) prog.add_var(0.0, lp::kInf, values_[i]);
  for (std::size_t j = 0; j < d; ++j) prog.add_var(0.0, lp::kInf, lipschitz_);
  for (std::size_t j = 0; j < d; ++j) prog.add_var(0.0, lp::kInf, lipschitz_);
  {
    std::vector<std::pair<int, double>> terms;
    for (std::size_t i = 0; i < k; ++i) terms.push_back({int(i), 1.0});
    prog.add_row(lp::RowSense::Equal, std::move(terms), 1.0);
  }
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<std::pair<int, double>> terms;
    for (std::size_t i = 0; i < k; ++i) {
      const double c = points_[i][j];
      if (c != 0.0) terms.push_back({int(i), c});
    }
    terms.push_back({int(k + j), 1.0});
    terms.push_back({int(k + d + j), -1.0});
    prog.add_row(lp::RowSense::Equal, std::move(terms), x[j]);
  }
  const lp::Solution sol = lp::solve(prog);
  if (sol.status != lp::SolveStatus::Optimal)
    throw std::runtime_error("envelope evaluation failed: " +
                             std::string(lp::to_string(sol.status)));
  return sol.objective;
}

std::string lower_to_json(const LowerApprox& lo, int indent) {
  json cuts = json::array();
  for (const Cut& c : lo.cuts()) {
    cuts.push_back(
        {{"value", c.value}, {"gradient", c.gradient}, {"anchor", c.anchor}});
  }
  json j;
  j["max_gradient"] = lo.max_gradient();
  j["cuts"] = std::move(cuts);
  return j.dump(indent);
}

LowerApprox lower_from_json(const std::string& text) {
  const json j = json::parse(text);
  LowerApprox lo(j.value("max_gradient", 0.0));
  for (const auto& c : j.at("cuts")) {
    Cut cut;
    cut.value = c.at("value").get<double>();
    cut.gradient = c.at("gradient").get<std::vector<double>>();
    cut.anchor = c.at("anchor").get<std::vector<double>>();
    lo.add(std::move(cut));
  }
  return lo;
}

std::string upper_to_json(const UpperApprox& up, int indent) {
  json j;
  j["lipschitz"] = up.lipschitz();
  j["points"] = up.points();
  j["values"] = up.values();
  return j.dump(indent);
}

UpperApprox upper_from_json(const std::string& text) {
  const json j = json::parse(text);
  UpperApprox up(j.at("lipschitz").get<double>());
  const auto pts = j.at("points").get<std::vector<std::vector<double>>>();
  const auto vals = j.at("values").get<std::vector<double>>();
  if (pts.size() != vals.size())
    throw std::invalid_argument("point/value count mismatch");
  for (std::size_t i = 0; i < pts.size(); ++i) up.add(pts[i], vals[i]);
  return up;
}

}  // namespace wdro
