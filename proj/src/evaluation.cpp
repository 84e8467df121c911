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

#include "wdro/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <variant>

#include "nlohmann/json.hpp"
#include "wdro/parallel.hpp"
#include "wdro/rng.hpp"
#include "wdro/stage_lp.hpp"

namespace wdro {
namespace {

struct PathResult {
  bool ok = false;
  double total = 0.0;
  std::vector<double> costs;
  std::vector<std::vector<double>> states;
};

std::string format(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string svg_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

// Shared plot frame: fixed canvas, padded data ranges, boxed axes.
struct Frame {
  static constexpr double width = 640.0, height = 420.0;
  static constexpr double left = 70.0, right = 620.0, top = 30.0, bottom = 370.0;
  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;

  void pad() {
    if (x_max <= x_min) {
      x_min -= 0.5;
      x_max += 0.5;
    }
    if (y_max <= y_min) {
      y_min -= 0.5;
      y_max += 0.5;
    } else {
      const double m = 0.05 * (y_max - y_min);
      y_min -= m;
      y_max += m;
    }
  }
  double x(double v) const {
    return left + (v - x_min) / (x_max - x_min) * (right - left);
  }
  double y(double v) const {
    return bottom - (v - y_min) / (y_max - y_min) * (bottom - top);
  }
};

void open_svg(std::ofstream& out) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << Frame::width
      << "\" height=\"" << Frame::height << "\" font-family=\"sans-serif\" "
      << "font-size=\"12\">\n";
}

void draw_axes(std::ofstream& out, const Frame& f, const std::string& x_label,
               const std::string& y_label) {
  out << "<rect x=\"" << f.left << "\" y=\"" << f.top << "\" width=\""
      << f.right - f.left << "\" height=\"" << f.bottom - f.top
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<text x=\"" << (f.left + f.right) / 2 << "\" y=\"" << f.bottom + 38
      << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
  out << "<text x=\"16\" y=\"" << (f.top + f.bottom) / 2
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << (f.top + f.bottom) / 2 << ")\">" << y_label << "</text>\n";
  for (int k = 0; k <= 4; ++k) {
    const double v = f.y_min + (f.y_max - f.y_min) * k / 4.0;
    out << "<text x=\"" << f.left - 6 << "\" y=\"" << f.y(v) + 4
        << "\" text-anchor=\"end\">" << svg_num(v) << "</text>\n";
  }
}

constexpr const char* kPalette[7] = {"#4363d8", "#3cb44b", "#ffe119", "#f58231",
                                     "#e6194b", "#911eb4", "#469990"};
constexpr const char* kLevelNames[7] = {"1%",  "10%", "25%", "50%",
                                        "75%", "90%", "99%"};

}  // namespace

PolicyRun simulate_policy(const Instance& inst,
                          const std::vector<LowerApprox>& tails,
                          const PathSampler& sampler, std::size_t paths,
                          std::uint64_t seed, unsigned workers) {
  const std::size_t T = inst.horizon();
  if (T == 0) throw std::invalid_argument("simulate_policy: empty instance");
  if (tails.size() != T - 1)
    throw std::invalid_argument("simulate_policy: need one tail pool per "
                                "noninitial stage");
  if (!sampler) throw std::invalid_argument("simulate_policy: no sampler");

  static const LowerApprox kZeroTail;
  std::vector<PathResult> results(paths);
  parallel_for(paths, workers, [&](std::size_t k) {
    Rng rng = Rng::stream(seed, k);
    PathResult& res = results[k];
    res.costs.reserve(T);
    res.states.reserve(T);
    std::vector<double> x = inst.x0, xi;
    res.ok = true;
    for (std::size_t t = 0; t < T; ++t) {
      xi = sampler(t, xi, rng);
      const LowerApprox& tail = t + 1 < T ? tails[t] : kZeroTail;
      StageSolve sol;
      try {
        sol = solve_stage(inst.stages[t], tail, x, xi);
      } catch (const StageLpError&) {
        res.ok = false;
        break;
      }
      res.total += sol.stage_cost;
      res.costs.push_back(sol.stage_cost);
      res.states.push_back(sol.x);
      x = sol.x;
    }
  });

  PolicyRun run;
  run.requested = paths;
  run.seed = seed;
  for (std::size_t k = 0; k < paths; ++k) {
    PathResult& res = results[k];
    if (!res.ok) {
      ++run.aborted;
      continue;
    }
    run.path_index.push_back(k);
    run.totals.push_back(res.total);
    run.stage_costs.push_back(std::move(res.costs));
    run.states.push_back(std::move(res.states));
  }
  return run;
}

double quantile(const std::vector<double>& sorted, double level) {
  if (sorted.empty()) throw std::invalid_argument("quantile of an empty sample");
  if (!(level >= 0.0 && level <= 1.0))
    throw std::invalid_argument("quantile level outside [0, 1]");
  const double pos = level * double(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - double(lo);
  return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

EvalStats summarize(const PolicyRun& run) {
  if (run.totals.empty())
    throw std::invalid_argument("summarize: no completed paths");
  EvalStats stats;
  stats.paths = run.totals.size();
  stats.aborted = run.aborted;
  for (double v : run.totals) stats.mean += v;
  stats.mean /= double(stats.paths);
  if (stats.paths > 1) {
    double ss = 0.0;
    for (double v : run.totals) ss += (v - stats.mean) * (v - stats.mean);
    stats.stddev = std::sqrt(ss / double(stats.paths - 1));
  }
  std::vector<double> sorted = run.totals;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t q = 0; q < kQuantileLevels.size(); ++q)
    stats.quantiles[q] = quantile(sorted, kQuantileLevels[q]);
  return stats;
}

ConservatismReport conservatism_check(const Instance& dr_instance,
                                      const SolveReport& dr,
                                      const SolveReport& nominal,
                                      double epsilon) {
  const std::size_t T = dr_instance.horizon();
  if (dr_instance.lipschitz_xi.size() != T - 1)
    throw std::invalid_argument(
        "conservatism_check: per-stage uncertainty Lipschitz constants required");

  ConservatismReport rep;
  for (std::size_t t = 0; t + 1 < T; ++t) {
    double radius = 0.0;
    if (const auto* w = std::get_if<WassersteinSet>(&dr_instance.ambiguity[t]))
      radius = w->radius;
    else if (!std::holds_alternative<NominalSet>(dr_instance.ambiguity[t]))
      throw std::invalid_argument(
          "conservatism_check: bound applies to transport ambiguity only");
    rep.budget += dr_instance.lipschitz_xi[t] * radius;
  }
  rep.slack = 2.0 * epsilon;
  rep.difference = dr.upper_bound - nominal.lower_bound;
  rep.margin = rep.budget + rep.slack - rep.difference;
  rep.holds = rep.margin >= -1e-9;
  return rep;
}

void write_policy_csv(const PolicyRun& run, const std::string& path) {
  std::ofstream out = open_out(path);
  std::size_t dim = 0;
  for (const auto& states : run.states)
    for (const auto& x : states) dim = std::max(dim, x.size());
  out << "path,stage,cost";
  for (std::size_t i = 0; i < dim; ++i) out << ",x" << i;
  out << "\n";
  for (std::size_t p = 0; p < run.path_index.size(); ++p) {
    for (std::size_t t = 0; t < run.stage_costs[p].size(); ++t) {
      out << run.path_index[p] << "," << t + 1 << ","
          << format(run.stage_costs[p][t]);
      const std::vector<double>& x = run.states[p][t];
      for (std::size_t i = 0; i < dim; ++i) {
        out << ",";
        if (i < x.size()) out << format(x[i]);
      }
      out << "\n";
    }
  }
}

std::string stats_to_json(const EvalStats& stats, int indent) {
  nlohmann::json j;
  j["paths"] = stats.paths;
  j["aborted"] = stats.aborted;
  j["mean"] = stats.mean;
  j["stddev"] = stats.stddev;
  nlohmann::json q;
  for (std::size_t i = 0; i < kQuantileLevels.size(); ++i)
    q[kLevelNames[i]] = stats.quantiles[i];
  j["quantiles"] = std::move(q);
  return j.dump(indent);
}

void write_quantile_radius_svg(const std::string& path,
                               const std::vector<double>& radii,
                               const std::vector<EvalStats>& stats) {
  if (radii.size() != stats.size() || stats.empty())
    throw std::invalid_argument("quantile plot needs one stat block per radius");
  Frame f;
  f.x_min = 0.0;
  f.x_max = double(radii.size() - 1);
  f.y_min = std::numeric_limits<double>::infinity();
  f.y_max = -f.y_min;
  for (const EvalStats& s : stats)
    for (double v : s.quantiles) {
      f.y_min = std::min(f.y_min, v);
      f.y_max = std::max(f.y_max, v);
    }
  f.pad();

  std::ofstream out = open_out(path);
  open_svg(out);
  draw_axes(out, f, "radius", "evaluation cost");
  for (std::size_t i = 0; i < radii.size(); ++i)
    out << "<text x=\"" << f.x(double(i)) << "\" y=\"" << f.bottom + 16
        << "\" text-anchor=\"middle\">" << svg_num(radii[i]) << "</text>\n";
  for (std::size_t q = 0; q < kQuantileLevels.size(); ++q) {
    out << "<polyline fill=\"none\" stroke=\"" << kPalette[q]
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < stats.size(); ++i)
      out << (i ? " " : "") << svg_num(f.x(double(i))) << ","
          << svg_num(f.y(stats[i].quantiles[q]));
    out << "\"/>\n";
    out << "<text x=\"" << f.right + 4 << "\" y=\""
        << f.y(stats.back().quantiles[q]) + 4 << "\" fill=\"" << kPalette[q]
        << "\">" << kLevelNames[q] << "</text>\n";
  }
  out << "</svg>\n";
}

void write_mean_std_svg(const std::string& path,
                        const std::vector<std::string>& labels,
                        const std::vector<EvalStats>& stats) {
  if (labels.size() != stats.size() || stats.empty())
    throw std::invalid_argument("scatter plot needs one stat block per label");
  Frame f;
  f.x_min = f.y_min = std::numeric_limits<double>::infinity();
  f.x_max = f.y_max = -f.x_min;
  for (const EvalStats& s : stats) {
    f.x_min = std::min(f.x_min, s.stddev);
    f.x_max = std::max(f.x_max, s.stddev);
    f.y_min = std::min(f.y_min, s.mean);
    f.y_max = std::max(f.y_max, s.mean);
  }
  if (f.x_max <= f.x_min) {
    f.x_min -= 0.5;
    f.x_max += 0.5;
  } else {
    const double m = 0.05 * (f.x_max - f.x_min);
    f.x_min -= m;
    f.x_max += m;
  }
  f.pad();

  std::ofstream out = open_out(path);
  open_svg(out);
  draw_axes(out, f, "cost deviation", "mean cost");
  for (std::size_t i = 0; i < stats.size(); ++i) {
    const double cx = f.x(stats[i].stddev), cy = f.y(stats[i].mean);
    out << "<circle cx=\"" << svg_num(cx) << "\" cy=\"" << svg_num(cy)
        << "\" r=\"4\" fill=\"" << kPalette[i % 7] << "\"/>\n";
    out << "<text x=\"" << svg_num(cx + 6) << "\" y=\"" << svg_num(cy - 6)
        << "\">" << labels[i] << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace wdro
