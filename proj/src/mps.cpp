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

#include <cmath>
#include <cstdio>
#include <string>

#include "wdro/lp.hpp"

namespace wdro::lp {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string var_name(const LinearProgram& lp, std::size_t j) {
  if (j < lp.var_names.size() && !lp.var_names[j].empty()) return lp.var_names[j];
  return "X" + std::to_string(j);
}

std::string row_name(const LinearProgram& lp, std::size_t i) {
  if (i < lp.row_names.size() && !lp.row_names[i].empty()) return lp.row_names[i];
  return "R" + std::to_string(i);
}

}  // namespace

std::string to_mps(const LinearProgram& lp, const std::string& name) {
  std::string out;
  out += "NAME " + name + "\n";
  out += "ROWS\n N OBJ\n";
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    out += lp.sense[i] == RowSense::Equal ? " E " : " L ";
    out += row_name(lp, i) + "\n";
  }
  out += "COLUMNS\n";
  std::vector<std::vector<std::pair<int, double>>> by_col(lp.num_vars());
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    for (const auto& [col, v] : lp.rows[i]) {
      if (v != 0.0) by_col[col].push_back({int(i), v});
    }
  }
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    const std::string vn = var_name(lp, j);
    if (lp.cost[j] != 0.0) out += "    " + vn + " OBJ " + num(lp.cost[j]) + "\n";
    for (const auto& [i, v] : by_col[j])
      out += "    " + vn + " " + row_name(lp, std::size_t(i)) + " " + num(v) + "\n";
  }
  out += "RHS\n";
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    if (lp.rhs[i] != 0.0)
      out += "    RHS " + row_name(lp, i) + " " + num(lp.rhs[i]) + "\n";
  }
  out += "BOUNDS\n";
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    const std::string vn = var_name(lp, j);
    const double lb = lp.lower[j], ub = lp.upper[j];
    if (lb == ub) {
      out += " FX BND " + vn + " " + num(lb) + "\n";
      continue;
    }
    if (std::isinf(lb) && std::isinf(ub)) {
      out += " FR BND " + vn + "\n";
      continue;
    }
    if (std::isinf(lb))
      out += " MI BND " + vn + "\n";
    else if (lb != 0.0)
      out += " LO BND " + vn + " " + num(lb) + "\n";
    if (!std::isinf(ub)) out += " UP BND " + vn + " " + num(ub) + "\n";
  }
  out += "ENDATA\n";
  return out;
}

}  // namespace wdro::lp
