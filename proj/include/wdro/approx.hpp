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

#include <stdexcept>
#include <string>
#include <vector>

namespace wdro {

// Affine minorant v + u'(x - anchor) with bounded gradient.
struct Cut {
  double value = 0.0;
  std::vector<double> gradient;
  std::vector<double> anchor;

  double eval(const std::vector<double>& x) const;
};

// A cut whose gradient exceeds the pool's slope bound signals a bug in the
// producing oracle, never a recoverable condition.
struct CutRejected : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Pointwise maximum of the zero function and the recorded cuts.  Starting
// from zero keeps refinement monotone: adding a cut never lowers eval.
class LowerApprox {
 public:
  LowerApprox() = default;
  explicit LowerApprox(double max_gradient) : max_gradient_(max_gradient) {}

  double eval(const std::vector<double>& x) const;
  void add(Cut c);
  const std::vector<Cut>& cuts() const { return cuts_; }
  bool empty() const { return cuts_.empty(); }
  double max_gradient() const { return max_gradient_; }

 private:
  double max_gradient_ = 0.0;  // nonpositive means unbounded
  std::vector<Cut> cuts_;
};

// Lower convex envelope of recorded points inflated by a norm cone:
//   eval(x) = min over convex weights mu of sum mu_k v_k + lip * |x - sum mu_k x_k|_1,
// +infinity while empty.  The result is convex and lip-Lipschitz.
class UpperApprox {
 public:
  UpperApprox() = default;
  explicit UpperApprox(double lipschitz) : lipschitz_(lipschitz) {}

  double eval(const std::vector<double>& x) const;
  void add(std::vector<double> point, double value);
  double lipschitz() const { return lipschitz_; }
  void set_lipschitz(double lip) { lipschitz_ = lip; }
  const std::vector<std::vector<double>>& points() const { return points_; }
  const std::vector<double>& values() const { return values_; }
  bool empty() const { return points_.empty(); }

 private:
  double lipschitz_ = 0.0;
  std::vector<std::vector<double>> points_;
  std::vector<double> values_;
};

std::string lower_to_json(const LowerApprox& lo, int indent = -1);
LowerApprox lower_from_json(const std::string& text);
std::string upper_to_json(const UpperApprox& up, int indent = -1);
UpperApprox upper_from_json(const std::string& text);

}  // namespace wdro
