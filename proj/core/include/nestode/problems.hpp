// Copyright 2026 The Nestode Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NESTODE_PROBLEMS_HPP
#define NESTODE_PROBLEMS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "nestode/objectives.hpp"

namespace nestode {

enum class Scale { kDesk, kPaper };

Scale ParseScale(const std::string& text);  // "desk" or "paper"
std::string ScaleName(Scale scale);

/// A generated benchmark problem. Reference data (f_star, x_star) is empty
/// until EnsureReference() fills it.
struct ProblemInstance {
  std::string name;
  Scale scale = Scale::kDesk;
  std::uint64_t seed = 42;

  CompositeObjective objective;
  Eigen::VectorXd x0;

  // Reference optimum. f_star_exact marks the analytic (quadratic) case;
  // low_confidence marks a reference solve that hit its budget before the
  // gradient-mapping tolerance.
  bool has_reference = false;
  double f_star = 0.0;
  Eigen::VectorXd x_star;
  bool f_star_exact = false;
  bool low_confidence = false;

  // Design data kept when the smooth part is a least-squares fit; used by
  // the composite-dynamics integrator. Empty otherwise.
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
};

/// Names accepted by Generate, in catalog order.
const std::vector<std::string>& ProblemNames();

/// Deterministic instance for (name, scale, seed): identical calls produce
/// bitwise-identical data. Unknown names throw std::invalid_argument.
/// Desk scale divides the published linear dimensions by roughly 10.
ProblemInstance Generate(const std::string& name, Scale scale,
                         std::uint64_t seed);

/// Fills f_star / x_star. Quadratics get the analytic optimum; everything
/// else runs the step-norm-restarted proximal scheme with s = 1/L until
/// ||G_s|| <= 1e-13 or the budget runs out (then low_confidence is set).
/// When cache_dir is nonempty, results are read from / written to one text
/// record per (name, scale, seed).
void EnsureReference(ProblemInstance& instance,
                     const std::string& cache_dir = "",
                     long budget = 1000000);

/// Inverse standard normal CDF, accurate to ~1e-13 over (1e-10, 1 - 1e-10).
/// Used for the sorted-l1 weight sequence 1.1 * InverseNormalCdf(1 - q).
double InverseNormalCdf(double p);

}  // namespace nestode

#endif  // NESTODE_PROBLEMS_HPP
