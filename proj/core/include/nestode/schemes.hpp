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

#ifndef NESTODE_SCHEMES_HPP
#define NESTODE_SCHEMES_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nestode/objectives.hpp"

namespace nestode {

enum class RestartKind { kNone, kSpeed, kGradient };

struct SchemeParams {
  double s = 0.0;       // step size, typically 1/L
  double r = 3.0;       // momentum parameter; coefficient (k-1)/(k+r-1)
  long k_max = 0;       // iteration budget; the only stopping rule
  long k_min = 1;       // minimum spacing between restarts
  RestartKind restart = RestartKind::kNone;
  // s > 1/L is rejected at setup unless this is set (used to reproduce the
  // instability demonstration).
  bool allow_large_step = false;
};

/// Raised when an iterate or objective value stops being finite. Carries
/// the iteration index (schemes) or time (integrator) where it happened.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, double where)
      : std::runtime_error(what), where_(where) {}
  double where() const { return where_; }

 private:
  double where_;
};

/// Discrete run record. x[k] is kept for every iteration so that y_k and
/// the momentum state can be reconstructed exactly by analysis code.
struct IterateTrace {
  std::vector<Eigen::VectorXd> x;
  std::vector<double> f_gap;      // f(x_k) - f_star
  std::vector<double> step_norm;  // ||x_k - x_{k-1}||, 0 at k = 0
  std::vector<bool> restarted;

  std::string scheme;
  SchemeParams params;
  std::uint64_t seed = 0;
  double f_star = 0.0;
  double wall_seconds = 0.0;

  long Size() const { return static_cast<long>(x.size()); }
};

/// Momentum scheme x_k = y_{k-1} - s G_s(y_{k-1}),
/// y_k = x_k + ((k-1)/(k+r-1))(x_k - x_{k-1}), y_0 = x_0.
IterateTrace NesterovRun(const CompositeObjective& obj,
                         const Eigen::VectorXd& x0, const SchemeParams& params,
                         double f_star);

/// Proximal gradient descent x_{k+1} = x_k - s G_s(x_k).
IterateTrace GradientDescentRun(const CompositeObjective& obj,
                                const Eigen::VectorXd& x0, double s,
                                long k_max, double f_star,
                                bool allow_large_step = false);

/// Momentum scheme with a step-norm restart: the momentum counter j resets
/// to 1 when ||x_k - x_{k-1}|| < ||x_{k-1} - x_{k-2}|| and j >= k_min.
IterateTrace SpeedRestartRun(const CompositeObjective& obj,
                             const Eigen::VectorXd& x0,
                             const SchemeParams& params, double f_star);

/// Same loop, but the reset fires when f(x_k) > f(x_{k-1}).
IterateTrace GradientRestartRun(const CompositeObjective& obj,
                                const Eigen::VectorXd& x0,
                                const SchemeParams& params, double f_star);

/// Dispatch on params.restart.
IterateTrace RunScheme(const CompositeObjective& obj, const Eigen::VectorXd& x0,
                       const SchemeParams& params, double f_star);

/// Writes `k,f_gap,step_norm,restarted` rows with round-trip decimals.
void WriteTraceCsv(const IterateTrace& trace, std::ostream& out);

}  // namespace nestode

#endif  // NESTODE_SCHEMES_HPP
