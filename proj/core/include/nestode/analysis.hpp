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

#ifndef NESTODE_ANALYSIS_HPP
#define NESTODE_ANALYSIS_HPP

#include <Eigen/Dense>
#include <vector>

#include "nestode/ode.hpp"
#include "nestode/schemes.hpp"

namespace nestode {

enum class EnergyVariant {
  kContinuousR3,    // t^2 f_gap + 2 ||X + t V/2 - x*||^2
  kContinuousR,     // 2t^2/(r-1) f_gap + (r-1) ||X + t V/(r-1) - x*||^2
  kContinuousAlpha, // t^a f_gap + (2r-a)^2 t^(a-2)/8 ||X + 2tV/(2r-a) - x*||^2
  kDiscreteR,       // 2(k+r-2)^2 s/(r-1) f_gap + (r-1) ||z_k - x*||^2
  kDiscreteT3,      // s(2k+3r-5)(2k+2r-5)(4k+4r-9)/16 f_gap + ...
};

struct EnergySeries {
  std::vector<double> grid;    // times t or indices k
  std::vector<double> values;
  EnergyVariant variant;
  // Set when the variant's decay guarantee needs r > 3 but the trace was
  // produced with r <= 3; the values are still computed.
  bool warning = false;
};

struct EnergyParams {
  double r = 3.0;
  double alpha = 2.0;  // kContinuousAlpha only, 2 <= alpha <= 2r/3
  double mu = 0.0;     // kContinuousAlpha requires mu > 0
};

EnergySeries EnergyContinuous(const ContinuousTrace& trace,
                              const Eigen::VectorXd& x_star,
                              EnergyVariant variant,
                              const EnergyParams& params);

/// Discrete functionals. y_k is reconstructed from the stored x_k by
/// replaying the momentum recursion (including restart flags), so the
/// series is exact with respect to the run.
EnergySeries EnergyDiscrete(const IterateTrace& trace,
                            const Eigen::VectorXd& x_star,
                            EnergyVariant variant);

/// t^power * f_gap for continuous traces.
std::vector<double> ScaledError(const ContinuousTrace& trace, double power);

/// s^(power/2) * k^power * f_gap, so power = 2 gives s k^2 f_gap and
/// power = 3 the cubic normalization s^(3/2) k^3 f_gap.
std::vector<double> ScaledError(const IterateTrace& trace, double power);

/// Sign-change times of X_coord(t) - x_star_coord by linear interpolation.
/// Samples with |X - x*| below 1e-13 |x0 - x*| are treated as exact zeros
/// and never produce roots on their own.
std::vector<double> OscillationRoots(const ContinuousTrace& trace,
                                     Eigen::Index coordinate,
                                     double x_star_coord);

/// max over samples 0 < t <= t_end of ||V(t)|| / t.
double VelocityRatioMax(const ContinuousTrace& trace, double t_end);

/// max over 0 <= k < itrace size of ||x_k - X(k sqrt(s))||, X interpolated
/// linearly between samples. Throws if the continuous horizon is short.
double SchemeOdeDeviation(const IterateTrace& itrace,
                          const ContinuousTrace& ctrace, double s);

struct RateFit {
  double slope = 0.0;
  double r_squared = 0.0;
};

/// Least-squares fit of log(f_gap) against k over [k_lo, k_hi]. Throws on
/// nonpositive gaps in the window.
RateFit LinearRateFit(const IterateTrace& trace, long k_lo, long k_hi);

/// Times of local maxima of v that dominate every other local maximum
/// within +-half_window in t. Used to measure bump spacing of f(X(t)).
std::vector<double> MajorPeakTimes(const std::vector<double>& t,
                                   const std::vector<double>& v,
                                   double half_window);

}  // namespace nestode

#endif  // NESTODE_ANALYSIS_HPP
