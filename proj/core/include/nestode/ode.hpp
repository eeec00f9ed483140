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

#ifndef NESTODE_ODE_HPP
#define NESTODE_ODE_HPP

#include <Eigen/Dense>
#include <ostream>
#include <vector>

#include "nestode/objectives.hpp"

namespace nestode {

/// Parameters of the damped dynamics X'' + (r / max{delta, t}) X' + grad = 0
/// integrated by explicit Euler: X <- X + dt Z, Z <- (1 - r dt / max{delta,
/// t}) Z - dt grad f(X). delta defaults to dt so only the first step sees
/// the smoothing.
struct OdeParams {
  double r = 3.0;
  double dt = 0.0;
  double horizon = 0.0;  // T
  double delta = 0.0;    // 0 means "use dt"
  bool restart = false;  // reset the damping clock on velocity decay
};

struct ContinuousTrace {
  std::vector<double> t;
  std::vector<Eigen::VectorXd> x;
  std::vector<Eigen::VectorXd> v;
  std::vector<double> f_gap;
  std::vector<bool> restarted;       // per-sample flag
  std::vector<double> restart_times; // times where the damping clock reset
  OdeParams params;
  double f_star = 0.0;

  long Size() const { return static_cast<long>(t.size()); }
};

/// Euler integration of the smoothed dynamics for a smooth objective.
/// Produces floor(T/dt)+1 samples; throws DivergenceError (see schemes.hpp)
/// with the offending time when the state stops being finite.
ContinuousTrace Integrate(const SmoothObjective& obj, const Eigen::VectorXd& x0,
                          const OdeParams& params, double f_star = 0.0);

/// Same integration with the gradient replaced by the lasso directional
/// subgradient G(X, Z) for f(x) = ||Ax - y||^2 / 2 + lambda ||x||_1.
ContinuousTrace IntegrateCompositeLasso(const Eigen::MatrixXd& a,
                                        const Eigen::VectorXd& y,
                                        double lambda,
                                        const Eigen::VectorXd& x0,
                                        const OdeParams& params,
                                        double f_star = 0.0);

/// J_1(u) for u >= 0, absolute error <= 1e-10 up to u = 1e4.
double BesselJ1(double u);

/// J_nu(u) for nu >= 0, u >= 0; 1e-8 absolute for u <= 100, nu <= 5.
double BesselJNu(double nu, double u);

/// Trajectory of the damped dynamics for f = <x, diag(lambda) x>/2 started
/// at rest: X_i(t) = 2^((r-1)/2) Gamma((r+1)/2) J_{(r-1)/2}(t sqrt(l_i))
/// / (t sqrt(l_i))^((r-1)/2) * x0_i, with the t -> 0 limit x0 taken
/// analytically. For r != 3 all eigenvalues must be equal.
Eigen::VectorXd QuadraticClosedForm(const QuadraticSpec& spec,
                                    const Eigen::VectorXd& x0, double t,
                                    double r = 3.0);

/// Writes `t,f_gap,speed,restarted` rows; with with_coordinates set and
/// dimension <= 4, appends columns x0..x{n-1}.
void WriteTraceCsv(const ContinuousTrace& trace, std::ostream& out,
                   bool with_coordinates = false);

}  // namespace nestode

#endif  // NESTODE_ODE_HPP
