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

#ifndef NESTODE_OBJECTIVES_HPP
#define NESTODE_OBJECTIVES_HPP

#include <Eigen/Dense>
#include <functional>
#include <string>

#include "nestode/prox.hpp"

namespace nestode {

/// A smooth convex function with first-order oracle access. `lipschitz` is
/// an upper bound on the gradient Lipschitz constant L; `strong_convexity`
/// is a lower bound mu (0 when the function is merely convex).
struct SmoothObjective {
  Eigen::Index n = 0;
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  double lipschitz = 0.0;
  double strong_convexity = 0.0;

  double Eval(const Eigen::VectorXd& x) const;
  Eigen::VectorXd Grad(const Eigen::VectorXd& x) const;
};

/// Composite objective f = g + h with g smooth and h given by its prox map.
struct CompositeObjective {
  SmoothObjective g;
  ProxSpec h;

  Eigen::Index n() const { return g.n; }
  /// g(x) + h(x); +infinity outside the domain of an indicator h.
  double Eval(const Eigen::VectorXd& x) const;
};

/// Diagonal quadratic f(x) = <x, diag(lambda) x> / 2 with minimum 0 at the
/// origin. Kept as an explicit spec because the trajectory of the continuous
/// dynamics has a closed form per coordinate (see ode.hpp).
struct QuadraticSpec {
  Eigen::VectorXd eigenvalues;

  double L() const { return eigenvalues.maxCoeff(); }
  double mu() const { return eigenvalues.minCoeff(); }
  SmoothObjective ToObjective() const;
};

/// Largest eigenvalue of A^T A by power iteration (at most `max_iters`
/// matvec pairs, stops early once the relative Rayleigh-quotient change
/// drops below `tol`).
double LargestSquaredSingularValue(const Eigen::MatrixXd& a,
                                   int max_iters = 200, double tol = 1e-12);

// Catalog constructors. Each returns a SmoothObjective with its Lipschitz
// bound filled in.

SmoothObjective MakeQuadratic(const Eigen::VectorXd& eigenvalues);

/// f(x) = rho * log sum_i exp((<a_i, x> - b_i) / rho); L = ||A||^2 / rho.
SmoothObjective MakeLogSumExp(const Eigen::MatrixXd& a,
                              const Eigen::VectorXd& b, double rho);

/// f(x) = coeff * ||A x - b||^2; L = 2 * coeff * ||A||^2.
SmoothObjective MakeLeastSquares(const Eigen::MatrixXd& a,
                                 const Eigen::VectorXd& b, double coeff);

/// Logistic loss f(x) = sum_i log(1 + exp(<a_i, x>)) - y_i <a_i, x> with
/// labels y in {0, 1}; L = ||A||^2 / 4.
SmoothObjective MakeLogistic(const Eigen::MatrixXd& a,
                             const Eigen::VectorXd& y);

}  // namespace nestode

#endif  // NESTODE_OBJECTIVES_HPP
