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

#ifndef NESTODE_PROX_HPP
#define NESTODE_PROX_HPP

#include <Eigen/Dense>

namespace nestode {

struct CompositeObjective;

/// The nonsmooth part h of a composite objective g + h, as a tagged variant.
/// Every variant has an exact proximal map; see Prox().
struct ProxSpec {
  enum class Kind {
    kZero,      // h = 0
    kL1,        // h = lambda * ||x||_1
    kNonneg,    // h = indicator of x >= 0
    kL1Ball,    // h = indicator of ||x||_1 <= delta
    kNuclear,   // h = lambda * nuclear norm of mat(x) (row-major rows x cols)
    kSortedL1,  // h = sum_i weights[i] * |x|_(i), |x|_(1) >= ... >= |x|_(p)
  };

  Kind kind = Kind::kZero;
  double lambda = 0.0;            // kL1, kNuclear
  double delta = 0.0;             // kL1Ball
  Eigen::Index rows = 0, cols = 0;  // kNuclear
  Eigen::VectorXd weights;        // kSortedL1, nonincreasing, nonnegative

  static ProxSpec Zero();
  static ProxSpec L1(double lambda);
  static ProxSpec Nonneg();
  static ProxSpec L1Ball(double delta);
  static ProxSpec Nuclear(double lambda, Eigen::Index rows, Eigen::Index cols);
  static ProxSpec SortedL1(Eigen::VectorXd weights);
};

/// h(x); +infinity outside the domain of an indicator variant.
double ProxValue(const ProxSpec& h, const Eigen::VectorXd& x);

/// argmin_z ||z - v||^2 / (2s) + h(z). Exact for every variant; s must be
/// positive (indicator variants ignore it). Throws std::invalid_argument on
/// s <= 0 or a nuclear spec whose rows*cols does not match v.
Eigen::VectorXd Prox(const ProxSpec& h, const Eigen::VectorXd& v, double s);

/// Proximal subgradient G_s(y) = (y - Prox(h, y - s grad g(y), s)) / s.
/// Collapses to grad g(y) when h = 0.
Eigen::VectorXd ProximalSubgradient(const CompositeObjective& obj,
                                    const Eigen::VectorXd& y, double s);

/// Directional subgradient of the lasso objective
/// f(x) = ||A x - y||^2 / 2 + lambda ||x||_1 along direction p:
///   G(x,p)_i = (A^T(Ax - y))_i + lambda * sgn(x_i)        if x_i != 0,
///              (A^T(Ax - y))_i + lambda * sgn(p_i)        if x_i = 0, p_i != 0,
///              sgn(c_i) * max(|c_i| - lambda, 0)          if x_i = p_i = 0,
/// where c = A^T(Ax - y). The last branch picks the minimal-norm element
/// of the subdifferential to encourage sparsity.
Eigen::VectorXd LassoDirectionalSubgradient(const Eigen::MatrixXd& a,
                                            const Eigen::VectorXd& y,
                                            double lambda,
                                            const Eigen::VectorXd& x,
                                            const Eigen::VectorXd& p);

}  // namespace nestode

#endif  // NESTODE_PROX_HPP
