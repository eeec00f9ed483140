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

#include "nestode/objectives.hpp"

#include <cmath>
#include <stdexcept>

namespace nestode {

namespace {

void CheckDim(Eigen::Index expected, Eigen::Index got) {
  if (expected != got) {
    throw std::invalid_argument("objective expects dimension " +
                                std::to_string(expected) + ", got " +
                                std::to_string(got));
  }
}

double Log1pExp(double z) {
  // log(1 + exp(z)) without overflow for large z.
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

}  // namespace

double SmoothObjective::Eval(const Eigen::VectorXd& x) const {
  CheckDim(n, x.size());
  return value(x);
}

Eigen::VectorXd SmoothObjective::Grad(const Eigen::VectorXd& x) const {
  CheckDim(n, x.size());
  return gradient(x);
}

double CompositeObjective::Eval(const Eigen::VectorXd& x) const {
  return g.Eval(x) + ProxValue(h, x);
}

SmoothObjective QuadraticSpec::ToObjective() const {
  return MakeQuadratic(eigenvalues);
}

double LargestSquaredSingularValue(const Eigen::MatrixXd& a, int max_iters,
                                   double tol) {
  const Eigen::Index n = a.cols();
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    v[i] = 1.0 + 1e-3 * static_cast<double>(i % 7);
  }
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    Eigen::VectorXd w = a.transpose() * (a * v);
    const double next = v.dot(w);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    if (it > 0 && std::abs(next - lambda) <= tol * std::abs(next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return lambda;
}

SmoothObjective MakeQuadratic(const Eigen::VectorXd& eigenvalues) {
  if (eigenvalues.size() == 0 || eigenvalues.minCoeff() < 0.0) {
    throw std::invalid_argument("quadratic needs nonnegative eigenvalues");
  }
  SmoothObjective f;
  f.n = eigenvalues.size();
  f.lipschitz = eigenvalues.maxCoeff();
  f.strong_convexity = eigenvalues.minCoeff();
  f.value = [eigenvalues](const Eigen::VectorXd& x) {
    return 0.5 * x.dot(eigenvalues.cwiseProduct(x));
  };
  f.gradient = [eigenvalues](const Eigen::VectorXd& x) {
    return Eigen::VectorXd(eigenvalues.cwiseProduct(x));
  };
  return f;
}

SmoothObjective MakeLogSumExp(const Eigen::MatrixXd& a,
                              const Eigen::VectorXd& b, double rho) {
  if (a.rows() != b.size()) {
    throw std::invalid_argument("log-sum-exp: A rows must match b");
  }
  if (rho <= 0.0) throw std::invalid_argument("log-sum-exp: rho must be > 0");
  SmoothObjective f;
  f.n = a.cols();
  f.lipschitz = LargestSquaredSingularValue(a) / rho;
  f.value = [a, b, rho](const Eigen::VectorXd& x) {
    const Eigen::VectorXd z = (a * x - b) / rho;
    const double m = z.maxCoeff();
    return rho * (m + std::log((z.array() - m).exp().sum()));
  };
  f.gradient = [a, b, rho](const Eigen::VectorXd& x) {
    const Eigen::VectorXd z = (a * x - b) / rho;
    const double m = z.maxCoeff();
    Eigen::VectorXd w = (z.array() - m).exp();
    w /= w.sum();
    return Eigen::VectorXd(a.transpose() * w);
  };
  return f;
}

SmoothObjective MakeLeastSquares(const Eigen::MatrixXd& a,
                                 const Eigen::VectorXd& b, double coeff) {
  if (a.rows() != b.size()) {
    throw std::invalid_argument("least squares: A rows must match b");
  }
  if (coeff <= 0.0) {
    throw std::invalid_argument("least squares: coeff must be > 0");
  }
  SmoothObjective f;
  f.n = a.cols();
  f.lipschitz = 2.0 * coeff * LargestSquaredSingularValue(a);
  f.value = [a, b, coeff](const Eigen::VectorXd& x) {
    return coeff * (a * x - b).squaredNorm();
  };
  f.gradient = [a, b, coeff](const Eigen::VectorXd& x) {
    return Eigen::VectorXd(2.0 * coeff * (a.transpose() * (a * x - b)));
  };
  return f;
}

SmoothObjective MakeLogistic(const Eigen::MatrixXd& a,
                             const Eigen::VectorXd& y) {
  if (a.rows() != y.size()) {
    throw std::invalid_argument("logistic: A rows must match labels");
  }
  SmoothObjective f;
  f.n = a.cols();
  f.lipschitz = 0.25 * LargestSquaredSingularValue(a);
  f.value = [a, y](const Eigen::VectorXd& x) {
    const Eigen::VectorXd z = a * x;
    double total = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      total += Log1pExp(z[i]) - y[i] * z[i];
    }
    return total;
  };
  f.gradient = [a, y](const Eigen::VectorXd& x) {
    const Eigen::VectorXd z = a * x;
    Eigen::VectorXd sig(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      sig[i] = 1.0 / (1.0 + std::exp(-z[i]));
    }
    return Eigen::VectorXd(a.transpose() * (sig - y));
  };
  return f;
}

}  // namespace nestode
