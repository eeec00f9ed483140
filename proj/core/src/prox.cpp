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

#include "nestode/prox.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "nestode/objectives.hpp"

namespace nestode {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double SoftThreshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

/// Projection of v onto the l1 ball of radius delta (sort-and-threshold).
Eigen::VectorXd ProjectL1Ball(const Eigen::VectorXd& v, double delta) {
  if (v.lpNorm<1>() <= delta) return v;
  std::vector<double> u(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) u[i] = std::abs(v[i]);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumsum += u[j];
    const double candidate = (cumsum - delta) / static_cast<double>(j + 1);
    if (j + 1 == u.size() || u[j + 1] <= candidate) {
      theta = candidate;
      break;
    }
  }
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out[i] = SoftThreshold(v[i], theta);
  }
  return out;
}

/// Prox of the sorted weighted l1 norm. Works in the sorted-magnitude
/// domain: subtract the weights, then enforce a nonincreasing result by
/// merging adjacent blocks into their average (stack form of pool adjacent
/// violators), clamp at zero, and undo the sort and the signs.
Eigen::VectorXd ProxSortedL1(const Eigen::VectorXd& v,
                             const Eigen::VectorXd& w) {
  const Eigen::Index n = v.size();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(v[a]) > std::abs(v[b]);
  });

  struct Block {
    Eigen::Index first, last;
    double total;  // sum of (|v|_(i) - w_i) over the block
  };
  std::vector<Block> stack;
  stack.reserve(static_cast<std::size_t>(n));
  auto mean = [](const Block& b) {
    return b.total / static_cast<double>(b.last - b.first + 1);
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    stack.push_back({i, i, std::abs(v[order[i]]) - w[i]});
    while (stack.size() > 1 &&
           mean(stack[stack.size() - 2]) <= mean(stack.back())) {
      Block top = stack.back();
      stack.pop_back();
      stack.back().last = top.last;
      stack.back().total += top.total;
    }
  }

  Eigen::VectorXd out(n);
  for (const Block& b : stack) {
    const double val = std::max(mean(b), 0.0);
    for (Eigen::Index i = b.first; i <= b.last; ++i) {
      out[order[i]] = std::copysign(val, v[order[i]]);
    }
  }
  return out;
}

Eigen::VectorXd ProxNuclear(const ProxSpec& h, const Eigen::VectorXd& v,
                            double s) {
  if (h.rows * h.cols != v.size()) {
    throw std::invalid_argument("nuclear prox: rows*cols != vector size");
  }
  using RowMat =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMat> m(v.data(), h.rows, h.cols);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd sigma = svd.singularValues();
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    sigma[i] = std::max(sigma[i] - s * h.lambda, 0.0);
  }
  RowMat shrunk =
      svd.matrixU() * sigma.asDiagonal() * svd.matrixV().transpose();
  return Eigen::Map<const Eigen::VectorXd>(shrunk.data(), v.size());
}

void ValidateSortedWeights(const Eigen::VectorXd& w) {
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (w[i] < 0.0 || (i > 0 && w[i] > w[i - 1])) {
      throw std::invalid_argument(
          "sorted l1 weights must be nonnegative and nonincreasing");
    }
  }
}

}  // namespace

ProxSpec ProxSpec::Zero() { return ProxSpec{}; }

ProxSpec ProxSpec::L1(double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("l1: lambda must be >= 0");
  ProxSpec h;
  h.kind = Kind::kL1;
  h.lambda = lambda;
  return h;
}

ProxSpec ProxSpec::Nonneg() {
  ProxSpec h;
  h.kind = Kind::kNonneg;
  return h;
}

ProxSpec ProxSpec::L1Ball(double delta) {
  if (delta <= 0.0) throw std::invalid_argument("l1 ball: delta must be > 0");
  ProxSpec h;
  h.kind = Kind::kL1Ball;
  h.delta = delta;
  return h;
}

ProxSpec ProxSpec::Nuclear(double lambda, Eigen::Index rows,
                           Eigen::Index cols) {
  if (lambda < 0.0 || rows <= 0 || cols <= 0) {
    throw std::invalid_argument("nuclear: bad lambda or shape");
  }
  ProxSpec h;
  h.kind = Kind::kNuclear;
  h.lambda = lambda;
  h.rows = rows;
  h.cols = cols;
  return h;
}

ProxSpec ProxSpec::SortedL1(Eigen::VectorXd weights) {
  ValidateSortedWeights(weights);
  ProxSpec h;
  h.kind = Kind::kSortedL1;
  h.weights = std::move(weights);
  return h;
}

double ProxValue(const ProxSpec& h, const Eigen::VectorXd& x) {
  switch (h.kind) {
    case ProxSpec::Kind::kZero:
      return 0.0;
    case ProxSpec::Kind::kL1:
      return h.lambda * x.lpNorm<1>();
    case ProxSpec::Kind::kNonneg:
      return x.minCoeff() >= 0.0 ? 0.0 : kInf;
    case ProxSpec::Kind::kL1Ball:
      // Slack for points produced by the projection itself.
      return x.lpNorm<1>() <= h.delta * (1.0 + 1e-12) ? 0.0 : kInf;
    case ProxSpec::Kind::kNuclear: {
      if (h.rows * h.cols != x.size()) {
        throw std::invalid_argument("nuclear value: rows*cols != vector size");
      }
      using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::RowMajor>;
      Eigen::Map<const RowMat> m(x.data(), h.rows, h.cols);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
      return h.lambda * svd.singularValues().sum();
    }
    case ProxSpec::Kind::kSortedL1: {
      if (h.weights.size() != x.size()) {
        throw std::invalid_argument("sorted l1 value: weight size mismatch");
      }
      std::vector<double> mag(x.size());
      for (Eigen::Index i = 0; i < x.size(); ++i) mag[i] = std::abs(x[i]);
      std::sort(mag.begin(), mag.end(), std::greater<double>());
      double total = 0.0;
      for (Eigen::Index i = 0; i < x.size(); ++i) total += h.weights[i] * mag[i];
      return total;
    }
  }
  throw std::logic_error("unreachable prox kind");
}

Eigen::VectorXd Prox(const ProxSpec& h, const Eigen::VectorXd& v, double s) {
  if (s <= 0.0) throw std::invalid_argument("prox: step s must be > 0");
  switch (h.kind) {
    case ProxSpec::Kind::kZero:
      return v;
    case ProxSpec::Kind::kL1: {
      Eigen::VectorXd out(v.size());
      const double t = s * h.lambda;
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        out[i] = SoftThreshold(v[i], t);
      }
      return out;
    }
    case ProxSpec::Kind::kNonneg:
      return v.cwiseMax(0.0);
    case ProxSpec::Kind::kL1Ball:
      return ProjectL1Ball(v, h.delta);
    case ProxSpec::Kind::kNuclear:
      return ProxNuclear(h, v, s);
    case ProxSpec::Kind::kSortedL1: {
      if (h.weights.size() != v.size()) {
        throw std::invalid_argument("sorted l1 prox: weight size mismatch");
      }
      return ProxSortedL1(v, s * h.weights);
    }
  }
  throw std::logic_error("unreachable prox kind");
}

Eigen::VectorXd ProximalSubgradient(const CompositeObjective& obj,
                                    const Eigen::VectorXd& y, double s) {
  if (s <= 0.0) throw std::invalid_argument("subgradient: step s must be > 0");
  const Eigen::VectorXd step = y - s * obj.g.Grad(y);
  return (y - Prox(obj.h, step, s)) / s;
}

Eigen::VectorXd LassoDirectionalSubgradient(const Eigen::MatrixXd& a,
                                            const Eigen::VectorXd& y,
                                            double lambda,
                                            const Eigen::VectorXd& x,
                                            const Eigen::VectorXd& p) {
  const Eigen::VectorXd c = a.transpose() * (a * x - y);
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] != 0.0) {
      g[i] = c[i] + lambda * (x[i] > 0.0 ? 1.0 : -1.0);
    } else if (p[i] != 0.0) {
      g[i] = c[i] + lambda * (p[i] > 0.0 ? 1.0 : -1.0);
    } else {
      g[i] = SoftThreshold(c[i], lambda);
    }
  }
  return g;
}

}  // namespace nestode
