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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "nestode/objectives.hpp"
#include "nestode/problems.hpp"
#include "nestode/prox.hpp"
#include "nestode/rng.hpp"

using namespace nestode;

namespace {

Eigen::VectorXd RandomVector(Rng& rng, Eigen::Index n, double stddev = 1.0) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.Gaussian(0.0, stddev);
  return v;
}

/// Exact sorted-weighted-l1 prox by enumeration. In the sorted-magnitude
/// domain the solution is blockwise constant with value max(mean(u - w), 0)
/// over each block; enumerate all 2^(p-1) consecutive-block partitions and
/// keep the feasible candidate with the smallest objective.
Eigen::VectorXd SortedL1Oracle(const Eigen::VectorXd& v,
                               const Eigen::VectorXd& w, double s) {
  const int p = static_cast<int>(v.size());
  std::vector<int> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return std::abs(v[a]) > std::abs(v[b]); });
  Eigen::VectorXd u(p);
  for (int i = 0; i < p; ++i) u[i] = std::abs(v[order[i]]);

  const auto objective = [&](const Eigen::VectorXd& z) {
    // z: nonincreasing nonnegative magnitudes in the sorted domain.
    double val = 0.5 * (z - u).squaredNorm();
    for (int i = 0; i < p; ++i) val += s * w[i] * z[i];
    return val;
  };

  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_z = Eigen::VectorXd::Zero(p);
  for (int mask = 0; mask < (1 << (p - 1)); ++mask) {
    Eigen::VectorXd z(p);
    bool feasible = true;
    double prev_val = std::numeric_limits<double>::infinity();
    int start = 0;
    for (int i = 0; i < p; ++i) {
      const bool block_ends = i == p - 1 || !((mask >> i) & 1) == false ||
                              i == p - 1;
      (void)block_ends;
      // Block boundary after position i when bit i of mask is set or at
      // the end of the vector.
      if (i == p - 1 || ((mask >> i) & 1)) {
        double sum = 0.0;
        for (int j = start; j <= i; ++j) sum += u[j] - s * w[j];
        const double val = std::max(sum / (i - start + 1), 0.0);
        if (val > prev_val + 1e-12) {
          feasible = false;
          break;
        }
        for (int j = start; j <= i; ++j) z[j] = val;
        prev_val = val;
        start = i + 1;
      }
    }
    if (!feasible) continue;
    const double score = objective(z);
    if (score < best) {
      best = score;
      best_z = z;
    }
  }

  Eigen::VectorXd out(p);
  for (int i = 0; i < p; ++i) {
    out[order[i]] = std::copysign(best_z[i], v[order[i]]);
  }
  return out;
}

/// Exact l1-ball projection by bisection on the threshold theta solving
/// sum max(|v_i| - theta, 0) = delta.
Eigen::VectorXd L1BallOracle(const Eigen::VectorXd& v, double delta) {
  if (v.lpNorm<1>() <= delta) return v;
  double lo = 0.0, hi = v.cwiseAbs().maxCoeff();
  for (int it = 0; it < 200; ++it) {
    const double theta = 0.5 * (lo + hi);
    double total = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      total += std::max(std::abs(v[i]) - theta, 0.0);
    }
    (total > delta ? lo : hi) = theta;
  }
  const double theta = 0.5 * (lo + hi);
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out[i] = std::copysign(std::max(std::abs(v[i]) - theta, 0.0), v[i]);
  }
  return out;
}

}  // namespace

TEST_SUITE_BEGIN("prox");

TEST_CASE("closed-form variants on hand inputs") {
  Eigen::VectorXd v(2);
  v << 2.0, -0.5;
  CHECK(Prox(ProxSpec::Zero(), v, 0.3) == v);

  const Eigen::VectorXd soft = Prox(ProxSpec::L1(1.0), v, 1.0);
  CHECK(soft[0] == 1.0);
  CHECK(soft[1] == 0.0);

  const Eigen::VectorXd clamp = Prox(ProxSpec::Nonneg(), v, 1.0);
  CHECK(clamp[0] == 2.0);
  CHECK(clamp[1] == 0.0);

  CHECK_THROWS_AS(Prox(ProxSpec::L1(1.0), v, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(Prox(ProxSpec::L1(1.0), v, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(Prox(ProxSpec::Nuclear(1.0, 3, 3), v, 1.0),
                  std::invalid_argument);
}

TEST_CASE("sorted-l1 prox matches the enumeration oracle") {
  Rng rng(404);
  for (int trial = 0; trial < 50; ++trial) {
    const int p = 2 + static_cast<int>(rng.Below(5));  // p in [2, 6]
    Eigen::VectorXd w(p);
    double prev = 3.0 + rng.Uniform();
    for (int i = 0; i < p; ++i) {
      prev *= 0.5 + 0.5 * rng.Uniform();
      w[i] = prev;
    }
    const Eigen::VectorXd v = RandomVector(rng, p, 2.0);
    const double s = 0.25 + rng.Uniform();
    const Eigen::VectorXd got = Prox(ProxSpec::SortedL1(w), v, s);
    const Eigen::VectorXd want = SortedL1Oracle(v, w, s);
    CHECK((got - want).lpNorm<Eigen::Infinity>() <= 1e-6);
  }
}

TEST_CASE("sorted-l1 with equal weights reduces to plain l1") {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd v = RandomVector(rng, 12, 3.0);
    const Eigen::VectorXd a =
        Prox(ProxSpec::SortedL1(Eigen::VectorXd::Constant(12, 0.9)), v, 0.4);
    const Eigen::VectorXd b = Prox(ProxSpec::L1(0.9), v, 0.4);
    CHECK((a - b).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
}

TEST_CASE("l1-ball projection matches the bisection oracle") {
  Rng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const int p = 2 + static_cast<int>(rng.Below(5));
    const Eigen::VectorXd v = RandomVector(rng, p, 2.0);
    const double delta = 0.2 + 2.0 * rng.Uniform();
    const Eigen::VectorXd got = Prox(ProxSpec::L1Ball(delta), v, 1.0);
    const Eigen::VectorXd want = L1BallOracle(v, delta);
    CHECK((got - want).lpNorm<Eigen::Infinity>() <= 1e-6);
    CHECK(got.lpNorm<1>() <= delta * (1.0 + 1e-10));
  }
}

TEST_CASE("nuclear prox shrinks singular values") {
  // Diagonal matrix: the prox must soft-threshold the diagonal.
  Eigen::VectorXd v(9);
  v << 3.0, 0, 0, 0, 1.0, 0, 0, 0, 0.2;
  const Eigen::VectorXd out = Prox(ProxSpec::Nuclear(0.5, 3, 3), v, 1.0);
  Eigen::VectorXd want(9);
  want << 2.5, 0, 0, 0, 0.5, 0, 0, 0, 0.0;
  CHECK((out - want).lpNorm<Eigen::Infinity>() <= 1e-12);

  // Value agrees with the sum of singular values.
  CHECK(ProxValue(ProxSpec::Nuclear(0.5, 3, 3), v) ==
        doctest::Approx(0.5 * (3.0 + 1.0 + 0.2)).epsilon(1e-12));

  // Optimality against random perturbations of the returned point.
  Rng rng(5);
  const ProxSpec h = ProxSpec::Nuclear(0.7, 3, 3);
  const Eigen::VectorXd m = RandomVector(rng, 9, 2.0);
  const Eigen::VectorXd z = Prox(h, m, 0.8);
  const auto fval = [&](const Eigen::VectorXd& q) {
    return 0.5 * (q - m).squaredNorm() / 0.8 + ProxValue(h, q);
  };
  const double base = fval(z);
  for (int t = 0; t < 200; ++t) {
    CHECK(base <= fval(z + RandomVector(rng, 9, 0.05)) + 1e-10);
  }
}

TEST_CASE("nonexpansiveness over 1000 random pairs for every variant") {
  Rng rng(2024);
  Eigen::VectorXd w(9);
  w << 4, 3.5, 3, 2, 1.5, 1, 0.6, 0.3, 0.1;
  const ProxSpec variants[] = {
      ProxSpec::Zero(),           ProxSpec::L1(0.8),
      ProxSpec::Nonneg(),         ProxSpec::L1Ball(2.5),
      ProxSpec::Nuclear(0.4, 3, 3), ProxSpec::SortedL1(w),
  };
  for (const ProxSpec& h : variants) {
    for (int trial = 0; trial < 1000; ++trial) {
      const Eigen::VectorXd u = RandomVector(rng, 9, 2.0);
      const Eigen::VectorXd v = RandomVector(rng, 9, 2.0);
      const double in = (u - v).norm();
      const double out = (Prox(h, u, 0.6) - Prox(h, v, 0.6)).norm();
      CHECK(out <= in * (1.0 + 1e-10) + 1e-14);
    }
  }
}

TEST_CASE("prox optimality: (v - z)/s is a subgradient at z") {
  Rng rng(99);
  Eigen::VectorXd w(6);
  w << 3, 2, 1, 0.5, 0.2, 0.1;
  const ProxSpec variants[] = {ProxSpec::L1(1.2), ProxSpec::Nonneg(),
                               ProxSpec::L1Ball(1.5), ProxSpec::SortedL1(w)};
  for (const ProxSpec& h : variants) {
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::VectorXd v = RandomVector(rng, 6, 2.0);
      const double s = 0.5;
      const Eigen::VectorXd z = Prox(h, v, s);
      const Eigen::VectorXd g = (v - z) / s;
      for (int t = 0; t < 100; ++t) {
        Eigen::VectorXd probe = RandomVector(rng, 6, 2.0);
        // Keep probes inside the domain of indicator variants.
        if (h.kind == ProxSpec::Kind::kNonneg) probe = probe.cwiseAbs();
        if (h.kind == ProxSpec::Kind::kL1Ball &&
            probe.lpNorm<1>() > h.delta) {
          probe *= h.delta / probe.lpNorm<1>();
        }
        CHECK(ProxValue(h, probe) >=
              ProxValue(h, z) + g.dot(probe - z) - 1e-9);
      }
    }
  }
}

TEST_CASE("proximal subgradient definition and hand value") {
  // h = zero: G_s = grad g exactly.
  Eigen::VectorXd lambda(3);
  lambda << 0.3, 0.7, 1.0;
  const CompositeObjective smooth{MakeQuadratic(lambda), ProxSpec::Zero()};
  Rng rng(15);
  for (int t = 0; t < 20; ++t) {
    const Eigen::VectorXd y = RandomVector(rng, 3, 2.0);
    CHECK((ProximalSubgradient(smooth, y, 0.5) - smooth.g.Grad(y)).norm() <=
          1e-14 * (1.0 + smooth.g.Grad(y).norm()));
  }

  // g = x^2/2, h = |x|, y = 3, s = 0.5: inner point 1.5, prox 1.0, G = 4.
  const CompositeObjective lasso1d{MakeQuadratic(Eigen::VectorXd::Ones(1)),
                                   ProxSpec::L1(1.0)};
  Eigen::VectorXd y(1);
  y << 3.0;
  CHECK(ProximalSubgradient(lasso1d, y, 0.5)[0] == doctest::Approx(4.0));

  CHECK_THROWS_AS(ProximalSubgradient(lasso1d, y, 0.0),
                  std::invalid_argument);
}

TEST_CASE("proximal subgradient vanishes at the cached lasso optimum") {
  ProblemInstance inst = Generate("lasso_fat", Scale::kDesk, 42);
  EnsureReference(inst, "prox-test-cache");
  const double s = 1.0 / inst.objective.g.lipschitz;
  CHECK(ProximalSubgradient(inst.objective, inst.x_star, s).norm() <= 1e-8);
}

TEST_CASE("lasso directional subgradient branches") {
  Rng rng(33);
  Eigen::MatrixXd a(4, 3);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 3; ++j) a(i, j) = rng.Gaussian();
  }
  const Eigen::VectorXd y = RandomVector(rng, 4, 2.0);
  const double lambda = 1.3;

  // All components nonzero: first branch only.
  Eigen::VectorXd x(3), p(3);
  x << 1.0, -2.0, 0.5;
  p << 0.0, 0.0, 0.0;
  const Eigen::VectorXd c = a.transpose() * (a * x - y);
  Eigen::VectorXd g = LassoDirectionalSubgradient(a, y, lambda, x, p);
  for (int i = 0; i < 3; ++i) {
    CHECK(g[i] == doctest::Approx(c[i] + lambda * (x[i] > 0 ? 1.0 : -1.0)));
  }

  // x_i = 0, p_i = 1: the direction decides the sign.
  x << 0.0, -2.0, 0.5;
  p << 1.0, 0.0, 0.0;
  g = LassoDirectionalSubgradient(a, y, lambda, x, p);
  const Eigen::VectorXd c2 = a.transpose() * (a * x - y);
  CHECK(g[0] == doctest::Approx(c2[0] + lambda));

  // x_i = p_i = 0 with |c_i| <= lambda: the clamp zeroes the component.
  Eigen::MatrixXd small = 0.01 * a;
  x << 0.0, 0.0, 0.0;
  p << 0.0, 0.0, 0.0;
  const Eigen::VectorXd zero_y = Eigen::VectorXd::Zero(4);
  g = LassoDirectionalSubgradient(small, zero_y, lambda, x, p);
  CHECK(g.norm() == 0.0);
}

TEST_CASE("lasso directional subgradient is a subgradient of f") {
  Rng rng(21);
  Eigen::MatrixXd a(5, 4);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 4; ++j) a(i, j) = rng.Gaussian();
  }
  const Eigen::VectorXd y = RandomVector(rng, 5, 2.0);
  const double lambda = 0.9;
  const auto f = [&](const Eigen::VectorXd& q) {
    return 0.5 * (a * q - y).squaredNorm() + lambda * q.lpNorm<1>();
  };
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd x = RandomVector(rng, 4, 1.5);
    if (trial % 3 == 0) x[trial % 4] = 0.0;  // exercise the zero branches
    const Eigen::VectorXd p = RandomVector(rng, 4);
    const Eigen::VectorXd g = LassoDirectionalSubgradient(a, y, lambda, x, p);
    for (int t = 0; t < 50; ++t) {
      const Eigen::VectorXd w = RandomVector(rng, 4, 2.0);
      CHECK(f(w) >= f(x) + g.dot(w - x) - 1e-9);
    }
  }
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(ProxSpec::L1(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(ProxSpec::L1Ball(0.0), std::invalid_argument);
  CHECK_THROWS_AS(ProxSpec::Nuclear(1.0, 0, 3), std::invalid_argument);
  Eigen::VectorXd bad(3);
  bad << 1.0, 2.0, 0.5;  // increasing prefix
  CHECK_THROWS_AS(ProxSpec::SortedL1(bad), std::invalid_argument);
  Eigen::VectorXd neg(2);
  neg << 1.0, -0.1;
  CHECK_THROWS_AS(ProxSpec::SortedL1(neg), std::invalid_argument);
}

TEST_SUITE_END();
