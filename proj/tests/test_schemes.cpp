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

#include <Eigen/QR>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "nestode/objectives.hpp"
#include "nestode/problems.hpp"
#include "nestode/prox.hpp"
#include "nestode/rng.hpp"
#include "nestode/schemes.hpp"

using namespace nestode;

namespace {

CompositeObjective Smooth1d() {
  return {MakeQuadratic(Eigen::VectorXd::Ones(1)), ProxSpec::Zero()};
}

Eigen::VectorXd Scalar(double v) {
  Eigen::VectorXd x(1);
  x << v;
  return x;
}

SchemeParams Params(double s, double r, long k_max,
                    RestartKind restart = RestartKind::kNone,
                    long k_min = 1) {
  SchemeParams p;
  p.s = s;
  p.r = r;
  p.k_max = k_max;
  p.k_min = k_min;
  p.restart = restart;
  return p;
}

long FirstIndexBelow(const IterateTrace& trace, double gap) {
  for (long k = 0; k < trace.Size(); ++k) {
    if (trace.f_gap[k] <= gap) return k;
  }
  return -1;
}

}  // namespace

TEST_SUITE_BEGIN("schemes");

TEST_CASE("momentum scheme hand recursion for r = 3 and r = 4") {
  const CompositeObjective obj = Smooth1d();
  const IterateTrace t3 = NesterovRun(obj, Scalar(1.0), Params(0.1, 3, 3), 0.0);
  REQUIRE(t3.Size() == 4);
  CHECK(t3.x[1][0] == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(t3.x[2][0] == doctest::Approx(0.81).epsilon(1e-15));
  CHECK(t3.x[3][0] == doctest::Approx(0.70875).epsilon(1e-15));

  const IterateTrace t4 = NesterovRun(obj, Scalar(1.0), Params(0.1, 4, 3), 0.0);
  CHECK(t4.x[1][0] == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(t4.x[2][0] == doctest::Approx(0.81).epsilon(1e-15));
  CHECK(t4.x[3][0] == doctest::Approx(0.7128).epsilon(1e-15));
}

TEST_CASE("gradient descent is the exact geometric recursion") {
  const IterateTrace t = GradientDescentRun(Smooth1d(), Scalar(1.0), 0.1,
                                            50, 0.0);
  double p = 1.0;
  for (long k = 0; k < t.Size(); ++k) {
    CHECK(t.x[k][0] == doctest::Approx(p).epsilon(1e-13));
    p -= 0.1 * p;
  }
}

TEST_CASE("x0 at the optimum is a fixed point of every scheme") {
  const CompositeObjective obj = Smooth1d();
  for (RestartKind restart :
       {RestartKind::kNone, RestartKind::kSpeed, RestartKind::kGradient}) {
    const IterateTrace t =
        RunScheme(obj, Scalar(0.0), Params(0.5, 3, 20, restart), 0.0);
    for (long k = 0; k < t.Size(); ++k) {
      CHECK(t.x[k][0] == 0.0);
      CHECK(t.f_gap[k] == 0.0);
      CHECK_FALSE(t.restarted[k]);
    }
  }
  const IterateTrace gd = GradientDescentRun(obj, Scalar(0.0), 0.5, 20, 0.0);
  for (long k = 0; k < gd.Size(); ++k) CHECK(gd.x[k][0] == 0.0);
}

TEST_CASE("r = 3 reproduces the plain momentum recursion bitwise") {
  Eigen::VectorXd lambda(5);
  lambda << 0.001, 0.2, 0.4, 0.8, 1.0;
  const CompositeObjective obj{MakeQuadratic(lambda), ProxSpec::Zero()};
  Eigen::VectorXd x0(5);
  x0 << 1, -2, 3, -4, 5;
  const long k_max = 500;
  const IterateTrace t = NesterovRun(obj, x0, Params(1.0, 3, k_max), 0.0);

  // Independent reference loop coded directly from the classical recursion.
  Eigen::VectorXd x_prev = x0;
  Eigen::VectorXd y = x0;
  for (long k = 1; k <= k_max; ++k) {
    const Eigen::VectorXd x = y - 1.0 * obj.g.Grad(y);
    const double momentum = static_cast<double>(k - 1) /
                            (static_cast<double>(k) + 2.0);
    y = x + momentum * (x - x_prev);
    CHECK(t.x[k] == x);
    x_prev = x;
  }
}

TEST_CASE("rotational invariance for a quadratic objective") {
  Rng rng(61);
  Eigen::MatrixXd a(10, 6);
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 6; ++j) a(i, j) = rng.Gaussian();
  }
  Eigen::VectorXd b(10);
  for (int i = 0; i < 10; ++i) b[i] = rng.Gaussian(0.0, 2.0);
  Eigen::MatrixXd seed(6, 6);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) seed(i, j) = rng.Gaussian();
  }
  const Eigen::MatrixXd q =
      Eigen::HouseholderQR<Eigen::MatrixXd>(seed).householderQ();

  const CompositeObjective f{MakeLeastSquares(a, b, 0.5), ProxSpec::Zero()};
  const CompositeObjective f_rot{
      MakeLeastSquares(a * q.transpose(), b, 0.5), ProxSpec::Zero()};
  const double s =
      0.9 / std::max(f.g.lipschitz, f_rot.g.lipschitz);

  Eigen::VectorXd x0(6);
  x0 << 1, 2, -1, 0.5, -2, 3;
  const IterateTrace t = NesterovRun(f, x0, Params(s, 3, 300), 0.0);
  const IterateTrace t_rot =
      NesterovRun(f_rot, q * x0, Params(s, 3, 300), 0.0);
  for (long k = 0; k <= 300; ++k) {
    CHECK((t_rot.x[k] - q * t.x[k]).lpNorm<Eigen::Infinity>() <= 1e-10);
  }
}

TEST_CASE("quadratic rate certificates for r in {3, 4, 5}") {
  const ProblemInstance inst = Generate("quadratic", Scale::kDesk, 42);
  const double s = 1.0 / inst.objective.g.lipschitz;
  const double r2 = (inst.x0 - inst.x_star).squaredNorm();
  for (double r : {3.0, 4.0, 5.0}) {
    const IterateTrace t =
        NesterovRun(inst.objective, inst.x0, Params(s, r, 2000), inst.f_star);
    for (long k = 1; k < t.Size(); ++k) {
      const double kk = static_cast<double>(k) + r - 2.0;
      CHECK(t.f_gap[k] <= (r - 1.0) * (r - 1.0) * r2 / (2.0 * s * kk * kk));
    }
  }
}

TEST_CASE("rate certificate and partial sums on the small lasso instance") {
  ProblemInstance inst = Generate("lasso_fat", Scale::kDesk, 42);
  EnsureReference(inst, "schemes-test-cache");
  const double s = 1.0 / inst.objective.g.lipschitz;
  const double r2 = (inst.x0 - inst.x_star).squaredNorm();

  const IterateTrace t3 =
      NesterovRun(inst.objective, inst.x0, Params(s, 3, 3000), inst.f_star);
  for (long k = 1; k < t3.Size(); ++k) {
    const double kk = static_cast<double>(k) + 1.0;
    CHECK(t3.f_gap[k] <= 2.0 * r2 / (s * kk * kk));
  }

  // r = 4: the weighted error sums stay below 9 R^2 / (2 s (r - 3)).
  const double r = 4.0;
  const IterateTrace t4 =
      NesterovRun(inst.objective, inst.x0, Params(s, r, 3000), inst.f_star);
  const double bound = (r - 1.0) * (r - 1.0) * r2 / (2.0 * s * (r - 3.0));
  double partial = 0.0;
  for (long k = 1; k < t4.Size(); ++k) {
    partial += (static_cast<double>(k) + r - 1.0) * t4.f_gap[k];
    CHECK(partial <= bound);
  }
}

TEST_CASE("restart variants beat the plain scheme on an ill-conditioned "
          "quadratic") {
  const ProblemInstance inst = Generate("quadratic", Scale::kDesk, 42);
  const double s = 1.0 / inst.objective.g.lipschitz;
  const long budget = 3000;

  const IterateTrace plain =
      NesterovRun(inst.objective, inst.x0, Params(s, 3, budget), inst.f_star);
  const IterateTrace speed = SpeedRestartRun(
      inst.objective, inst.x0, Params(s, 3, budget, RestartKind::kSpeed, 10),
      inst.f_star);
  const IterateTrace grad = GradientRestartRun(
      inst.objective, inst.x0, Params(s, 3, budget, RestartKind::kGradient, 10),
      inst.f_star);

  const long k_speed = FirstIndexBelow(speed, 1e-10);
  const long k_grad = FirstIndexBelow(grad, 1e-10);
  const long k_plain = FirstIndexBelow(plain, 1e-10);
  CHECK(k_speed >= 0);
  CHECK(k_grad >= 0);
  CHECK(k_plain == -1);

  // Between consecutive resets the gap is nonincreasing.
  double prev = speed.f_gap[0];
  for (long k = 1; k < speed.Size(); ++k) {
    if (!speed.restarted[k]) {
      // The slack covers cancellation round-off in f - f_star, which
      // scales with |f_star| once the gap reaches the noise floor.
      CHECK(speed.f_gap[k] <=
            prev + 1e-12 * (1.0 + prev + std::abs(inst.f_star)));
    }
    prev = speed.f_gap[k];
  }
}

TEST_CASE("first speed restart obeys the lower bound on the restart time") {
  const double s = 1e-6;
  const IterateTrace t = SpeedRestartRun(
      Smooth1d(), Scalar(1.0), Params(s, 3, 5000, RestartKind::kSpeed), 0.0);
  long k1 = -1;
  for (long k = 0; k < t.Size(); ++k) {
    if (t.restarted[k]) {
      k1 = k;
      break;
    }
  }
  REQUIRE(k1 > 0);
  CHECK(static_cast<double>(k1) * std::sqrt(s) >= 4.0 / 5.0 - 0.1);
}

TEST_CASE("gradient restart stays quiet when the plain scheme is monotone") {
  const IterateTrace t = GradientRestartRun(
      Smooth1d(), Scalar(1.0), Params(1.0, 3, 100, RestartKind::kGradient),
      0.0);
  for (long k = 0; k < t.Size(); ++k) CHECK_FALSE(t.restarted[k]);
}

TEST_CASE("step size validation and divergence reporting") {
  const CompositeObjective obj = Smooth1d();  // L = 1
  CHECK_THROWS_AS(NesterovRun(obj, Scalar(1.0), Params(1.5, 3, 10), 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(GradientDescentRun(obj, Scalar(1.0), 1.5, 10, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(NesterovRun(obj, Scalar(1.0), Params(-0.1, 3, 10), 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(NesterovRun(obj, Scalar(1.0), Params(0.1, 1.5, 10), 0.0),
                  std::invalid_argument);

  SchemeParams big = Params(4.0, 3, 10000);
  big.allow_large_step = true;
  try {
    NesterovRun(obj, Scalar(1.0), big, 0.0);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.where() > 0.0);
    CHECK(std::string(e.what()).find("iteration") != std::string::npos);
  }
}

TEST_CASE("dispatch argument checks") {
  const CompositeObjective obj = Smooth1d();
  CHECK_THROWS_AS(
      NesterovRun(obj, Scalar(1.0), Params(0.1, 3, 5, RestartKind::kSpeed),
                  0.0),
      std::invalid_argument);
  CHECK_THROWS_AS(
      SpeedRestartRun(obj, Scalar(1.0), Params(0.1, 3, 5), 0.0),
      std::invalid_argument);
  CHECK_THROWS_AS(
      GradientRestartRun(obj, Scalar(1.0), Params(0.1, 3, 5), 0.0),
      std::invalid_argument);
  CHECK_THROWS_AS(
      SpeedRestartRun(obj, Scalar(1.0),
                      Params(0.1, 3, 5, RestartKind::kSpeed, 0), 0.0),
      std::invalid_argument);
}

TEST_CASE("gap floor and descent monotonicity across the smooth catalog") {
  Rng rng(314);
  Eigen::VectorXd lambda(8);
  lambda << 0.001, 0.05, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0;
  Eigen::MatrixXd a(15, 8);
  for (int i = 0; i < 15; ++i) {
    for (int j = 0; j < 8; ++j) a(i, j) = rng.Gaussian();
  }
  Eigen::VectorXd b(15), y(15);
  for (int i = 0; i < 15; ++i) {
    b[i] = rng.Gaussian(0.0, 2.0);
    y[i] = rng.Uniform() < 0.5 ? 0.0 : 1.0;
  }
  const SmoothObjective catalog[] = {
      MakeQuadratic(lambda),
      MakeLogSumExp(a, b, 5.0),
      MakeLeastSquares(a, b, 0.5),
      MakeLogistic(a, y),
  };
  Eigen::VectorXd x0(8);
  x0 << 1, -1, 2, -2, 0.5, -0.5, 3, -3;
  for (const SmoothObjective& g : catalog) {
    const CompositeObjective obj{g, ProxSpec::Zero()};
    const double s = 1.0 / g.lipschitz;

    const IterateTrace gd = GradientDescentRun(obj, x0, s, 400, 0.0);
    for (long k = 1; k < gd.Size(); ++k) {
      CHECK(gd.f_gap[k] <= gd.f_gap[k - 1] + 1e-12 * (1.0 + gd.f_gap[k - 1]));
    }

  }

  // Against an exact optimal value the gap never undershoots zero beyond
  // round-off. Only the two members with a closed-form optimum qualify:
  // iterative references can sit above the infimum by far more than 1e-12.
  {
    const CompositeObjective obj{MakeQuadratic(lambda), ProxSpec::Zero()};
    const IterateTrace t =
        NesterovRun(obj, x0, Params(1.0 / lambda.maxCoeff(), 3, 2000), 0.0);
    for (long k = 0; k < t.Size(); ++k) CHECK(t.f_gap[k] >= -1e-12);
  }
  {
    const SmoothObjective g = MakeLeastSquares(a, b, 0.5);
    const Eigen::VectorXd x_opt =
        (a.transpose() * a).ldlt().solve(a.transpose() * b);
    const double f_opt = g.Eval(x_opt);
    const CompositeObjective obj{g, ProxSpec::Zero()};
    const IterateTrace t =
        NesterovRun(obj, x0, Params(1.0 / g.lipschitz, 3, 2000), f_opt);
    for (long k = 0; k < t.Size(); ++k) {
      CHECK(t.f_gap[k] >= -1e-12 * (1.0 + std::abs(f_opt)));
    }
  }
}

TEST_CASE("trace CSV layout") {
  const IterateTrace t = SpeedRestartRun(
      Smooth1d(), Scalar(1.0), Params(0.1, 3, 3, RestartKind::kSpeed), 0.0);
  std::ostringstream out;
  WriteTraceCsv(t, out);
  std::istringstream in(out.str());
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "k,f_gap,step_norm,restarted");
  long rows = 0;
  while (std::getline(in, line)) {
    CHECK(line.rfind(std::to_string(rows) + ",", 0) == 0);
    CHECK((line.back() == '0' || line.back() == '1'));
    ++rows;
  }
  CHECK(rows == t.Size());
}

TEST_SUITE_END();
