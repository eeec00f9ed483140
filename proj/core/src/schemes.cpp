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

#include "nestode/schemes.hpp"

#include <chrono>
#include <cmath>

#include "nestode/prox.hpp"
#include "nestode/textio.hpp"

namespace nestode {

namespace {

void ValidateStep(const CompositeObjective& obj, double s,
                  bool allow_large_step) {
  if (s <= 0.0) throw std::invalid_argument("scheme: step s must be > 0");
  if (!allow_large_step && obj.g.lipschitz > 0.0 &&
      s > (1.0 + 1e-12) / obj.g.lipschitz) {
    throw std::invalid_argument(
        "scheme: s exceeds 1/L; set allow_large_step to override");
  }
}

void CheckFinite(const Eigen::VectorXd& x, double f, long k) {
  if (!x.allFinite() || !std::isfinite(f)) {
    throw DivergenceError(
        "scheme diverged at iteration " + std::to_string(k),
        static_cast<double>(k));
  }
}

IterateTrace RunLoop(const CompositeObjective& obj, const Eigen::VectorXd& x0,
                     const SchemeParams& params, double f_star,
                     const std::string& name) {
  ValidateStep(obj, params.s, params.allow_large_step);
  if (params.k_max < 0) throw std::invalid_argument("scheme: k_max < 0");
  if (params.r < 2.0) throw std::invalid_argument("scheme: r must be >= 2");
  if (params.restart != RestartKind::kNone && params.k_min < 1) {
    throw std::invalid_argument("scheme: k_min must be >= 1");
  }

  const auto t_begin = std::chrono::steady_clock::now();
  IterateTrace trace;
  trace.scheme = name;
  trace.params = params;
  trace.f_star = f_star;
  trace.x.reserve(params.k_max + 1);
  trace.f_gap.reserve(params.k_max + 1);
  trace.step_norm.reserve(params.k_max + 1);
  trace.restarted.reserve(params.k_max + 1);

  const double s = params.s;
  Eigen::VectorXd x_prev = x0;  // x_{k-1}, with x_{-1} = x0
  Eigen::VectorXd y = x0;       // y_0 = x_0
  double f_prev = obj.Eval(x0);
  CheckFinite(x0, f_prev, 0);
  trace.x.push_back(x0);
  trace.f_gap.push_back(f_prev - f_star);
  trace.step_norm.push_back(0.0);
  trace.restarted.push_back(false);

  long j = 1;  // momentum counter; equals k when restarts are off
  for (long k = 1; k <= params.k_max; ++k) {
    const Eigen::VectorXd x =
        Prox(obj.h, y - s * obj.g.Grad(y), s);
    const double f = obj.Eval(x);
    CheckFinite(x, f, k);
    const double step = (x - x_prev).norm();

    bool reset = false;
    switch (params.restart) {
      case RestartKind::kNone:
        j = k;
        break;
      case RestartKind::kSpeed:
        reset = step < trace.step_norm.back() && j >= params.k_min;
        j = reset ? 1 : j + 1;
        break;
      case RestartKind::kGradient:
        reset = f > f_prev && j >= params.k_min;
        j = reset ? 1 : j + 1;
        break;
    }
    const double momentum =
        static_cast<double>(j - 1) / (static_cast<double>(j) + params.r - 1.0);
    y = x + momentum * (x - x_prev);

    trace.x.push_back(x);
    trace.f_gap.push_back(f - f_star);
    trace.step_norm.push_back(step);
    trace.restarted.push_back(reset);
    x_prev = x;
    f_prev = f;
  }

  trace.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin)
          .count();
  return trace;
}

}  // namespace

IterateTrace NesterovRun(const CompositeObjective& obj,
                         const Eigen::VectorXd& x0, const SchemeParams& params,
                         double f_star) {
  if (params.restart != RestartKind::kNone) {
    throw std::invalid_argument("NesterovRun: params.restart must be none");
  }
  return RunLoop(obj, x0, params, f_star, "nesterov");
}

IterateTrace GradientDescentRun(const CompositeObjective& obj,
                                const Eigen::VectorXd& x0, double s,
                                long k_max, double f_star,
                                bool allow_large_step) {
  ValidateStep(obj, s, allow_large_step);
  if (k_max < 0) throw std::invalid_argument("scheme: k_max < 0");
  const auto t_begin = std::chrono::steady_clock::now();
  IterateTrace trace;
  trace.scheme = "gradient_descent";
  trace.params.s = s;
  trace.params.k_max = k_max;
  trace.params.allow_large_step = allow_large_step;
  trace.f_star = f_star;
  trace.x.reserve(k_max + 1);

  Eigen::VectorXd x = x0;
  for (long k = 0; k <= k_max; ++k) {
    const double f = obj.Eval(x);
    CheckFinite(x, f, k);
    trace.f_gap.push_back(f - f_star);
    trace.step_norm.push_back(k == 0 ? 0.0
                                     : (x - trace.x.back()).norm());
    trace.x.push_back(x);
    trace.restarted.push_back(false);
    if (k < k_max) x = Prox(obj.h, x - s * obj.g.Grad(x), s);
  }

  trace.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin)
          .count();
  return trace;
}

IterateTrace SpeedRestartRun(const CompositeObjective& obj,
                             const Eigen::VectorXd& x0,
                             const SchemeParams& params, double f_star) {
  if (params.restart != RestartKind::kSpeed) {
    throw std::invalid_argument("SpeedRestartRun: params.restart must be speed");
  }
  return RunLoop(obj, x0, params, f_star, "speed_restart");
}

IterateTrace GradientRestartRun(const CompositeObjective& obj,
                                const Eigen::VectorXd& x0,
                                const SchemeParams& params, double f_star) {
  if (params.restart != RestartKind::kGradient) {
    throw std::invalid_argument(
        "GradientRestartRun: params.restart must be gradient");
  }
  return RunLoop(obj, x0, params, f_star, "gradient_restart");
}

IterateTrace RunScheme(const CompositeObjective& obj, const Eigen::VectorXd& x0,
                       const SchemeParams& params, double f_star) {
  switch (params.restart) {
    case RestartKind::kNone:
      return NesterovRun(obj, x0, params, f_star);
    case RestartKind::kSpeed:
      return SpeedRestartRun(obj, x0, params, f_star);
    case RestartKind::kGradient:
      return GradientRestartRun(obj, x0, params, f_star);
  }
  throw std::logic_error("unreachable restart kind");
}

void WriteTraceCsv(const IterateTrace& trace, std::ostream& out) {
  out << "k,f_gap,step_norm,restarted\n";
  for (long k = 0; k < trace.Size(); ++k) {
    out << k << ',' << FormatDouble(trace.f_gap[k]) << ','
        << FormatDouble(trace.step_norm[k]) << ','
        << (trace.restarted[k] ? 1 : 0) << '\n';
  }
}

}  // namespace nestode
