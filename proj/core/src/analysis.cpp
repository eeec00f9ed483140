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

#include "nestode/analysis.hpp"

#include <cmath>
#include <stdexcept>

namespace nestode {

namespace {

/// Replays the momentum recursion over the stored iterates and hands every
/// (k, x_k, y_k) to the callback. Restart traces reuse the recorded flags,
/// so the reconstruction matches the run exactly.
template <typename Callback>
void ReplayY(const IterateTrace& trace, Callback&& cb) {
  const double r = trace.params.r;
  Eigen::VectorXd y = trace.x.front();
  cb(0L, trace.x.front(), y);
  long j = 1;
  for (long k = 1; k < trace.Size(); ++k) {
    if (trace.params.restart == RestartKind::kNone) {
      j = k;
    } else {
      j = trace.restarted[k] ? 1 : j + 1;
    }
    const double momentum =
        static_cast<double>(j - 1) / (static_cast<double>(j) + r - 1.0);
    y = trace.x[k] + momentum * (trace.x[k] - trace.x[k - 1]);
    cb(k, trace.x[k], y);
  }
}

}  // namespace

EnergySeries EnergyContinuous(const ContinuousTrace& trace,
                              const Eigen::VectorXd& x_star,
                              EnergyVariant variant,
                              const EnergyParams& params) {
  const double r = params.r;
  EnergySeries series;
  series.variant = variant;
  series.grid = trace.t;
  series.values.reserve(trace.Size());
  switch (variant) {
    case EnergyVariant::kContinuousR3:
      for (long i = 0; i < trace.Size(); ++i) {
        const double t = trace.t[i];
        series.values.push_back(
            t * t * trace.f_gap[i] +
            2.0 * (trace.x[i] + 0.5 * t * trace.v[i] - x_star).squaredNorm());
      }
      break;
    case EnergyVariant::kContinuousR:
      if (r <= 1.0) throw std::invalid_argument("energy: r must be > 1");
      for (long i = 0; i < trace.Size(); ++i) {
        const double t = trace.t[i];
        series.values.push_back(
            2.0 * t * t / (r - 1.0) * trace.f_gap[i] +
            (r - 1.0) *
                (trace.x[i] + t / (r - 1.0) * trace.v[i] - x_star)
                    .squaredNorm());
      }
      series.warning = r <= 3.0;
      break;
    case EnergyVariant::kContinuousAlpha: {
      if (params.mu <= 0.0) {
        throw std::invalid_argument("energy: alpha variant needs mu > 0");
      }
      const double a = params.alpha;
      if (a < 2.0 || a > 2.0 * r / 3.0) {
        throw std::invalid_argument("energy: need 2 <= alpha <= 2r/3");
      }
      for (long i = 0; i < trace.Size(); ++i) {
        const double t = trace.t[i];
        const double ta2 = t == 0.0 ? (a == 2.0 ? 1.0 : 0.0)
                                    : std::pow(t, a - 2.0);
        series.values.push_back(
            std::pow(t, a) * trace.f_gap[i] +
            (2.0 * r - a) * (2.0 * r - a) * ta2 / 8.0 *
                (trace.x[i] + 2.0 * t / (2.0 * r - a) * trace.v[i] - x_star)
                    .squaredNorm());
      }
      break;
    }
    default:
      throw std::invalid_argument("energy: discrete variant on a continuous trace");
  }
  return series;
}

EnergySeries EnergyDiscrete(const IterateTrace& trace,
                            const Eigen::VectorXd& x_star,
                            EnergyVariant variant) {
  const double r = trace.params.r;
  const double s = trace.params.s;
  EnergySeries series;
  series.variant = variant;
  series.grid.reserve(trace.Size());
  series.values.reserve(trace.Size());
  switch (variant) {
    case EnergyVariant::kDiscreteR:
      ReplayY(trace, [&](long k, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& y) {
        const double kk = static_cast<double>(k);
        const Eigen::VectorXd z =
            ((kk + r - 1.0) * y - kk * x) / (r - 1.0);
        series.grid.push_back(kk);
        series.values.push_back(2.0 * (kk + r - 2.0) * (kk + r - 2.0) * s /
                                    (r - 1.0) * trace.f_gap[k] +
                                (r - 1.0) * (z - x_star).squaredNorm());
      });
      series.warning = r <= 3.0;
      break;
    case EnergyVariant::kDiscreteT3:
      ReplayY(trace, [&](long k, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& y) {
        const double kk = static_cast<double>(k);
        series.grid.push_back(kk);
        series.values.push_back(
            s * (2.0 * kk + 3.0 * r - 5.0) * (2.0 * kk + 2.0 * r - 5.0) *
                (4.0 * kk + 4.0 * r - 9.0) / 16.0 * trace.f_gap[k] +
            (2.0 * kk + 3.0 * r - 5.0) / 16.0 *
                (2.0 * (kk + r - 1.0) * y - (2.0 * kk + 1.0) * x -
                 (2.0 * r - 3.0) * x_star)
                    .squaredNorm());
      });
      series.warning = r <= 3.0;
      break;
    default:
      throw std::invalid_argument("energy: continuous variant on a discrete trace");
  }
  return series;
}

std::vector<double> ScaledError(const ContinuousTrace& trace, double power) {
  if (power <= 0.0) throw std::invalid_argument("scaled error: power <= 0");
  std::vector<double> out(trace.Size());
  for (long i = 0; i < trace.Size(); ++i) {
    out[i] = std::pow(trace.t[i], power) * trace.f_gap[i];
  }
  return out;
}

std::vector<double> ScaledError(const IterateTrace& trace, double power) {
  if (power <= 0.0) throw std::invalid_argument("scaled error: power <= 0");
  const double scale = std::pow(trace.params.s, 0.5 * power);
  std::vector<double> out(trace.Size());
  for (long k = 0; k < trace.Size(); ++k) {
    out[k] = scale * std::pow(static_cast<double>(k), power) * trace.f_gap[k];
  }
  return out;
}

std::vector<double> OscillationRoots(const ContinuousTrace& trace,
                                     Eigen::Index coordinate,
                                     double x_star_coord) {
  std::vector<double> roots;
  if (trace.Size() == 0) return roots;
  const double scale =
      std::abs(trace.x.front()[coordinate] - x_star_coord);
  if (scale == 0.0) return roots;  // zero-signal guard
  const double floor_mag = 1e-13 * scale;
  double prev = 0.0;
  double prev_t = 0.0;
  bool have_prev = false;
  for (long i = 0; i < trace.Size(); ++i) {
    const double d = trace.x[i][coordinate] - x_star_coord;
    if (std::abs(d) < floor_mag) continue;  // numerically zero sample
    if (have_prev && prev * d < 0.0) {
      const double t =
          prev_t + (trace.t[i] - prev_t) * (-prev) / (d - prev);
      roots.push_back(t);
    }
    prev = d;
    prev_t = trace.t[i];
    have_prev = true;
  }
  return roots;
}

double VelocityRatioMax(const ContinuousTrace& trace, double t_end) {
  if (trace.Size() == 0 || t_end > trace.t.back() + 1e-12) {
    throw std::invalid_argument("velocity ratio: t_end beyond trace horizon");
  }
  double best = 0.0;
  for (long i = 0; i < trace.Size(); ++i) {
    const double t = trace.t[i];
    if (t <= 0.0 || t > t_end) continue;
    best = std::max(best, trace.v[i].norm() / t);
  }
  return best;
}

double SchemeOdeDeviation(const IterateTrace& itrace,
                          const ContinuousTrace& ctrace, double s) {
  if (s <= 0.0) throw std::invalid_argument("deviation: s must be > 0");
  const double sqrt_s = std::sqrt(s);
  const double horizon = ctrace.t.back();
  if (static_cast<double>(itrace.Size() - 1) * sqrt_s > horizon + 1e-9) {
    throw std::invalid_argument("deviation: continuous horizon too short");
  }
  const double dt = ctrace.params.dt;
  double worst = 0.0;
  for (long k = 0; k < itrace.Size(); ++k) {
    const double t = static_cast<double>(k) * sqrt_s;
    const long i = std::min(static_cast<long>(t / dt),
                            static_cast<long>(ctrace.Size() - 2));
    const double w = (t - ctrace.t[i]) / dt;
    const Eigen::VectorXd xt =
        (1.0 - w) * ctrace.x[i] + w * ctrace.x[i + 1];
    worst = std::max(worst, (itrace.x[k] - xt).norm());
  }
  return worst;
}

RateFit LinearRateFit(const IterateTrace& trace, long k_lo, long k_hi) {
  if (k_lo < 0 || k_hi >= trace.Size() || k_lo >= k_hi) {
    throw std::invalid_argument("rate fit: bad window");
  }
  const long n = k_hi - k_lo + 1;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (long k = k_lo; k <= k_hi; ++k) {
    if (trace.f_gap[k] <= 0.0) {
      throw std::invalid_argument("rate fit: nonpositive gap at k = " +
                                  std::to_string(k));
    }
    const double x = static_cast<double>(k);
    const double y = std::log(trace.f_gap[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double nn = static_cast<double>(n);
  const double cov = sxy - sx * sy / nn;
  const double var_x = sxx - sx * sx / nn;
  const double var_y = syy - sy * sy / nn;
  RateFit fit;
  fit.slope = cov / var_x;
  fit.r_squared = var_y == 0.0 ? 1.0 : cov * cov / (var_x * var_y);
  return fit;
}

std::vector<double> MajorPeakTimes(const std::vector<double>& t,
                                   const std::vector<double>& v,
                                   double half_window) {
  std::vector<std::size_t> maxima;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    if (v[i] > v[i - 1] && v[i] >= v[i + 1]) maxima.push_back(i);
  }
  std::vector<double> out;
  for (std::size_t a : maxima) {
    bool dominant = true;
    for (std::size_t b : maxima) {
      if (b == a || std::abs(t[b] - t[a]) > half_window) continue;
      if (v[b] > v[a] || (v[b] == v[a] && b < a)) {
        dominant = false;
        break;
      }
    }
    if (dominant) out.push_back(t[a]);
  }
  return out;
}

}  // namespace nestode
