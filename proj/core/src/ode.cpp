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

#include "nestode/ode.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

#include "nestode/prox.hpp"
#include "nestode/schemes.hpp"
#include "nestode/textio.hpp"

namespace nestode {

namespace {

// Beyond this norm the trajectory is treated as divergent; explicit Euler
// past the stability threshold grows geometrically, so any such state only
// gets worse.
constexpr double kDivergenceNorm = 1e140;
constexpr long double kPi = 3.14159265358979323846264338327950288L;

/// Ascending series J_nu(u) = sum_m (-1)^m (u/2)^(nu+2m) / (m! Gamma(m+nu+1)),
/// in long double to absorb the cancellation near the switch point.
long double BesselSeries(long double nu, long double u) {
  if (u == 0.0L) return nu == 0.0L ? 1.0L : 0.0L;
  const long double q = 0.25L * u * u;
  long double term =
      std::exp(nu * std::log(0.5L * u) - std::lgamma(nu + 1.0L));
  long double sum = term;
  for (int m = 1; m <= 200; ++m) {
    term *= -q / (static_cast<long double>(m) * (static_cast<long double>(m) + nu));
    sum += term;
    if (std::abs(term) < 1e-25L * (std::abs(sum) + 1e-30L)) break;
  }
  return sum;
}

/// Hankel asymptotic expansion, truncated adaptively at the smallest term:
/// J_nu(u) ~ sqrt(2/(pi u)) [P cos(chi) - Q sin(chi)],
/// chi = u - nu pi/2 - pi/4, with coefficients
/// a_k = prod_{j=1..k} (4 nu^2 - (2j-1)^2) / (k! 8^k).
long double BesselAsymptotic(long double nu, long double u) {
  const long double mu = 4.0L * nu * nu;
  long double p = 1.0L, q = 0.0L;
  long double a = 1.0L;        // a_k / u^k
  long double smallest = 1.0L;
  for (int k = 1; k <= 40; ++k) {
    const long double odd = 2.0L * k - 1.0L;
    a *= (mu - odd * odd) / (8.0L * k * u);
    if (std::abs(a) >= smallest) break;  // divergent tail reached
    smallest = std::abs(a);
    if (k % 2 == 1) {
      q += (k % 4 == 1) ? a : -a;
    } else {
      p += (k % 4 == 2) ? -a : a;
    }
    if (smallest < 1e-22L) break;
  }
  const long double chi = u - nu * 0.5L * kPi - 0.25L * kPi;
  return std::sqrt(2.0L / (kPi * u)) *
         (p * std::cos(chi) - q * std::sin(chi));
}

struct GradientModel {
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)>
      force;  // (X, Z) -> gradient or directional subgradient at X
  // Optional end-of-step correction for nonsmooth dynamics; receives the
  // pre-step position alongside the updated state.
  std::function<void(const Eigen::VectorXd& x_before, Eigen::VectorXd& x,
                     Eigen::VectorXd& z)>
      settle;
};

ContinuousTrace IntegrateModel(const GradientModel& model,
                               const Eigen::VectorXd& x0,
                               const OdeParams& params, double f_star) {
  if (params.dt <= 0.0) throw std::invalid_argument("ode: dt must be > 0");
  if (params.horizon < params.dt) {
    throw std::invalid_argument("ode: horizon must be >= dt");
  }
  if (params.r < 0.0) throw std::invalid_argument("ode: r must be >= 0");
  const double dt = params.dt;
  const double delta = params.delta > 0.0 ? params.delta : dt;
  const long n_steps = static_cast<long>(std::floor(params.horizon / dt));

  ContinuousTrace trace;
  trace.params = params;
  trace.params.delta = delta;
  trace.f_star = f_star;
  trace.t.reserve(n_steps + 1);
  trace.x.reserve(n_steps + 1);
  trace.v.reserve(n_steps + 1);
  trace.f_gap.reserve(n_steps + 1);
  trace.restarted.reserve(n_steps + 1);

  Eigen::VectorXd x = x0;
  Eigen::VectorXd z = Eigen::VectorXd::Zero(x0.size());
  double t_clock = 0.0;  // damping clock; equals t unless restarts fire
  bool reset_pending = false;
  double last_reset = -1.0;

  for (long k = 0; k <= n_steps; ++k) {
    const double t = k * dt;
    const double f = model.value(x);
    if (!x.allFinite() || !std::isfinite(f) || x.norm() > kDivergenceNorm) {
      throw DivergenceError("integration diverged at t = " + FormatDouble(t),
                            t);
    }
    trace.t.push_back(t);
    trace.x.push_back(x);
    trace.v.push_back(z);
    trace.f_gap.push_back(f - f_star);
    trace.restarted.push_back(reset_pending);
    if (reset_pending) {
      trace.restart_times.push_back(t);
      reset_pending = false;
    }
    if (k == n_steps) break;

    const Eigen::VectorXd g = model.force(x, z);
    const double damp = 1.0 - params.r * dt / std::max(delta, t_clock);
    Eigen::VectorXd z_next = damp * z - dt * g;
    const Eigen::VectorXd x_before = x;
    x += dt * z;

    if (params.restart && z.squaredNorm() > 0.0 &&
        (last_reset < 0.0 ? t : t - last_reset) >= 10.0 * dt &&
        z.dot(z_next - z) <= 0.0) {
      // Velocity stopped growing: reset the damping clock. The state is
      // untouched; only the friction term sees a fresh t.
      t_clock = 0.0;
      last_reset = t + dt;
      reset_pending = true;
    } else {
      t_clock += dt;
    }
    z = z_next;
    if (model.settle) model.settle(x_before, x, z);
  }
  return trace;
}

}  // namespace

double BesselJNu(double nu, double u) {
  if (nu < 0.0 || u < 0.0) {
    throw std::invalid_argument("bessel: nu and u must be >= 0");
  }
  const long double lnu = nu, lu = u;
  if (u < 25.0) return static_cast<double>(BesselSeries(lnu, lu));
  return static_cast<double>(BesselAsymptotic(lnu, lu));
}

double BesselJ1(double u) { return BesselJNu(1.0, u); }

Eigen::VectorXd QuadraticClosedForm(const QuadraticSpec& spec,
                                    const Eigen::VectorXd& x0, double t,
                                    double r) {
  if (spec.eigenvalues.size() != x0.size()) {
    throw std::invalid_argument("closed form: dimension mismatch");
  }
  if (t < 0.0) throw std::invalid_argument("closed form: t must be >= 0");
  if (r < 1.0) throw std::invalid_argument("closed form: r must be >= 1");
  if (r != 3.0) {
    const double lo = spec.eigenvalues.minCoeff();
    const double hi = spec.eigenvalues.maxCoeff();
    if (hi - lo > 1e-12 * std::max(hi, 1.0)) {
      throw std::invalid_argument(
          "closed form: r != 3 needs equal eigenvalues");
    }
  }
  const double nu = 0.5 * (r - 1.0);
  // 2^nu Gamma(nu+1) J_nu(u) / u^nu, extended by its limit 1 at u = 0.
  const auto profile = [nu](double u) {
    if (u < 1e-4) {
      const double q = 0.25 * u * u;
      return 1.0 - q / (nu + 1.0) + q * q / (2.0 * (nu + 1.0) * (nu + 2.0));
    }
    const double scale =
        std::exp(nu * (std::log(2.0) - std::log(u)) + std::lgamma(nu + 1.0));
    return scale * BesselJNu(nu, u);
  };
  Eigen::VectorXd out(x0.size());
  for (Eigen::Index i = 0; i < x0.size(); ++i) {
    out[i] = profile(t * std::sqrt(spec.eigenvalues[i])) * x0[i];
  }
  return out;
}

ContinuousTrace Integrate(const SmoothObjective& obj, const Eigen::VectorXd& x0,
                          const OdeParams& params, double f_star) {
  if (obj.n != x0.size()) {
    throw std::invalid_argument("integrate: dimension mismatch");
  }
  GradientModel model;
  model.value = [&obj](const Eigen::VectorXd& x) { return obj.value(x); };
  model.force = [&obj](const Eigen::VectorXd& x, const Eigen::VectorXd&) {
    return obj.gradient(x);
  };
  return IntegrateModel(model, x0, params, f_star);
}

ContinuousTrace IntegrateCompositeLasso(const Eigen::MatrixXd& a,
                                        const Eigen::VectorXd& y,
                                        double lambda,
                                        const Eigen::VectorXd& x0,
                                        const OdeParams& params,
                                        double f_star) {
  if (a.cols() != x0.size() || a.rows() != y.size()) {
    throw std::invalid_argument("composite ode: dimension mismatch");
  }
  if (lambda < 0.0) {
    throw std::invalid_argument("composite ode: lambda must be >= 0");
  }
  GradientModel model;
  model.value = [&a, &y, lambda](const Eigen::VectorXd& x) {
    return 0.5 * (a * x - y).squaredNorm() + lambda * x.lpNorm<1>();
  };
  model.force = [&a, &y, lambda](const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& z) {
    return LassoDirectionalSubgradient(a, y, lambda, x, z);
  };
  if (lambda > 0.0) {
    // The exact dynamics hold a coordinate at zero while |A_i^T(Ax - y)|
    // stays within lambda; the forward-Euler state only dithers around
    // zero instead, and the alternating sign forces slowly pump energy
    // into the design's null space. Settle a coordinate exactly at zero
    // when the step crossed it and the subdifferential there can absorb
    // its force; the third branch of the directional subgradient then
    // releases it as soon as |A_i^T(Ax - y)| exceeds lambda again.
    model.settle = [&a, &y, lambda](const Eigen::VectorXd& x_before,
                                    Eigen::VectorXd& x, Eigen::VectorXd& z) {
      bool crossed = false;
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (x_before[i] * x[i] < 0.0) {
          crossed = true;
          break;
        }
      }
      if (!crossed) return;
      const Eigen::VectorXd c = a.transpose() * (a * x - y);
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (x_before[i] * x[i] < 0.0 && std::abs(c[i]) <= lambda) {
          x[i] = 0.0;
          z[i] = 0.0;
        }
      }
    };
  }
  return IntegrateModel(model, x0, params, f_star);
}

void WriteTraceCsv(const ContinuousTrace& trace, std::ostream& out,
                   bool with_coordinates) {
  const Eigen::Index n = trace.x.empty() ? 0 : trace.x.front().size();
  const bool coords = with_coordinates && n > 0 && n <= 4;
  out << "t,f_gap,speed,restarted";
  if (coords) {
    for (Eigen::Index i = 0; i < n; ++i) out << ",x" << i;
  }
  out << '\n';
  for (long k = 0; k < trace.Size(); ++k) {
    out << FormatDouble(trace.t[k]) << ',' << FormatDouble(trace.f_gap[k])
        << ',' << FormatDouble(trace.v[k].norm()) << ','
        << (trace.restarted[k] ? 1 : 0);
    if (coords) {
      for (Eigen::Index i = 0; i < n; ++i) {
        out << ',' << FormatDouble(trace.x[k][i]);
      }
    }
    out << '\n';
  }
}

}  // namespace nestode
