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

#include "nestode/problems.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <stdexcept>

#include "nestode/prox.hpp"
#include "nestode/rng.hpp"
#include "nestode/textio.hpp"

namespace nestode {

namespace {

// Stream tags for Rng::Split; fixed so the fill order is part of the format.
enum : std::uint64_t {
  kTagDesign = 0,
  kTagTarget = 1,
  kTagLabels = 2,
  kTagNoise = 3,
  kTagSignal = 4,
};

Eigen::MatrixXd GaussianMatrix(Rng& rng, Eigen::Index rows, Eigen::Index cols,
                               double stddev = 1.0) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      m(i, j) = rng.Gaussian(0.0, stddev);
    }
  }
  return m;
}

Eigen::VectorXd GaussianVector(Rng& rng, Eigen::Index n, double stddev = 1.0) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.Gaussian(0.0, stddev);
  return v;
}

std::vector<Eigen::Index> DistinctIndices(Rng& rng, Eigen::Index count,
                                          Eigen::Index n) {
  std::set<Eigen::Index> chosen;
  while (static_cast<Eigen::Index>(chosen.size()) < count) {
    chosen.insert(static_cast<Eigen::Index>(rng.Below(n)));
  }
  return {chosen.begin(), chosen.end()};
}

ProblemInstance MakeBase(const std::string& name, Scale scale,
                         std::uint64_t seed) {
  ProblemInstance inst;
  inst.name = name;
  inst.scale = scale;
  inst.seed = seed;
  return inst;
}

ProblemInstance GenQuadratic(Scale scale, std::uint64_t seed) {
  ProblemInstance inst = MakeBase("quadratic", scale, seed);
  const Eigen::Index n = scale == Scale::kDesk ? 50 : 500;
  Rng eig_rng = Rng::Split(seed, kTagDesign);
  Eigen::VectorXd lambda(n);
  // Endpoints pinned so L / mu = 1000 exactly.
  lambda[0] = 0.001;
  lambda[n - 1] = 1.0;
  for (Eigen::Index i = 1; i < n - 1; ++i) {
    lambda[i] = eig_rng.Uniform(0.001, 1.0);
  }
  Rng b_rng = Rng::Split(seed, kTagTarget);
  const Eigen::VectorXd b = GaussianVector(b_rng, n, 5.0);

  SmoothObjective g;
  g.n = n;
  g.lipschitz = 1.0;
  g.strong_convexity = 0.001;
  g.value = [lambda, b](const Eigen::VectorXd& x) {
    return 0.5 * x.dot(lambda.cwiseProduct(x)) + b.dot(x);
  };
  g.gradient = [lambda, b](const Eigen::VectorXd& x) {
    return Eigen::VectorXd(lambda.cwiseProduct(x) + b);
  };
  inst.objective = {g, ProxSpec::Zero()};
  inst.x0 = Eigen::VectorXd::Zero(n);
  inst.x_star = -b.cwiseQuotient(lambda);
  inst.f_star = -0.5 * b.cwiseQuotient(lambda).dot(b);
  inst.has_reference = true;
  inst.f_star_exact = true;
  return inst;
}

void FillLeastSquares(ProblemInstance& inst, const Eigen::MatrixXd& a,
                      const Eigen::VectorXd& b, double coeff) {
  inst.objective.g = MakeLeastSquares(a, b, coeff);
  inst.a = a;
  inst.b = b;
  inst.x0 = Eigen::VectorXd::Zero(a.cols());
}

ProblemInstance GenLassoFat(Scale scale, std::uint64_t seed) {
  ProblemInstance inst = MakeBase("lasso_fat", scale, seed);
  const Eigen::Index m = scale == Scale::kDesk ? 10 : 100;
  const Eigen::Index p = scale == Scale::kDesk ? 50 : 500;
  Rng a_rng = Rng::Split(seed, kTagDesign);
  Rng b_rng = Rng::Split(seed, kTagTarget);
  FillLeastSquares(inst, GaussianMatrix(a_rng, m, p),
                   GaussianVector(b_rng, m, 5.0), 0.5);
  inst.objective.h = ProxSpec::L1(4.0);
  return inst;
}

ProblemInstance GenNlsFat(Scale scale, std::uint64_t seed) {
  ProblemInstance inst = MakeBase("nls_fat", scale, seed);
  const Eigen::Index m = scale == Scale::kDesk ? 10 : 100;
  const Eigen::Index p = scale == Scale::kDesk ? 50 : 500;
  Rng a_rng = Rng::Split(seed, kTagDesign);
  Rng b_rng = Rng::Split(seed, kTagTarget);
  FillLeastSquares(inst, GaussianMatrix(a_rng, m, p),
                   GaussianVector(b_rng, m, 5.0), 1.0);
  inst.objective.h = ProxSpec::Nonneg();
  return inst;
}

Eigen::VectorXd LogisticLabels(Rng& rng, const Eigen::MatrixXd& a,
                               const Eigen::VectorXd& truth) {
  const Eigen::VectorXd z = a * truth;
  Eigen::VectorXd y(a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    y[i] = rng.Uniform() < 1.0 / (1.0 + std::exp(-z[i])) ? 1.0 : 0.0;
  }
  return y;
}

ProblemInstance GenLogistic(Scale scale, std::uint64_t seed) {
  ProblemInstance inst = MakeBase("logistic", scale, seed);
  const Eigen::Index m = scale == Scale::kDesk ? 50 : 500;
  const Eigen::Index p = scale == Scale::kDesk ? 10 : 100;
  Rng a_rng = Rng::Split(seed, kTagDesign);
  const Eigen::MatrixXd a = GaussianMatrix(a_rng, m, p);
  Rng t_rng = Rng::Split(seed, kTagSignal);
  const Eigen::VectorXd truth = GaussianVector(t_rng, p, 0.1);
  Rng l_rng = Rng::Split(seed, kTagLabels);
  inst.objective = {MakeLogistic(a, LogisticLabels(l_rng, a, truth)),
                    ProxSpec::Zero()};
  inst.x0 = Eigen::VectorXd::Zero(p);
  return inst;
}

ProblemInstance GenL1Logistic(Scale scale, std::uint64_t seed) {
  ProblemInstance inst = MakeBase("l1_logistic", scale, seed);
  const Eigen::Index m = scale == Scale::kDesk ? 20 : 200;
  const Eigen::Index p = scale == Scale::kDesk ? 100 : 1000;
  Rng a_rng = Rng::Split(seed, kTagDesign);
  const Eigen::MatrixXd a = GaussianMatrix(a_rng, m, p);
  Rng t_rng = Rng::Split(seed, kTagSignal);
  Eigen::VectorXd truth = Eigen::VectorXd::Zero(p);
  const Eigen::Index sparsity = std::max<Eigen::Index>(1, p / 100);
  for (Eigen::Index i : DistinctIndices(t_rng, sparsity, p)) {
    truth[i] = t_rng.Gaussian(0.0, 15.0);
  }
  Rng l_rng = Rng::Split(seed, kTagLabels);
  inst.objective = {MakeLogistic(a, LogisticLabels(l_rng, a, truth)),
                    ProxSpec::L1(5.0)};
  inst.x0 = Eigen::VectorXd::Zero(p);
  return inst;
}

ProblemInstance GenLogSumExp(Scale scale, std::uint64_t seed) {
  ProblemInstance inst = MakeBase("log_sum_exp", scale, seed);
  const Eigen::Index m = scale == Scale::kDesk ? 20 : 200;
  const Eigen::Index n = scale == Scale::kDesk ? 5 : 50;
  Rng a_rng = Rng::Split(seed, kTagDesign);
  Rng b_rng = Rng::Split(seed, kTagTarget);
  inst.objective = {MakeLogSumExp(GaussianMatrix(a_rng, m, n),
                                  GaussianVector(b_rng, m, std::sqrt(2.0)),
                                  20.0),
                    ProxSpec::Zero()};
  inst.x0 = Eigen::VectorXd::Zero(n);
  return inst;
}

ProblemInstance GenMatrixCompletion(Scale scale, std::uint64_t seed) {
  ProblemInstance inst = MakeBase("matrix_completion", scale, seed);
  const Eigen::Index d = scale == Scale::kDesk ? 30 : 300;
  const Eigen::Index rank = scale == Scale::kDesk ? 2 : 5;
  Rng u_rng = Rng::Split(seed, kTagDesign);
  const Eigen::MatrixXd gu = GaussianMatrix(u_rng, d, rank);
  const Eigen::MatrixXd gv = GaussianMatrix(u_rng, d, rank);
  const Eigen::MatrixXd qu =
      Eigen::HouseholderQR<Eigen::MatrixXd>(gu).householderQ() *
      Eigen::MatrixXd::Identity(d, rank);
  const Eigen::MatrixXd qv =
      Eigen::HouseholderQR<Eigen::MatrixXd>(gv).householderQ() *
      Eigen::MatrixXd::Identity(d, rank);
  Eigen::VectorXd sv(rank);
  for (Eigen::Index i = 0; i < rank; ++i) sv[i] = static_cast<double>(i + 1);
  const Eigen::MatrixXd truth = qu * sv.asDiagonal() * qv.transpose();

  // Row-major vectorization, matching the nuclear prox layout.
  const Eigen::Index nn = d * d;
  Eigen::VectorXd target(nn), mask(nn);
  Rng mask_rng = Rng::Split(seed, kTagLabels);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      target[i * d + j] = truth(i, j);
      mask[i * d + j] = mask_rng.Uniform() < 0.1 ? 1.0 : 0.0;
    }
  }

  SmoothObjective g;
  g.n = nn;
  g.lipschitz = 1.0;  // entrywise observation operator has unit norm
  g.value = [mask, target](const Eigen::VectorXd& x) {
    return 0.5 * (mask.cwiseProduct(x - target)).squaredNorm();
  };
  g.gradient = [mask, target](const Eigen::VectorXd& x) {
    return Eigen::VectorXd(mask.cwiseProduct(x - target));
  };
  inst.objective = {g, ProxSpec::Nuclear(0.05, d, d)};
  inst.x0 = Eigen::VectorXd::Zero(nn);
  return inst;
}

ProblemInstance GenSlope(Scale scale, std::uint64_t seed) {
  ProblemInstance inst = MakeBase("slope", scale, seed);
  const Eigen::Index m = scale == Scale::kDesk ? 100 : 1000;
  const Eigen::Index p = scale == Scale::kDesk ? 1000 : 10000;
  Rng a_rng = Rng::Split(seed, kTagDesign);
  const Eigen::MatrixXd a = GaussianMatrix(a_rng, m, p);
  Rng t_rng = Rng::Split(seed, kTagSignal);
  Eigen::VectorXd truth = Eigen::VectorXd::Zero(p);
  const Eigen::Index sparsity = std::max<Eigen::Index>(2, p / 500);
  for (Eigen::Index i : DistinctIndices(t_rng, sparsity, p)) {
    truth[i] = t_rng.Gaussian(0.0, 5.0);
  }
  Rng z_rng = Rng::Split(seed, kTagNoise);
  const Eigen::VectorXd b = a * truth + GaussianVector(z_rng, m);
  FillLeastSquares(inst, a, b, 0.5);

  Eigen::VectorXd weights(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    weights[i] = 1.1 * InverseNormalCdf(1.0 - 0.05 * static_cast<double>(i + 1) /
                                                  (2.0 * static_cast<double>(p)));
  }
  inst.objective.h = ProxSpec::SortedL1(weights);
  return inst;
}

ProblemInstance GenLassoL1Ball(Scale scale, std::uint64_t seed) {
  if (scale == Scale::kPaper) {
    throw std::invalid_argument(
        "lasso_l1ball: published scale (5000x50000) needs sparse kernels; "
        "only desk scale is supported");
  }
  ProblemInstance inst = MakeBase("lasso_l1ball", scale, seed);
  const Eigen::Index m = 50, p = 500;
  Rng a_rng = Rng::Split(seed, kTagDesign);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, p);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      // Sparse-ish design: desk keeps the entry variance 0.04 but raises
      // the fill rate to 5% so columns are not empty at this size.
      const double u = a_rng.Uniform();
      if (u < 0.05) a(i, j) = a_rng.Gaussian(0.0, 0.2);
    }
  }
  Rng t_rng = Rng::Split(seed, kTagSignal);
  Eigen::VectorXd truth = Eigen::VectorXd::Zero(p);
  for (Eigen::Index i : DistinctIndices(t_rng, 3, p)) truth[i] = 4.0;
  Rng z_rng = Rng::Split(seed, kTagNoise);
  const Eigen::VectorXd b = a * truth + GaussianVector(z_rng, m);
  FillLeastSquares(inst, a, b, 0.5);
  inst.objective.h = ProxSpec::L1Ball(truth.lpNorm<1>());
  return inst;
}

std::string CachePath(const std::string& dir, const ProblemInstance& inst) {
  return dir + "/" + inst.name + "-" + ScaleName(inst.scale) + "-" +
         std::to_string(inst.seed) + ".txt";
}

bool LoadReference(ProblemInstance& inst, const std::string& path) {
  if (!std::filesystem::exists(path)) return false;
  const TextRecord record = LoadTextRecord(path);
  const auto refs = record.Named("reference");
  if (refs.empty()) return false;
  const TextSection& s = *refs.front();
  if (s.Get("name") != inst.name || s.Get("scale") != ScaleName(inst.scale) ||
      s.GetLong("seed") != static_cast<long>(inst.seed)) {
    return false;
  }
  inst.f_star = s.GetDouble("f_star");
  inst.x_star = DecodeVector(s.Get("x_star"));
  inst.low_confidence = s.GetLong("low_confidence") != 0;
  inst.has_reference = true;
  return true;
}

void SaveReference(const ProblemInstance& inst, const std::string& path) {
  TextRecord record;
  TextSection s;
  s.name = "reference";
  s.keys["name"] = inst.name;
  s.keys["scale"] = ScaleName(inst.scale);
  s.keys["seed"] = std::to_string(inst.seed);
  s.keys["f_star"] = FormatDouble(inst.f_star);
  s.keys["x_star"] = EncodeVector(inst.x_star);
  s.keys["low_confidence"] = inst.low_confidence ? "1" : "0";
  record.sections.push_back(std::move(s));
  SaveTextRecord(record, path);
}

}  // namespace

Scale ParseScale(const std::string& text) {
  if (text == "desk") return Scale::kDesk;
  if (text == "paper") return Scale::kPaper;
  throw std::invalid_argument("unknown scale '" + text + "'");
}

std::string ScaleName(Scale scale) {
  return scale == Scale::kDesk ? "desk" : "paper";
}

const std::vector<std::string>& ProblemNames() {
  static const std::vector<std::string> names = {
      "quadratic",   "lasso_fat",   "nls_fat",
      "logistic",    "l1_logistic", "log_sum_exp",
      "matrix_completion", "slope", "lasso_l1ball",
  };
  return names;
}

ProblemInstance Generate(const std::string& name, Scale scale,
                         std::uint64_t seed) {
  if (name == "quadratic") return GenQuadratic(scale, seed);
  if (name == "lasso_fat") return GenLassoFat(scale, seed);
  if (name == "nls_fat") return GenNlsFat(scale, seed);
  if (name == "logistic") return GenLogistic(scale, seed);
  if (name == "l1_logistic") return GenL1Logistic(scale, seed);
  if (name == "log_sum_exp") return GenLogSumExp(scale, seed);
  if (name == "matrix_completion") return GenMatrixCompletion(scale, seed);
  if (name == "slope") return GenSlope(scale, seed);
  if (name == "lasso_l1ball") return GenLassoL1Ball(scale, seed);
  throw std::invalid_argument("unknown problem '" + name + "'");
}

void EnsureReference(ProblemInstance& inst, const std::string& cache_dir,
                     long budget) {
  if (inst.has_reference) return;
  std::string path;
  if (!cache_dir.empty()) {
    std::filesystem::create_directories(cache_dir);
    path = CachePath(cache_dir, inst);
    if (LoadReference(inst, path)) return;
  }

  // Step-norm-restarted proximal scheme, trace-free to keep memory flat.
  const CompositeObjective& obj = inst.objective;
  const double s = 1.0 / obj.g.lipschitz;
  Eigen::VectorXd x_prev = inst.x0;
  Eigen::VectorXd y = inst.x0;
  double prev_step = 0.0;
  double best_f = obj.Eval(inst.x0);
  Eigen::VectorXd best_x = inst.x0;
  long j = 1;
  bool converged = false;
  for (long k = 1; k <= budget; ++k) {
    const Eigen::VectorXd x = Prox(obj.h, y - s * obj.g.Grad(y), s);
    const double f = obj.Eval(x);
    const double step = (x - x_prev).norm();
    const bool reset = step < prev_step && j >= 10;
    j = reset ? 1 : j + 1;
    const double momentum =
        static_cast<double>(j - 1) / (static_cast<double>(j) + 2.0);
    y = x + momentum * (x - x_prev);
    if (f < best_f) {
      best_f = f;
      best_x = x;
    }
    x_prev = x;
    prev_step = step;
    if (k % 50 == 0 && ProximalSubgradient(obj, x, s).norm() <= 1e-13) {
      // Report the iterate that passed the certificate, not merely the
      // lowest value seen: x_star must satisfy the gradient-mapping
      // tolerance that callers rely on.
      best_f = std::min(best_f, f);
      best_x = x;
      converged = true;
      break;
    }
  }
  inst.f_star = best_f;
  inst.x_star = best_x;
  inst.low_confidence = !converged;
  inst.has_reference = true;
  if (!path.empty()) SaveReference(inst, path);
}

double InverseNormalCdf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("inverse normal cdf: p must be in (0, 1)");
  }
  // Rational approximation (central + tail pieces), then one Halley step
  // against erfc to push the error to near round-off.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double bb[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double t = q * q;
    x = (((((a[0] * t + a[1]) * t + a[2]) * t + a[3]) * t + a[4]) * t + a[5]) *
        q /
        (((((bb[0] * t + bb[1]) * t + bb[2]) * t + bb[3]) * t + bb[4]) * t +
         1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
          c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2.0 * 3.14159265358979323846) *
                   std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

}  // namespace nestode
