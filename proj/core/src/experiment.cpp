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

#include "nestode/experiment.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include "nestode/analysis.hpp"
#include "nestode/ode.hpp"
#include "nestode/prox.hpp"
#include "nestode/rng.hpp"

namespace nestode {

namespace {

RunSpec ParseRunSection(const TextSection& s) {
  RunSpec run;
  run.id = s.Get("id");
  run.kind = s.GetOr("kind", "scheme");
  if (run.kind == "scheme" || run.kind == "gd") {
    const std::string restart = s.GetOr("restart", "none");
    if (restart == "none") {
      run.scheme.restart = RestartKind::kNone;
    } else if (restart == "speed") {
      run.scheme.restart = RestartKind::kSpeed;
    } else if (restart == "gradient") {
      run.scheme.restart = RestartKind::kGradient;
    } else {
      throw ConfigError("run '" + run.id + "': unknown restart '" + restart +
                        "'");
    }
    run.scheme.r = s.GetDoubleOr("r", 3.0);
    run.scheme.k_max = s.GetLong("k_max");
    run.scheme.k_min = s.GetLongOr("k_min", 10);
    run.scheme.allow_large_step = s.GetLongOr("allow_large_step", 0) != 0;
    const std::string step = s.GetOr("s", "auto");
    if (step == "auto") {
      run.s_auto = true;
    } else {
      run.s_auto = false;
      run.scheme.s = ParseDouble(step);
    }
    if (run.scheme.k_max <= 0) {
      throw ConfigError("run '" + run.id + "': k_max must be positive");
    }
  } else if (run.kind == "ode" || run.kind == "ode_lasso") {
    run.r = s.GetDoubleOr("r", 3.0);
    run.dt = s.GetDouble("dt");
    run.horizon = s.GetDouble("horizon");
    run.delta = s.GetDoubleOr("delta", 0.0);
    run.ode_restart = s.GetLongOr("restart", 0) != 0;
    run.with_coordinates = s.GetLongOr("coordinates", 0) != 0;
    if (run.dt <= 0.0 || run.horizon < run.dt) {
      throw ConfigError("run '" + run.id + "': need dt > 0 and horizon >= dt");
    }
  } else {
    throw ConfigError("run '" + run.id + "': unknown kind '" + run.kind + "'");
  }
  return run;
}

AnalysisSpec ParseAnalysisSection(const TextSection& s) {
  AnalysisSpec a;
  a.kind = s.Get("kind");
  a.run = s.Get("run");
  a.run2 = s.GetOr("run2", "");
  a.power = s.GetDoubleOr("power", 2.0);
  a.variant = s.GetOr("variant", "");
  a.k_lo = s.GetLongOr("k_lo", 0);
  a.k_hi = s.GetLongOr("k_hi", 0);
  a.coordinate = s.GetLongOr("coordinate", 0);
  if (s.Has("bound")) a.bound = s.GetDouble("bound");
  if (a.kind != "scaled_error" && a.kind != "energy" && a.kind != "rate_fit" &&
      a.kind != "deviation" && a.kind != "roots") {
    throw ConfigError("analysis: unknown kind '" + a.kind + "'");
  }
  if (a.kind == "deviation" && a.run2.empty()) {
    throw ConfigError("analysis: deviation needs run2");
  }
  if (a.kind == "energy" && a.variant.empty()) {
    throw ConfigError("analysis: energy needs a variant");
  }
  return a;
}

EnergyVariant ParseVariant(const std::string& name) {
  if (name == "continuous_r3") return EnergyVariant::kContinuousR3;
  if (name == "continuous_r") return EnergyVariant::kContinuousR;
  if (name == "continuous_alpha") return EnergyVariant::kContinuousAlpha;
  if (name == "discrete_r") return EnergyVariant::kDiscreteR;
  if (name == "discrete_t3") return EnergyVariant::kDiscreteT3;
  throw ConfigError("unknown energy variant '" + name + "'");
}

void WriteSeriesCsv(const std::string& path, const std::vector<double>& grid,
                    const std::vector<double>& values) {
  std::ofstream out(path);
  out << "grid,value\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out << FormatDouble(grid[i]) << ',' << FormatDouble(values[i]) << '\n';
  }
}

double MaxRelativeIncrease(const std::vector<double>& e) {
  if (e.empty() || e.front() <= 0.0) return 0.0;
  double worst = 0.0;
  for (std::size_t i = 1; i < e.size(); ++i) {
    worst = std::max(worst, (e[i] - e[i - 1]) / e.front());
  }
  return worst;
}

struct SelftestReport {
  std::ostream& out;
  bool all_pass = true;

  void Row(const std::string& name, double measured, double bound,
           bool pass) {
    all_pass = all_pass && pass;
    out << (pass ? "PASS  " : "FAIL  ") << name << "  measured="
        << FormatDouble(measured) << "  bound=" << FormatDouble(bound)
        << "\n";
  }
};

double SmoothedAbs(double x, double eps) {
  return std::sqrt(x * x + eps * eps) - eps;
}

/// One-dimensional momentum run on the smoothed absolute value; returns the
/// largest value of s (k+1)^2 f_gap / (2 x0^2), i.e. the worst quotient of
/// the inverse-quadratic certificate. shift_momentum replaces the
/// coefficient (k-1)/(k+2) by k/(k+2), the classic off-by-one.
double AbsCertificateQuotient(bool shift_momentum, double eps, long k_max) {
  const double s = eps;  // 1/L for this objective
  const double x0 = 1.0;
  double x_prev = x0, y = x0;
  double worst = 0.0;
  for (long k = 1; k <= k_max; ++k) {
    const double grad = y / std::sqrt(y * y + eps * eps);
    const double x = y - s * grad;
    const double num = shift_momentum ? static_cast<double>(k)
                                      : static_cast<double>(k - 1);
    y = x + num / (static_cast<double>(k) + 2.0) * (x - x_prev);
    const double gap = SmoothedAbs(x, eps);
    worst = std::max(worst,
                     gap * s * (k + 1.0) * (k + 1.0) / (2.0 * x0 * x0));
    x_prev = x;
  }
  return worst;
}

}  // namespace

ExperimentConfig ParseExperimentConfig(const TextRecord& record) {
  ExperimentConfig config;
  try {
    const TextSection& top = record.Top();
    config.problem = top.Get("problem");
    config.scale = ParseScale(top.GetOr("scale", "desk"));
    config.seed = static_cast<std::uint64_t>(top.GetLongOr("seed", 42));
    config.out_dir = top.GetOr("out", ".");
    for (const TextSection* s : record.Named("run")) {
      config.runs.push_back(ParseRunSection(*s));
    }
    for (const TextSection* s : record.Named("analysis")) {
      config.analyses.push_back(ParseAnalysisSection(*s));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }

  if (config.runs.empty()) {
    throw ConfigError("config has no [run] sections");
  }
  std::map<std::string, int> ids;
  for (const RunSpec& run : config.runs) {
    if (++ids[run.id] > 1) {
      throw ConfigError("duplicate run id '" + run.id + "'");
    }
  }
  for (const AnalysisSpec& a : config.analyses) {
    if (!ids.count(a.run)) {
      throw ConfigError("analysis references unknown run '" + a.run + "'");
    }
    if (!a.run2.empty() && !ids.count(a.run2)) {
      throw ConfigError("analysis references unknown run '" + a.run2 + "'");
    }
  }
  return config;
}

int RunExperiment(const ExperimentConfig& config_in, const RunOptions& options,
                  std::ostream& log) {
  ExperimentConfig config = config_in;
  if (options.out_dir) config.out_dir = *options.out_dir;
  if (options.seed) config.seed = *options.seed;
  if (options.scale) config.scale = *options.scale;
  std::filesystem::create_directories(config.out_dir);

  ProblemInstance instance =
      Generate(config.problem, config.scale, config.seed);
  EnsureReference(instance, config.out_dir + "/cache");
  const double step_auto = 1.0 / instance.objective.g.lipschitz;

  TextRecord summary;
  TextSection& top = summary.Top();
  top.keys["problem"] = config.problem;
  top.keys["scale"] = ScaleName(config.scale);
  top.keys["seed"] = std::to_string(config.seed);
  top.keys["f_star"] = FormatDouble(instance.f_star);
  if (!options.deterministic_summary) {
    top.keys["timestamp"] = std::to_string(
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count());
  }

  std::map<std::string, IterateTrace> itraces;
  std::map<std::string, ContinuousTrace> ctraces;
  int status = kStatusOk;

  for (const RunSpec& run : config.runs) {
    try {
      if (run.kind == "scheme" || run.kind == "gd") {
        SchemeParams params = run.scheme;
        if (run.s_auto) params.s = step_auto;
        IterateTrace trace =
            run.kind == "gd"
                ? GradientDescentRun(instance.objective, instance.x0, params.s,
                                     params.k_max, instance.f_star,
                                     params.allow_large_step)
                : RunScheme(instance.objective, instance.x0, params,
                            instance.f_star);
        trace.seed = config.seed;
        std::ofstream csv(config.out_dir + "/" + run.id + ".csv");
        WriteTraceCsv(trace, csv);
        itraces.emplace(run.id, std::move(trace));
      } else {
        OdeParams params;
        params.r = run.r;
        params.dt = run.dt;
        params.horizon = run.horizon;
        params.delta = run.delta;
        params.restart = run.ode_restart;
        ContinuousTrace trace;
        if (run.kind == "ode_lasso") {
          if (instance.a.size() == 0 ||
              instance.objective.h.kind != ProxSpec::Kind::kL1) {
            throw ConfigError("run '" + run.id +
                              "': ode_lasso needs an l1 least-squares problem");
          }
          trace = IntegrateCompositeLasso(instance.a, instance.b,
                                          instance.objective.h.lambda,
                                          instance.x0, params,
                                          instance.f_star);
        } else {
          if (instance.objective.h.kind != ProxSpec::Kind::kZero) {
            throw ConfigError("run '" + run.id +
                              "': ode needs a smooth problem");
          }
          trace = Integrate(instance.objective.g, instance.x0, params,
                            instance.f_star);
        }
        std::ofstream csv(config.out_dir + "/" + run.id + ".csv");
        WriteTraceCsv(trace, csv, run.with_coordinates);
        ctraces.emplace(run.id, std::move(trace));
      }
    } catch (const DivergenceError& e) {
      log << "run '" << run.id << "' diverged: " << e.what() << "\n";
      TextSection s;
      s.name = "run";
      s.keys["id"] = run.id;
      s.keys["diverged"] = "1";
      summary.sections.push_back(std::move(s));
      status = kStatusDiverged;
      continue;
    }
    TextSection s;
    s.name = "run";
    s.keys["id"] = run.id;
    s.keys["diverged"] = "0";
    summary.sections.push_back(std::move(s));
  }

  int analysis_index = 0;
  for (const AnalysisSpec& a : config.analyses) {
    ++analysis_index;
    TextSection s;
    s.name = "analysis";
    s.keys["kind"] = a.kind;
    s.keys["run"] = a.run;
    const bool have_i = itraces.count(a.run) > 0;
    const bool have_c = ctraces.count(a.run) > 0;
    if (!have_i && !have_c) {
      s.keys["skipped"] = "run diverged or missing";
      summary.sections.push_back(std::move(s));
      continue;
    }
    double measured = 0.0;
    bool pass = true;
    const std::string csv_path = config.out_dir + "/analysis_" +
                                 std::to_string(analysis_index) + "_" +
                                 a.kind + ".csv";
    try {
      if (a.kind == "scaled_error") {
        std::vector<double> grid, values;
        if (have_i) {
          const IterateTrace& t = itraces.at(a.run);
          values = ScaledError(t, a.power);
          for (long k = 0; k < t.Size(); ++k) grid.push_back(k);
        } else {
          const ContinuousTrace& t = ctraces.at(a.run);
          values = ScaledError(t, a.power);
          grid = t.t;
        }
        WriteSeriesCsv(csv_path, grid, values);
        for (double v : values) measured = std::max(measured, v);
        if (a.bound) pass = measured <= *a.bound;
      } else if (a.kind == "energy") {
        const EnergyVariant variant = ParseVariant(a.variant);
        EnergySeries series;
        if (have_i) {
          series = EnergyDiscrete(itraces.at(a.run), instance.x_star, variant);
        } else {
          EnergyParams params;
          params.r = ctraces.at(a.run).params.r;
          params.mu = instance.objective.g.strong_convexity;
          series = EnergyContinuous(ctraces.at(a.run), instance.x_star,
                                    variant, params);
        }
        WriteSeriesCsv(csv_path, series.grid, series.values);
        measured = MaxRelativeIncrease(series.values);
        if (a.bound) pass = measured <= *a.bound;
      } else if (a.kind == "rate_fit") {
        const RateFit fit = LinearRateFit(itraces.at(a.run), a.k_lo, a.k_hi);
        measured = fit.r_squared;
        s.keys["slope"] = FormatDouble(fit.slope);
        if (a.bound) pass = fit.slope < 0.0 && fit.r_squared >= *a.bound;
      } else if (a.kind == "deviation") {
        const IterateTrace& it = itraces.at(a.run);
        measured = SchemeOdeDeviation(it, ctraces.at(a.run2), it.params.s);
        if (a.bound) pass = measured <= *a.bound;
      } else {  // roots
        const ContinuousTrace& t = ctraces.at(a.run);
        const std::vector<double> roots =
            OscillationRoots(t, a.coordinate, instance.x_star[a.coordinate]);
        WriteSeriesCsv(csv_path, roots,
                       std::vector<double>(roots.size(), 0.0));
        measured = 0.0;  // largest gap between consecutive roots
        for (std::size_t i = 1; i < roots.size(); ++i) {
          measured = std::max(measured, roots[i] - roots[i - 1]);
        }
        if (a.bound) pass = !roots.empty() && measured <= *a.bound;
      }
    } catch (const std::exception& e) {
      throw ConfigError("analysis " + std::to_string(analysis_index) + " (" +
                        a.kind + "): " + e.what());
    }
    s.keys["measured"] = FormatDouble(measured);
    if (a.bound) {
      s.keys["bound"] = FormatDouble(*a.bound);
      s.keys["pass"] = pass ? "1" : "0";
      if (!pass && status == kStatusOk) status = kStatusAssertionFailed;
    }
    summary.sections.push_back(std::move(s));
  }

  SaveTextRecord(summary, config.out_dir + "/summary.txt");
  return status;
}

int Selftest(std::ostream& out) {
  SelftestReport report{out};

  {  // soft threshold hand case
    Eigen::VectorXd v(2);
    v << 2.0, -0.5;
    const Eigen::VectorXd z = Prox(ProxSpec::L1(1.0), v, 1.0);
    Eigen::VectorXd want(2);
    want << 1.0, 0.0;
    report.Row("prox: l1 soft threshold", (z - want).norm(), 1e-14,
               (z - want).norm() <= 1e-14);
  }
  {  // sorted-l1 with equal weights reduces to plain l1
    Rng rng(7);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::VectorXd v(15);
      for (int i = 0; i < 15; ++i) v[i] = rng.Gaussian(0.0, 2.0);
      const Eigen::VectorXd a =
          Prox(ProxSpec::SortedL1(Eigen::VectorXd::Constant(15, 0.7)), v, 0.3);
      const Eigen::VectorXd b = Prox(ProxSpec::L1(0.7), v, 0.3);
      worst = std::max(worst, (a - b).lpNorm<Eigen::Infinity>());
    }
    report.Row("prox: sorted-l1 equal weights = l1", worst, 1e-12,
               worst <= 1e-12);
  }
  {  // nonexpansiveness across variants
    Rng rng(11);
    double worst = 0.0;
    Eigen::VectorXd w(6);
    w << 3, 2, 1, 0.5, 0.2, 0.1;
    const ProxSpec variants[] = {ProxSpec::L1(0.8), ProxSpec::Nonneg(),
                                 ProxSpec::L1Ball(2.0), ProxSpec::SortedL1(w)};
    for (const ProxSpec& h : variants) {
      for (int trial = 0; trial < 200; ++trial) {
        Eigen::VectorXd u(6), v(6);
        for (int i = 0; i < 6; ++i) {
          u[i] = rng.Gaussian(0.0, 3.0);
          v[i] = rng.Gaussian(0.0, 3.0);
        }
        const double in = (u - v).norm();
        if (in == 0.0) continue;
        const double out_dist =
            (Prox(h, u, 0.7) - Prox(h, v, 0.7)).norm();
        worst = std::max(worst, out_dist / in);
      }
    }
    report.Row("prox: nonexpansive", worst, 1.0 + 1e-12,
               worst <= 1.0 + 1e-12);
  }
  {  // first positive root of the order-one oscillatory special function
    const double z = std::abs(BesselJ1(3.8317059702075123));
    report.Row("bessel: first root of J1", z, 1e-10, z <= 1e-10);
  }
  {  // half-integer closed form sqrt(2/(pi u)) sin u
    double worst = 0.0;
    for (double u : {0.5, 2.0, 10.0, 20.0, 30.0, 60.0}) {
      const double want = std::sqrt(2.0 / (M_PI * u)) * std::sin(u);
      worst = std::max(worst, std::abs(BesselJNu(0.5, u) - want));
    }
    report.Row("bessel: half-integer closed form", worst, 1e-10,
               worst <= 1e-10);
  }
  {  // hand recursion of the momentum scheme on f = x^2/2
    CompositeObjective obj{MakeQuadratic(Eigen::VectorXd::Ones(1)),
                           ProxSpec::Zero()};
    SchemeParams params;
    params.s = 0.1;
    params.r = 3.0;
    params.k_max = 3;
    Eigen::VectorXd x0(1);
    x0 << 1.0;
    const IterateTrace t3 = NesterovRun(obj, x0, params, 0.0);
    params.r = 4.0;
    const IterateTrace t4 = NesterovRun(obj, x0, params, 0.0);
    const double err = std::max(std::abs(t3.x[3][0] - 0.70875),
                                std::abs(t4.x[3][0] - 0.7128));
    report.Row("scheme: hand recursion x_3", err, 1e-15, err <= 1e-15);
  }
  double certificate_worst = 0.0;
  {  // inverse-quadratic certificate on the stiff diagonal quadratic
    ProblemInstance inst = Generate("quadratic", Scale::kDesk, 42);
    SchemeParams params;
    params.s = 1.0 / inst.objective.g.lipschitz;
    params.k_max = 10000;
    const IterateTrace trace =
        NesterovRun(inst.objective, inst.x0, params, inst.f_star);
    const double r2 = (inst.x0 - inst.x_star).squaredNorm();
    for (long k = 1; k < trace.Size(); ++k) {
      certificate_worst =
          std::max(certificate_worst, trace.f_gap[k] * params.s * (k + 1.0) *
                                          (k + 1.0) / (2.0 * r2));
    }
    report.Row("scheme: rate certificate quotient", certificate_worst,
               1.0 + 1e-12, certificate_worst <= 1.0 + 1e-12);
  }
  {  // the off-by-one momentum mutant must break the same certificate
    const double good = AbsCertificateQuotient(false, 1e-4, 200000);
    const double bad = AbsCertificateQuotient(true, 1e-4, 200000);
    report.Row("scheme: certificate holds on smoothed |x|", good,
               1.0 + 1e-12, good <= 1.0 + 1e-12);
    report.Row("scheme: mutation canary (quotient must exceed 1)", bad, 1.0,
               bad > 1.0);
  }
  {  // integrator against the closed-form trajectory, plus energy decay
    QuadraticSpec spec;
    spec.eigenvalues = Eigen::VectorXd(2);
    spec.eigenvalues << 0.04, 0.01;
    Eigen::VectorXd x0(2);
    x0 << 1.0, 1.0;
    OdeParams params;
    params.dt = 1e-3;
    params.horizon = 50.0;
    const ContinuousTrace trace =
        Integrate(spec.ToObjective(), x0, params, 0.0);
    double worst = 0.0;
    for (long i = 0; i < trace.Size(); ++i) {
      worst = std::max(
          worst,
          (trace.x[i] - QuadraticClosedForm(spec, x0, trace.t[i])).norm());
    }
    report.Row("ode: integrator vs closed form", worst, 1e-3, worst <= 1e-3);

    const EnergySeries energy = EnergyContinuous(
        trace, Eigen::VectorXd::Zero(2), EnergyVariant::kContinuousR3, {});
    const double rise = MaxRelativeIncrease(energy.values);
    report.Row("energy: continuous decay", rise, 1e-6, rise <= 1e-6);
  }
  {  // discrete energy decay, r = 4
    ProblemInstance inst = Generate("quadratic", Scale::kDesk, 42);
    SchemeParams params;
    params.s = 1.0 / inst.objective.g.lipschitz;
    params.r = 4.0;
    params.k_max = 10000;
    const IterateTrace trace =
        NesterovRun(inst.objective, inst.x0, params, inst.f_star);
    const EnergySeries energy =
        EnergyDiscrete(trace, inst.x_star, EnergyVariant::kDiscreteR);
    const double rise = MaxRelativeIncrease(energy.values);
    report.Row("energy: discrete decay", rise, 1e-10, rise <= 1e-10);
  }

  out << (report.all_pass ? "selftest: all checks passed\n"
                          : "selftest: FAILURES above\n");
  return report.all_pass ? kStatusOk : kStatusAssertionFailed;
}

}  // namespace nestode
