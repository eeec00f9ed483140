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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nestode/analysis.hpp"
#include "nestode/experiment.hpp"
#include "nestode/ode.hpp"
#include "nestode/problems.hpp"
#include "nestode/prox.hpp"
#include "nestode/schemes.hpp"

namespace {

using namespace nestode;

int CmdRun(const std::string& config_path, const RunOptions& options) {
  ExperimentConfig config;
  try {
    config = ParseExperimentConfig(LoadTextRecord(config_path));
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kStatusConfigError;
  }
  try {
    return RunExperiment(config, options, std::cerr);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kStatusConfigError;
  }
}

int CmdListProblems() {
  for (const std::string& name : ProblemNames()) {
    std::cout << name << "\n";
  }
  return kStatusOk;
}

int CmdTraceOde(const std::string& problem, Scale scale, std::uint64_t seed,
                double r, double dt, double horizon, bool restart,
                bool coords, const std::string& out_path,
                const std::string& cache_dir) {
  ProblemInstance inst = Generate(problem, scale, seed);
  EnsureReference(inst, cache_dir);
  OdeParams params;
  params.r = r;
  params.dt = dt;
  params.horizon = horizon;
  params.restart = restart;
  ContinuousTrace trace;
  try {
    if (inst.objective.h.kind == ProxSpec::Kind::kZero) {
      trace = Integrate(inst.objective.g, inst.x0, params, inst.f_star);
    } else if (inst.objective.h.kind == ProxSpec::Kind::kL1 &&
               inst.a.size() > 0) {
      trace = IntegrateCompositeLasso(inst.a, inst.b,
                                      inst.objective.h.lambda, inst.x0,
                                      params, inst.f_star);
    } else {
      std::cerr << "trace-ode: problem '" << problem
                << "' has an unsupported nonsmooth part\n";
      return kStatusConfigError;
    }
  } catch (const DivergenceError& e) {
    std::cerr << "trace-ode: " << e.what() << "\n";
    return kStatusDiverged;
  }
  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "trace-ode: cannot write " << out_path << "\n";
    return kStatusConfigError;
  }
  WriteTraceCsv(trace, out, coords);
  std::cout << "wrote " << trace.Size() << " samples to " << out_path
            << "\n";
  return kStatusOk;
}

int CmdCompare(const std::string& problem, Scale scale, std::uint64_t seed,
               double r, double s_opt, long k_max, double dt,
               const std::string& out_dir) {
  ProblemInstance inst = Generate(problem, scale, seed);
  if (inst.objective.h.kind != ProxSpec::Kind::kZero) {
    std::cerr << "compare: only smooth problems are supported\n";
    return kStatusConfigError;
  }
  std::filesystem::create_directories(out_dir);
  EnsureReference(inst, out_dir + "/cache");
  const double s = s_opt > 0.0 ? s_opt : 1.0 / inst.objective.g.lipschitz;

  SchemeParams sp;
  sp.s = s;
  sp.r = r;
  sp.k_max = k_max;
  OdeParams op;
  op.r = r;
  op.dt = dt;
  op.horizon = (static_cast<double>(k_max) + 1.0) * std::sqrt(s);
  try {
    const IterateTrace it = NesterovRun(inst.objective, inst.x0, sp,
                                        inst.f_star);
    const ContinuousTrace ct =
        Integrate(inst.objective.g, inst.x0, op, inst.f_star);
    {
      std::ofstream csv(out_dir + "/scheme.csv");
      WriteTraceCsv(it, csv);
    }
    {
      std::ofstream csv(out_dir + "/flow.csv");
      WriteTraceCsv(ct, csv);
    }
    const double deviation = SchemeOdeDeviation(it, ct, s);
    std::cout << "max deviation over k <= " << k_max
              << " at the matching t = k sqrt(s): "
              << FormatDouble(deviation) << "\n";
  } catch (const DivergenceError& e) {
    std::cerr << "compare: " << e.what() << "\n";
    return kStatusDiverged;
  }
  return kStatusOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Momentum-method lab: discrete schemes, their continuous-time limit, "
      "restarting, and rate diagnostics"};
  app.require_subcommand(1);

  std::string out_dir, config_path;
  std::uint64_t seed = 42;
  std::string scale_name = "desk";
  bool deterministic = false;

  auto* run = app.add_subcommand("run", "execute an experiment config");
  run->add_option("config", config_path, "config file")->required();
  std::string run_out;
  std::uint64_t run_seed = 0;
  std::string run_scale;
  run->add_option("--out", run_out, "output directory override");
  auto* seed_opt = run->add_option("--seed", run_seed, "seed override");
  run->add_option("--scale", run_scale, "scale override")
      ->check(CLI::IsMember({"desk", "paper"}));
  run->add_flag("--deterministic-summary", deterministic,
                "omit the timestamp line so reruns are byte-identical");

  auto* selftest = app.add_subcommand("selftest", "run the invariant suite");

  auto* list = app.add_subcommand("list-problems", "print the catalog names");

  auto* trace = app.add_subcommand("trace-ode",
                                   "integrate the damped dynamics and dump a "
                                   "CSV trace");
  std::string problem, trace_out = "trace.csv";
  double r = 3.0, dt = 1e-3, horizon = 50.0;
  bool restart = false, coords = false;
  trace->add_option("--problem", problem, "catalog problem name")->required();
  trace->add_option("--r", r, "damping parameter");
  trace->add_option("--dt", dt, "time step");
  trace->add_option("--horizon", horizon, "integration horizon");
  trace->add_flag("--restart", restart, "speed-restarted dynamics");
  trace->add_flag("--coords", coords, "include coordinate columns (n <= 4)");
  trace->add_option("--out", trace_out, "output CSV path");
  trace->add_option("--seed", seed, "instance seed");
  trace->add_option("--scale", scale_name, "instance scale")
      ->check(CLI::IsMember({"desk", "paper"}));

  auto* compare = app.add_subcommand(
      "compare", "scheme-vs-dynamics deviation report");
  double cmp_s = 0.0, cmp_dt = 1e-4;
  long cmp_kmax = 1000;
  std::string cmp_out = "compare-out";
  compare->add_option("--problem", problem, "catalog problem name")
      ->required();
  compare->add_option("--s", cmp_s, "step size (default 1/L)");
  compare->add_option("--r", r, "momentum / damping parameter");
  compare->add_option("--k-max", cmp_kmax, "iteration budget");
  compare->add_option("--dt", cmp_dt, "integrator time step");
  compare->add_option("--out", cmp_out, "output directory");
  compare->add_option("--seed", seed, "instance seed");
  compare->add_option("--scale", scale_name, "instance scale")
      ->check(CLI::IsMember({"desk", "paper"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : nestode::kStatusConfigError;
  }

  try {
    if (run->parsed()) {
      nestode::RunOptions options;
      if (!run_out.empty()) options.out_dir = run_out;
      if (seed_opt->count() > 0) options.seed = run_seed;
      if (!run_scale.empty()) options.scale = nestode::ParseScale(run_scale);
      options.deterministic_summary = deterministic;
      return CmdRun(config_path, options);
    }
    if (selftest->parsed()) return nestode::Selftest(std::cout);
    if (list->parsed()) return CmdListProblems();
    if (trace->parsed()) {
      return CmdTraceOde(problem, nestode::ParseScale(scale_name), seed, r,
                         dt, horizon, restart, coords, trace_out,
                         ".nestode-cache");
    }
    if (compare->parsed()) {
      return CmdCompare(problem, nestode::ParseScale(scale_name), seed, r,
                        cmp_s, cmp_kmax, cmp_dt, cmp_out);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return nestode::kStatusConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return nestode::kStatusAssertionFailed;
  }
  return nestode::kStatusConfigError;
}
