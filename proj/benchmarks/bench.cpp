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

#include <benchmark/benchmark.h>

#include "nestode/ode.hpp"
#include "nestode/problems.hpp"
#include "nestode/prox.hpp"
#include "nestode/rng.hpp"
#include "nestode/schemes.hpp"

namespace {

using namespace nestode;

void BM_ProxSortedL1(benchmark::State& state) {
  const Eigen::Index p = state.range(0);
  Rng rng(3);
  Eigen::VectorXd v(p), w(p);
  for (Eigen::Index i = 0; i < p; ++i) v[i] = rng.Gaussian(0.0, 2.0);
  for (Eigen::Index i = 0; i < p; ++i) {
    w[i] = 2.0 * static_cast<double>(p - i) / static_cast<double>(p);
  }
  const ProxSpec h = ProxSpec::SortedL1(w);
  for (auto _ : state) {
    benchmark::DoNotOptimize(Prox(h, v, 0.5));
  }
}
BENCHMARK(BM_ProxSortedL1)->Arg(100)->Arg(1000)->Arg(10000);

void BM_SchemeIterations(benchmark::State& state) {
  ProblemInstance inst = Generate("quadratic", Scale::kDesk, 42);
  SchemeParams params;
  params.s = 1.0;
  params.k_max = state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        NesterovRun(inst.objective, inst.x0, params, inst.f_star));
  }
}
BENCHMARK(BM_SchemeIterations)->Arg(1000)->Arg(10000);

void BM_Integrate(benchmark::State& state) {
  QuadraticSpec spec;
  spec.eigenvalues = Eigen::VectorXd(2);
  spec.eigenvalues << 0.04, 0.01;
  const SmoothObjective obj = spec.ToObjective();
  Eigen::VectorXd x0(2);
  x0 << 1.0, 1.0;
  OdeParams params;
  params.dt = 1e-3;
  params.horizon = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(Integrate(obj, x0, params));
  }
}
BENCHMARK(BM_Integrate)->Arg(10)->Arg(50);

void BM_BesselJ1(benchmark::State& state) {
  double u = 0.0;
  for (auto _ : state) {
    u += 0.37;
    if (u > 1000.0) u -= 1000.0;
    benchmark::DoNotOptimize(BesselJ1(u));
  }
}
BENCHMARK(BM_BesselJ1);

}  // namespace

BENCHMARK_MAIN();
