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

#ifndef NESTODE_EXPERIMENT_HPP
#define NESTODE_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "nestode/problems.hpp"
#include "nestode/schemes.hpp"
#include "nestode/textio.hpp"

namespace nestode {

/// Config validation failure; mapped to exit status 2 by the CLI.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exit statuses shared by RunExperiment and the CLI.
inline constexpr int kStatusOk = 0;
inline constexpr int kStatusAssertionFailed = 1;
inline constexpr int kStatusConfigError = 2;
inline constexpr int kStatusDiverged = 3;

struct RunSpec {
  std::string id;
  std::string kind;  // "scheme", "ode", or "ode_lasso"
  // scheme runs
  SchemeParams scheme;
  bool s_auto = true;  // s = 1/L of the generated problem
  // ode runs
  double r = 3.0;
  double dt = 0.0;
  double horizon = 0.0;
  double delta = 0.0;
  bool ode_restart = false;
  bool with_coordinates = false;
};

struct AnalysisSpec {
  std::string kind;  // scaled_error | energy | rate_fit | deviation | roots
  std::string run;
  std::string run2;  // deviation: the ode run
  double power = 2.0;
  std::string variant;  // energy variant name
  long k_lo = 0, k_hi = 0;
  long coordinate = 0;
  std::optional<double> bound;  // asserted upper bound / required minimum
};

struct ExperimentConfig {
  std::string problem;
  Scale scale = Scale::kDesk;
  std::uint64_t seed = 42;
  std::string out_dir = ".";
  std::vector<RunSpec> runs;
  std::vector<AnalysisSpec> analyses;
};

/// Overrides supplied on the command line.
struct RunOptions {
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<Scale> scale;
  bool deterministic_summary = false;
};

/// Throws ConfigError on malformed or inconsistent input.
ExperimentConfig ParseExperimentConfig(const TextRecord& record);

/// Executes every run, writes per-run trace CSVs, evaluates analyses, and
/// writes summary.txt to the output directory. Returns one of the kStatus
/// codes; on divergence the artifacts produced so far are kept.
int RunExperiment(const ExperimentConfig& config, const RunOptions& options,
                  std::ostream& log);

/// Invariant suite printing one bound-vs-measured line per check.
/// Returns kStatusOk iff every check passes.
int Selftest(std::ostream& out);

}  // namespace nestode

#endif  // NESTODE_EXPERIMENT_HPP
