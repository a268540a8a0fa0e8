// Copyright 2026 The hamq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hamq/harness/config.hpp"
#include "hamq/learning.hpp"

namespace hamq::harness {

/// Environment variable that, when set and non-empty, replaces the output directory.
inline constexpr const char* kOutputDirEnv = "HAMQ_OUTPUT_DIR";

struct RunSummary {
  std::filesystem::path output_dir;
  TrainReport report;
  int completion_warnings = 0;
};

/// Resolved output directory: $HAMQ_OUTPUT_DIR if set, else the configured one.
std::filesystem::path resolve_output_dir(const RunConfig& config);

/// Builds the environment, trains, and writes convergence.csv,
/// policy_heatmap.csv, qtable.txt and run_meta.json. Completion
/// non-convergence is reported on `warnings` and does not stop the run. A
/// slice that does not fit the environment's grid throws ConfigError before
/// training starts.
RunSummary run(const RunConfig& config, std::ostream& warnings);

/// CSV with header `iter,sup_error,frobenius_error,omega_size,hmc_samples,wall_ms`.
void write_convergence(std::ostream& out, const TrainReport& report, bool record_wall_time);

}  // namespace hamq::harness
