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

namespace hamq::harness {

struct ConvergenceRow {
  int iter = 0;
  double sup_error = 0.0;
  double frobenius_error = 0.0;
  double omega_size = 0.0;
  double hmc_samples = 0.0;
  double wall_ms = 0.0;
};

/// Reads a convergence.csv file. Throws std::runtime_error on malformed input.
std::vector<ConvergenceRow> read_convergence(std::istream& in);

/// Joins the convergence files of `run_dirs` on iteration. Every metric column
/// is suffixed with its run name (the directory name, made unique), and each
/// run after the first gets sup_error_delta_<name> and frobenius_error_delta_<name>
/// columns holding its difference from the first run. Runs of unequal length
/// are truncated to the shortest with a note on `warnings`.
void compare(const std::vector<std::filesystem::path>& run_dirs, std::ostream& out,
             std::ostream& warnings);

}  // namespace hamq::harness
