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
#include <stdexcept>
#include <string>
#include <string_view>

#include "hamq/envs.hpp"
#include "hamq/harness/heatmap.hpp"
#include "hamq/learning.hpp"

namespace hamq::harness {

/// Invalid configuration. `line` is 1-based, 0 when no location applies.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

struct RunConfig {
  std::string env = "cartpole";
  envs::EnvOptions env_options;
  TrainMode mode = TrainMode::kHmc;
  TrainConfig train;
  std::filesystem::path output_dir = "hamq_run";
  /// Free and fixed grid dimensions for policy_heatmap.csv; nullopt picks
  /// dimensions 0 and 1 with the rest at their centre index.
  std::optional<SliceSpec> slice;
  /// Where the slice was given, so grid-dependent checks can point at it.
  std::string source = "<config>";
  int slice_line = 0;
  /// Wall time is written as 0 unless set, which keeps the CSV reproducible.
  bool record_wall_time = false;
};

/// Parses a YAML run configuration. Sections: environment, training, hmc,
/// completion, output. Unknown sections or keys and out-of-range values are
/// rejected with a ConfigError naming the offending line.
RunConfig parse_run_config(std::string_view text, const std::string& source = "<config>");
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace hamq::harness
