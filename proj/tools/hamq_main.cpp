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

#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hamq/envs.hpp"
#include "hamq/harness/compare.hpp"
#include "hamq/harness/config.hpp"
#include "hamq/harness/heatmap.hpp"
#include "hamq/harness/run.hpp"
#include "hamq/qtable.hpp"

namespace {

constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

int run_command(const std::string& config_path) {
  hamq::harness::RunSummary summary;
  try {
    summary = hamq::harness::run(hamq::harness::load_run_config(config_path), std::cerr);
  } catch (const hamq::harness::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  const auto& last = summary.report.iterations.back();
  std::cout << "wrote " << summary.output_dir.string() << " (" << last.iteration
            << " iterations, sup_error " << last.sup_error << ", frobenius_error "
            << last.frobenius_error << ")\n";
  return 0;
}

int compare_command(const std::vector<std::string>& dirs, const std::string& output) {
  std::vector<std::filesystem::path> paths(dirs.begin(), dirs.end());
  if (output.empty()) {
    hamq::harness::compare(paths, std::cout, std::cerr);
    return 0;
  }
  std::ofstream out(output, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + output);
  hamq::harness::compare(paths, out, std::cerr);
  return 0;
}

int export_command(const std::string& qtable_path, const std::string& slice_text,
                   const std::string& env, const std::string& output) {
  hamq::harness::SliceSpec slice;
  hamq::DiscreteMdp m = [&] {
    try {
      slice = hamq::harness::parse_slice(slice_text);
      auto mdp = hamq::envs::make_env(env);
      hamq::harness::validate_slice(slice, mdp.states());
      return mdp;
    } catch (const std::invalid_argument& e) {
      throw CLI::ValidationError(e.what());
    }
  }();
  const hamq::QTable q = hamq::load_qtable(qtable_path);
  if (output.empty()) {
    hamq::harness::write_policy_heatmap(std::cout, m, q, slice);
    return 0;
  }
  std::ofstream out(output, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + output);
  hamq::harness::write_policy_heatmap(out, m, q, slice);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hamiltonian Q-learning experiment harness"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Train on an environment and write run artifacts");
  run->add_option("config", config_path, "YAML run configuration")->required();

  std::vector<std::string> dirs;
  std::string compare_out;
  auto* compare = app.add_subcommand("compare", "Join convergence.csv files of several runs");
  compare->add_option("dirs", dirs, "Run directories")->required()->expected(2, -1);
  compare->add_option("-o,--output", compare_out, "Output CSV (default: stdout)");

  std::string qtable_path, slice_text, env = "cartpole", export_out;
  auto* export_policy =
      app.add_subcommand("export-policy", "Write a greedy-policy heatmap from a saved Q table");
  export_policy->add_option("qtable", qtable_path, "qtable.txt file")->required();
  export_policy->add_option("slice", slice_text, "Slice 'i,j@f1,f2,...'")->required();
  export_policy->add_option("--env", env, "Environment the table was trained on")
      ->check(CLI::IsMember({"cartpole", "acrobot", "glider"}));
  export_policy->add_option("-o,--output", export_out, "Output CSV (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*run) return run_command(config_path);
    if (*compare) return compare_command(dirs, compare_out);
    if (*export_policy) return export_command(qtable_path, slice_text, env, export_out);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kRuntimeError;
}
