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

#include "hamq/harness/run.hpp"

#include <cstdlib>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "hamq/numeric_format.hpp"
#include "hamq/parallel.hpp"

namespace hamq::harness {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("error while writing " + path.string());
}

nlohmann::ordered_json describe(const RunConfig& config, const DiscreteMdp& m,
                                const SliceSpec& slice) {
  const TrainConfig& t = config.train;
  nlohmann::ordered_json env = {
      {"name", config.env},
      {"gamma", m.gamma()},
      {"num_states", m.num_states()},
      {"num_actions", m.num_actions()},
      {"r_min", m.r_min()},
      {"r_max", m.r_max()},
  };
  env["euler_dt"] = config.env_options.euler_dt ? nlohmann::json(*config.env_options.euler_dt)
                                                : nlohmann::json("environment default");
  if (config.env == "glider") {
    env["ocean_noise"] = config.env_options.ocean_noise
                             ? nlohmann::json(*config.env_options.ocean_noise)
                             : nlohmann::json(envs::OceanField{}.noise_variance);
  }
  nlohmann::ordered_json completion = {
      {"max_iterations", t.completion.max_iterations},
      {"rel_tolerance", t.completion.rel_tolerance},
      {"shrinkage", t.completion.shrinkage ? nlohmann::json(*t.completion.shrinkage)
                                           : nlohmann::json("0.1 * largest singular value")},
      {"shrinkage_decay", t.completion.shrinkage_decay},
      {"min_shrinkage_ratio", t.completion.min_shrinkage_ratio},
  };
  return {
      {"environment", env},
      {"training",
       {{"mode", std::string(to_string(config.mode))},
        {"horizon", t.horizon},
        {"support_prob", t.support_prob},
        {"kappa", t.kappa},
        {"q_init_seed", t.q_init_seed},
        {"support_seed", t.support_seed},
        {"reference_tolerance", t.reference_tolerance},
        {"reference_max_sweeps", t.reference_max_sweeps},
        {"threads", resolve_threads(t.threads)}}},
      {"hmc",
       {{"trajectory_steps", t.hmc.trajectory_steps},
        {"step_size", t.hmc.step_size},
        {"n_samples", t.hmc.n_samples},
        {"burn_in", t.hmc.burn_in}}},
      {"completion", completion},
      {"output",
       {{"heatmap_slice", to_string(slice)}, {"record_wall_time", config.record_wall_time}}},
  };
}

}  // namespace

std::filesystem::path resolve_output_dir(const RunConfig& config) {
  if (const char* dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir != '\0') return dir;
  return config.output_dir;
}

void write_convergence(std::ostream& out, const TrainReport& report, bool record_wall_time) {
  out << "iter,sup_error,frobenius_error,omega_size,hmc_samples,wall_ms\n";
  for (const auto& rec : report.iterations) {
    out << rec.iteration << ',' << format_double(rec.sup_error) << ','
        << format_double(rec.frobenius_error) << ',' << rec.omega_size << ',' << rec.samples << ','
        << format_double(record_wall_time ? rec.wall_ms : 0.0) << '\n';
  }
}

RunSummary run(const RunConfig& config, std::ostream& warnings) {
  const DiscreteMdp m = envs::make_env(config.env, config.env_options);
  const SliceSpec slice = config.slice ? *config.slice : default_slice(m.states());
  try {
    validate_slice(slice, m.states());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(config.source, config.slice_line, e.what());
  }

  RunSummary summary;
  summary.output_dir = resolve_output_dir(config);
  std::filesystem::create_directories(summary.output_dir);

  summary.report = run_training(m, config.train, config.mode);
  for (const auto& rec : summary.report.iterations) {
    if (rec.completion_converged) continue;
    ++summary.completion_warnings;
    warnings << "warning: iteration " << rec.iteration << ": matrix completion stopped after "
             << rec.completion_iterations << " iterations without converging\n";
  }

  const auto& dir = summary.output_dir;
  {
    const auto path = dir / "convergence.csv";
    auto out = open_output(path);
    write_convergence(out, summary.report, config.record_wall_time);
    finish(out, path);
  }
  {
    const auto path = dir / "policy_heatmap.csv";
    auto out = open_output(path);
    write_policy_heatmap(out, m, summary.report.final_q, slice);
    finish(out, path);
  }
  save_qtable(dir / "qtable.txt", summary.report.final_q);
  {
    nlohmann::ordered_json meta = describe(config, m, slice);
    const auto& report = summary.report;
    double acceptance = 0.0;
    for (const auto& rec : report.iterations) acceptance += rec.acceptance_rate;
    meta["results"] = {
        {"reference_sweeps", report.reference_sweeps},
        {"reference_converged", report.reference_converged},
        {"final_sup_error", report.iterations.back().sup_error},
        {"final_frobenius_error", report.iterations.back().frobenius_error},
        {"total_samples", report.iterations.back().cumulative_samples},
        {"completion_nonconverged_iterations", summary.completion_warnings},
        {"mean_acceptance_rate",
         config.mode == TrainMode::kHmc
             ? nlohmann::json(acceptance / static_cast<double>(report.iterations.size()))
             : nlohmann::json(nullptr)},
    };
    const auto path = dir / "run_meta.json";
    auto out = open_output(path);
    out << meta.dump(2) << '\n';
    finish(out, path);
  }
  return summary;
}

}  // namespace hamq::harness
