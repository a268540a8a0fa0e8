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

#include "hamq/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "hamq/numeric_format.hpp"

namespace hamq::harness {

namespace {

std::string located(const std::string& source, int line, const std::string& message) {
  return line > 0 ? source + ":" + std::to_string(line) + ": " + message : source + ": " + message;
}

int line_of(const YAML::Node& node) { return node.Mark().line + 1; }

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& message) const {
    throw ConfigError(source_, line_of(node), message);
  }

  std::string scalar(const YAML::Node& node, const std::string& key) const {
    if (!node.IsScalar()) fail(node, key + ": expected a scalar value");
    return node.Scalar();
  }

  double real(const YAML::Node& node, const std::string& key) const {
    const std::string text = scalar(node, key);
    try {
      const double v = parse_double(text);
      if (!std::isfinite(v)) fail(node, key + ": value must be finite");
      return v;
    } catch (const std::invalid_argument&) {
      fail(node, key + ": '" + text + "' is not a number");
    }
  }

  template <typename Int>
  Int integer(const YAML::Node& node, const std::string& key) const {
    const std::string text = scalar(node, key);
    Int value{};
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || end != text.data() + text.size()) {
      fail(node, key + ": '" + text + "' is not a valid integer");
    }
    return value;
  }

  bool boolean(const YAML::Node& node, const std::string& key) const {
    const std::string text = scalar(node, key);
    if (text == "true") return true;
    if (text == "false") return false;
    fail(node, key + ": expected true or false, got '" + text + "'");
  }

 private:
  std::string source_;
};

using Handler = std::function<void(const YAML::Node&)>;

void read_section(const Reader& reader, const YAML::Node& section, const std::string& name,
                  const std::map<std::string, Handler>& handlers) {
  if (section.IsNull()) return;
  if (!section.IsMap()) reader.fail(section, "section '" + name + "' must be a mapping");
  std::set<std::string> seen;
  for (const auto& kv : section) {
    const std::string key = reader.scalar(kv.first, "key");
    const auto it = handlers.find(key);
    if (it == handlers.end()) reader.fail(kv.first, "unknown key '" + name + "." + key + "'");
    if (!seen.insert(key).second) reader.fail(kv.first, "duplicate key '" + name + "." + key + "'");
    it->second(kv.second);
  }
}

}  // namespace

ConfigError::ConfigError(const std::string& source, int line, const std::string& message)
    : std::runtime_error(located(source, line, message)), line_(line) {}

RunConfig parse_run_config(std::string_view text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(source, e.mark.line + 1, e.msg);
  }
  RunConfig config;
  config.source = source;
  if (root.IsNull()) return config;
  const Reader reader(source);
  if (!root.IsMap()) reader.fail(root, "top level must be a mapping of sections");

  auto& train = config.train;
  const auto positive = [&](const YAML::Node& n, const std::string& key) {
    const double v = reader.real(n, key);
    if (!(v > 0.0)) reader.fail(n, key + " must be positive");
    return v;
  };
  const auto at_least = [&](const YAML::Node& n, const std::string& key, int lo) {
    const int v = reader.integer<int>(n, key);
    if (v < lo) reader.fail(n, key + " must be >= " + std::to_string(lo));
    return v;
  };
  const auto unit_interval = [&](const YAML::Node& n, const std::string& key) {
    const double v = reader.real(n, key);
    if (!(v > 0.0 && v <= 1.0)) reader.fail(n, key + " must lie in (0, 1]");
    return v;
  };

  const std::map<std::string, std::map<std::string, Handler>> sections = {
      {"environment",
       {{"name",
         [&](const YAML::Node& n) {
           config.env = reader.scalar(n, "name");
           const auto names = envs::env_names();
           if (std::find(names.begin(), names.end(), config.env) == names.end()) {
             reader.fail(n, "unknown environment '" + config.env + "'");
           }
         }},
        {"gamma",
         [&](const YAML::Node& n) {
           const double g = reader.real(n, "gamma");
           if (!(g >= 0.0 && g < 1.0)) reader.fail(n, "gamma must lie in [0, 1)");
           config.env_options.gamma = g;
         }},
        {"euler_dt", [&](const YAML::Node& n) { config.env_options.euler_dt = positive(n, "euler_dt"); }},
        {"ocean_noise",
         [&](const YAML::Node& n) {
           const double eta = reader.real(n, "ocean_noise");
           if (!(eta >= 0.0)) reader.fail(n, "ocean_noise must be >= 0");
           config.env_options.ocean_noise = eta;
         }}}},
      {"training",
       {{"mode",
         [&](const YAML::Node& n) {
           const std::string text = reader.scalar(n, "mode");
           const auto mode = parse_train_mode(text);
           if (!mode) reader.fail(n, "mode must be hmc, exhaustive or iid, got '" + text + "'");
           config.mode = *mode;
         }},
        {"horizon", [&](const YAML::Node& n) { train.horizon = at_least(n, "horizon", 1); }},
        {"support_prob", [&](const YAML::Node& n) { train.support_prob = unit_interval(n, "support_prob"); }},
        {"kappa", [&](const YAML::Node& n) { train.kappa = positive(n, "kappa"); }},
        {"q_init_seed",
         [&](const YAML::Node& n) { train.q_init_seed = reader.integer<std::uint64_t>(n, "q_init_seed"); }},
        {"support_seed",
         [&](const YAML::Node& n) { train.support_seed = reader.integer<std::uint64_t>(n, "support_seed"); }},
        {"reference_tolerance",
         [&](const YAML::Node& n) { train.reference_tolerance = positive(n, "reference_tolerance"); }},
        {"reference_max_sweeps",
         [&](const YAML::Node& n) { train.reference_max_sweeps = at_least(n, "reference_max_sweeps", 1); }},
        {"threads", [&](const YAML::Node& n) { train.threads = reader.integer<unsigned>(n, "threads"); }}}},
      {"hmc",
       {{"trajectory_steps",
         [&](const YAML::Node& n) { train.hmc.trajectory_steps = at_least(n, "trajectory_steps", 1); }},
        {"step_size", [&](const YAML::Node& n) { train.hmc.step_size = positive(n, "step_size"); }},
        {"n_samples", [&](const YAML::Node& n) { train.hmc.n_samples = at_least(n, "n_samples", 1); }},
        {"burn_in", [&](const YAML::Node& n) { train.hmc.burn_in = at_least(n, "burn_in", 0); }}}},
      {"completion",
       {{"max_iterations",
         [&](const YAML::Node& n) { train.completion.max_iterations = at_least(n, "max_iterations", 1); }},
        {"rel_tolerance",
         [&](const YAML::Node& n) { train.completion.rel_tolerance = positive(n, "rel_tolerance"); }},
        {"shrinkage", [&](const YAML::Node& n) { train.completion.shrinkage = positive(n, "shrinkage"); }},
        {"shrinkage_decay",
         [&](const YAML::Node& n) { train.completion.shrinkage_decay = unit_interval(n, "shrinkage_decay"); }},
        {"min_shrinkage_ratio",
         [&](const YAML::Node& n) {
           train.completion.min_shrinkage_ratio = unit_interval(n, "min_shrinkage_ratio");
         }}}},
      {"output",
       {{"directory",
         [&](const YAML::Node& n) {
           const std::string dir = reader.scalar(n, "directory");
           if (dir.empty()) reader.fail(n, "directory must not be empty");
           config.output_dir = dir;
         }},
        {"heatmap_slice",
         [&](const YAML::Node& n) {
           try {
             config.slice = parse_slice(reader.scalar(n, "heatmap_slice"));
             config.slice_line = line_of(n);
           } catch (const std::invalid_argument& e) {
             reader.fail(n, e.what());
           }
         }},
        {"record_wall_time",
         [&](const YAML::Node& n) { config.record_wall_time = reader.boolean(n, "record_wall_time"); }}}},
  };

  std::set<std::string> seen;
  for (const auto& kv : root) {
    const std::string name = reader.scalar(kv.first, "section");
    const auto it = sections.find(name);
    if (it == sections.end()) reader.fail(kv.first, "unknown section '" + name + "'");
    if (!seen.insert(name).second) reader.fail(kv.first, "duplicate section '" + name + "'");
    read_section(reader, kv.second, name, it->second);
  }

  try {
    train.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(source, 0, e.what());
  }
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "cannot open config file");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_run_config(text.str(), path.string());
}

}  // namespace hamq::harness
