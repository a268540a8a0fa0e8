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

#include "hamq/learning.hpp"

#include <chrono>
#include <random>
#include <stdexcept>
#include <string>

#include "hamq/parallel.hpp"
#include "hamq/seeding.hpp"

namespace hamq {

std::string_view to_string(TrainMode mode) {
  switch (mode) {
    case TrainMode::kHmc: return "hmc";
    case TrainMode::kExhaustive: return "exhaustive";
    case TrainMode::kIid: return "iid";
  }
  return "unknown";
}

std::optional<TrainMode> parse_train_mode(std::string_view text) {
  if (text == "hmc") return TrainMode::kHmc;
  if (text == "exhaustive") return TrainMode::kExhaustive;
  if (text == "iid") return TrainMode::kIid;
  return std::nullopt;
}

void TrainConfig::validate() const {
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  if (!(support_prob > 0.0 && support_prob <= 1.0)) {
    throw std::invalid_argument("support_prob must lie in (0, 1]");
  }
  if (hmc.trajectory_steps < 1) throw std::invalid_argument("trajectory_steps must be >= 1");
  if (!(hmc.step_size > 0.0)) throw std::invalid_argument("step_size must be positive");
  if (hmc.n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  if (hmc.burn_in < 0) throw std::invalid_argument("burn_in must be >= 0");
  if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
  if (!(reference_tolerance > 0.0)) {
    throw std::invalid_argument("reference_tolerance must be positive");
  }
  if (reference_max_sweeps < 1) throw std::invalid_argument("reference_max_sweeps must be >= 1");
  if (completion.max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
  if (!(completion.rel_tolerance > 0.0)) {
    throw std::invalid_argument("rel_tolerance must be positive");
  }
  if (completion.shrinkage && !(*completion.shrinkage > 0.0)) {
    throw std::invalid_argument("shrinkage must be positive");
  }
  if (!(completion.shrinkage_decay > 0.0 && completion.shrinkage_decay <= 1.0)) {
    throw std::invalid_argument("shrinkage_decay must lie in (0, 1]");
  }
  if (!(completion.min_shrinkage_ratio > 0.0 && completion.min_shrinkage_ratio <= 1.0)) {
    throw std::invalid_argument("min_shrinkage_ratio must lie in (0, 1]");
  }
}

std::vector<Cell> sample_support(double p, std::size_t states, std::size_t actions,
                                 std::uint64_t seed) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("support probability must lie in (0, 1]");
  if (states == 0 || actions == 0) throw std::invalid_argument("support shape must be non-empty");
  std::vector<Cell> cells;
  if (p == 1.0) {
    cells.reserve(states * actions);
    for (std::size_t s = 0; s < states; ++s) {
      for (std::size_t a = 0; a < actions; ++a) cells.push_back({s, a});
    }
    return cells;
  }
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution include(p);
  for (int attempt = 0; attempt < 2 && cells.empty(); ++attempt) {
    for (std::size_t s = 0; s < states; ++s) {
      for (std::size_t a = 0; a < actions; ++a) {
        if (include(rng)) cells.push_back({s, a});
      }
    }
  }
  if (cells.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, states * actions - 1);
    const std::size_t k = pick(rng);
    cells.push_back({k / actions, k % actions});
  }
  return cells;
}

std::uint64_t support_seed_for(std::uint64_t support_seed, int t) {
  return derive_seed(support_seed, {static_cast<std::uint64_t>(t)});
}

std::uint64_t pair_seed_for(std::uint64_t support_seed, int t, std::size_t s, std::size_t a) {
  return derive_seed(support_seed, {static_cast<std::uint64_t>(t), s, a});
}

hmc::TargetDensity make_target(const DiscreteMdp& m, std::size_t s, std::size_t a,
                               double kappa) {
  return hmc::TargetDensity(m.mean(s, a), m.transition().covariance(), m.states().ranges(),
                            kappa);
}

double hq_update_entry(const DiscreteMdp& m, const Eigen::VectorXd& state_values, std::size_t s,
                       std::size_t a, const Eigen::MatrixXd& samples) {
  if (samples.cols() == 0) throw std::invalid_argument("HMC sample set is empty");
  if (samples.rows() != m.states().dims()) {
    throw std::invalid_argument("sample dimension does not match state space");
  }
  double total = 0.0;
  for (Eigen::Index k = 0; k < samples.cols(); ++k) {
    total += state_values[static_cast<Eigen::Index>(m.states().nearest(samples.col(k)))];
  }
  return m.reward(s, a) + m.gamma() * total / static_cast<double>(samples.cols());
}

double hq_update_entry(const DiscreteMdp& m, const QTable& q, std::size_t s, std::size_t a,
                       const Eigen::MatrixXd& samples) {
  check_shape(m, q);
  return hq_update_entry(m, q.state_values(), s, a, samples);
}

double hq_update_entry(const DiscreteMdp& m, const Eigen::VectorXd& state_values, std::size_t s,
                       std::size_t a, const Eigen::MatrixXd& samples,
                       const Eigen::VectorXd& weights) {
  if (samples.cols() == 0) throw std::invalid_argument("HMC sample set is empty");
  if (weights.size() != samples.cols()) {
    throw std::invalid_argument("one weight per sample is required");
  }
  const double weight_total = weights.sum();
  if (!(weight_total > 0.0)) throw std::invalid_argument("sample weights must sum to > 0");
  double total = 0.0;
  for (Eigen::Index k = 0; k < samples.cols(); ++k) {
    total += weights[k] *
             state_values[static_cast<Eigen::Index>(m.states().nearest(samples.col(k)))];
  }
  return m.reward(s, a) + m.gamma() * total / weight_total;
}

namespace {

template <typename EntryFn>
IterationOutput sampled_iterate(const DiscreteMdp& m, const QTable& q, const TrainConfig& config,
                                int t, EntryFn&& entry) {
  check_shape(m, q);
  const Eigen::VectorXd v = q.state_values();
  const auto cells = sample_support(config.support_prob, m.num_states(), m.num_actions(),
                                    support_seed_for(config.support_seed, t));
  std::vector<completion::Entry> entries(cells.size());
  std::vector<double> acceptance(cells.size(), 0.0);
  parallel_for(cells.size(), config.threads, [&](std::size_t i) {
    const auto [s, a] = cells[i];
    entries[i] = {s, a, entry(v, s, a, pair_seed_for(config.support_seed, t, s, a), acceptance[i])};
  });

  completion::ObservedSet obs(m.num_states(), m.num_actions(), std::move(entries));
  completion::CompletionConfig cc = config.completion;
  cc.warm_start = q.values();
  auto completed = completion::complete(obs, cc);

  IterationOutput out;
  out.q = QTable(std::move(completed.matrix));
  out.omega_size = cells.size();
  out.samples = cells.size() * static_cast<std::size_t>(config.hmc.n_samples);
  out.completion_converged = completed.converged;
  out.completion_iterations = completed.iterations;
  double acc_total = 0.0;
  for (const double x : acceptance) acc_total += x;
  out.acceptance_rate = acc_total / static_cast<double>(cells.size());
  return out;
}

}  // namespace

IterationOutput hq_iterate(const DiscreteMdp& m, const QTable& q, const TrainConfig& config,
                           int t) {
  return sampled_iterate(m, q, config, t,
                         [&](const Eigen::VectorXd& v, std::size_t s, std::size_t a,
                             std::uint64_t seed, double& acceptance) {
                           const auto target = make_target(m, s, a, config.kappa);
                           hmc::HmcConfig hc = config.hmc;
                           hc.seed = seed;
                           const auto chain = hmc::sample_chain(target, hc);
                           acceptance = chain.acceptance_rate;
                           return hq_update_entry(m, v, s, a, chain.samples);
                         });
}

IterationOutput iid_iterate(const DiscreteMdp& m, const QTable& q, const TrainConfig& config,
                            int t) {
  return sampled_iterate(m, q, config, t,
                         [&](const Eigen::VectorXd& v, std::size_t s, std::size_t a,
                             std::uint64_t seed, double& acceptance) {
                           std::mt19937_64 rng(seed);
                           acceptance = 0.0;
                           return iid_update_entry(m, v, s, a, config.hmc.n_samples, rng);
                         });
}

IterationOutput exhaustive_iterate(const DiscreteMdp& m, const QTable& q,
                                   const TrainConfig& config) {
  IterationOutput out;
  out.q = exhaustive_update(m, q, config.threads);
  out.omega_size = m.num_states() * m.num_actions();
  out.samples = out.omega_size * m.num_states();
  return out;
}

ValueIterationResult reference_q(const DiscreteMdp& m, const TrainConfig& config) {
  return value_iteration(m, config.reference_tolerance, config.reference_max_sweeps,
                         config.threads);
}

TrainReport run_training(const DiscreteMdp& m, const TrainConfig& config, TrainMode mode,
                         const std::optional<ValueIterationResult>& reference) {
  config.validate();
  TrainReport report;
  report.mode = mode;
  const ValueIterationResult ref = reference ? *reference : reference_q(m, config);
  check_shape(m, ref.q);
  report.reference = ref.q;
  report.reference_sweeps = ref.sweeps;
  report.reference_converged = ref.converged;

  QTable q = QTable::uniform_random(m.num_states(), m.num_actions(), config.q_init_seed);
  std::size_t cumulative = 0;
  report.iterations.reserve(static_cast<std::size_t>(config.horizon));
  for (int t = 0; t < config.horizon; ++t) {
    const auto start = std::chrono::steady_clock::now();
    IterationOutput out;
    switch (mode) {
      case TrainMode::kHmc: out = hq_iterate(m, q, config, t); break;
      case TrainMode::kIid: out = iid_iterate(m, q, config, t); break;
      case TrainMode::kExhaustive: out = exhaustive_iterate(m, q, config); break;
    }
    const auto stop = std::chrono::steady_clock::now();
    q = std::move(out.q);
    cumulative += out.samples;
    IterationRecord rec;
    rec.iteration = t + 1;
    rec.sup_error = sup_error(q, report.reference);
    rec.frobenius_error = frobenius_error(q, report.reference);
    rec.omega_size = out.omega_size;
    rec.samples = out.samples;
    rec.cumulative_samples = cumulative;
    rec.completion_converged = out.completion_converged;
    rec.completion_iterations = out.completion_iterations;
    rec.acceptance_rate = out.acceptance_rate;
    rec.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    report.iterations.push_back(rec);
  }
  report.policy = greedy_policy(q);
  report.final_q = std::move(q);
  return report;
}

TrainReport train(const DiscreteMdp& m, const TrainConfig& config) {
  return run_training(m, config, TrainMode::kHmc);
}

TrainReport baseline_train(const DiscreteMdp& m, const TrainConfig& config, TrainMode mode) {
  if (mode == TrainMode::kHmc) throw std::invalid_argument("baseline mode must be exhaustive or iid");
  return run_training(m, config, mode);
}

}  // namespace hamq
