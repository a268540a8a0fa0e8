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

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "hamq/completion.hpp"
#include "hamq/hmc.hpp"
#include "hamq/mdp.hpp"
#include "hamq/qtable.hpp"

namespace hamq {

enum class TrainMode { kHmc, kExhaustive, kIid };

std::string_view to_string(TrainMode mode);
std::optional<TrainMode> parse_train_mode(std::string_view text);

struct Cell {
  std::size_t state = 0;
  std::size_t action = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Settings for one training run. The discount factor belongs to the MDP.
struct TrainConfig {
  int horizon = 50;
  double support_prob = 0.5;
  /// Chain settings; `seed` is ignored because every chain is seeded from
  /// (support_seed, t, s, a).
  hmc::HmcConfig hmc;
  /// Completion settings; `warm_start` is ignored because Q^t is used.
  completion::CompletionConfig completion;
  double kappa = 50.0;
  std::uint64_t q_init_seed = 0;
  std::uint64_t support_seed = 0;
  double reference_tolerance = 1e-8;
  int reference_max_sweeps = 10000;
  /// Worker threads for per-pair work; 0 picks the hardware count.
  unsigned threads = 0;

  /// Throws std::invalid_argument on the first violated constraint.
  void validate() const;
};

struct IterationRecord {
  int iteration = 0;
  double sup_error = 0.0;
  double frobenius_error = 0.0;
  std::size_t omega_size = 0;
  /// Next-state samples consumed this iteration (|S| per pair for exhaustive sweeps).
  std::size_t samples = 0;
  std::size_t cumulative_samples = 0;
  bool completion_converged = true;
  int completion_iterations = 0;
  /// Mean HMC acceptance over the iteration's chains (HMC mode only).
  double acceptance_rate = 0.0;
  double wall_ms = 0.0;
};

struct TrainReport {
  TrainMode mode = TrainMode::kHmc;
  std::vector<IterationRecord> iterations;
  QTable final_q;
  std::vector<std::size_t> policy;
  QTable reference;
  int reference_sweeps = 0;
  bool reference_converged = false;
};

/// Outcome of a single synchronous step Q^t -> Q^{t+1}.
struct IterationOutput {
  QTable q;
  std::size_t omega_size = 0;
  std::size_t samples = 0;
  bool completion_converged = true;
  int completion_iterations = 0;
  double acceptance_rate = 0.0;
};

/// Bernoulli(p) selection of state-action pairs in row-major order. An empty
/// draw is retried once; if still empty a single uniformly chosen pair is used.
std::vector<Cell> sample_support(double p, std::size_t states, std::size_t actions,
                                 std::uint64_t seed);

/// Seed of the support draw at iteration t.
std::uint64_t support_seed_for(std::uint64_t support_seed, int t);
/// Seed of the sampler stream for pair (s, a) at iteration t.
std::uint64_t pair_seed_for(std::uint64_t support_seed, int t, std::size_t s, std::size_t a);

/// HMC target for the transition kernel of (s, a), truncated to the state box.
hmc::TargetDensity make_target(const DiscreteMdp& m, std::size_t s, std::size_t a,
                               double kappa);

/// r(s,a) + gamma/|H| * sum_{x in H} max_b Q(nearest(x), b). `samples` holds
/// one position per column.
double hq_update_entry(const DiscreteMdp& m, const QTable& q, std::size_t s, std::size_t a,
                       const Eigen::MatrixXd& samples);
double hq_update_entry(const DiscreteMdp& m, const Eigen::VectorXd& state_values, std::size_t s,
                       std::size_t a, const Eigen::MatrixXd& samples);
/// Weighted form: r(s,a) + gamma * sum_k w_k max_b Q(nearest(x_k), b) / sum_k w_k.
double hq_update_entry(const DiscreteMdp& m, const Eigen::VectorXd& state_values, std::size_t s,
                       std::size_t a, const Eigen::MatrixXd& samples,
                       const Eigen::VectorXd& weights);

/// One Hamiltonian Q-learning step: draw the support, run a chain per pair,
/// update those entries, then complete the matrix warm-started from Q^t.
IterationOutput hq_iterate(const DiscreteMdp& m, const QTable& q, const TrainConfig& config,
                           int t);
/// Same pipeline with IID draws from the grid kernel in place of chains.
IterationOutput iid_iterate(const DiscreteMdp& m, const QTable& q, const TrainConfig& config,
                            int t);
/// Exhaustive Bellman sweep over every pair; no completion.
IterationOutput exhaustive_iterate(const DiscreteMdp& m, const QTable& q,
                                   const TrainConfig& config);

/// Reference Q* by exhaustive value iteration.
ValueIterationResult reference_q(const DiscreteMdp& m, const TrainConfig& config);

/// Hamiltonian Q-learning for `horizon` iterations from a U[0,1] table.
TrainReport train(const DiscreteMdp& m, const TrainConfig& config);
/// Exhaustive or IID baselines with the same initialization and reporting.
TrainReport baseline_train(const DiscreteMdp& m, const TrainConfig& config, TrainMode mode);
/// Any mode; reuses `reference` when given instead of recomputing Q*.
TrainReport run_training(const DiscreteMdp& m, const TrainConfig& config, TrainMode mode,
                         const std::optional<ValueIterationResult>& reference = std::nullopt);

}  // namespace hamq
