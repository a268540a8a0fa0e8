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
#include <functional>
#include <memory>
#include <random>

#include <Eigen/Dense>

#include "hamq/grid.hpp"
#include "hamq/qtable.hpp"

namespace hamq {

using MeanFunction =
    std::function<Eigen::VectorXd(const Eigen::VectorXd& state, const Eigen::VectorXd& action)>;
using RewardFunction =
    std::function<double(const Eigen::VectorXd& state, const Eigen::VectorXd& action)>;

/// Gaussian transition model s' ~ N(mu(s, a), Sigma) with a state-action
/// independent covariance.
class TransitionModel {
 public:
  /// Throws std::invalid_argument unless covariance is symmetric positive definite.
  TransitionModel(MeanFunction mean, Eigen::MatrixXd covariance);

  Eigen::VectorXd mean(const Eigen::VectorXd& state, const Eigen::VectorXd& action) const {
    return mean_(state, action);
  }
  const Eigen::MatrixXd& covariance() const { return covariance_; }
  const Eigen::MatrixXd& precision() const { return precision_; }
  int dims() const { return static_cast<int>(covariance_.rows()); }
  bool is_diagonal() const { return diagonal_; }

 private:
  MeanFunction mean_;
  Eigen::MatrixXd covariance_;
  Eigen::MatrixXd precision_;
  bool diagonal_ = false;
};

/// Deterministic reward with declared bounds; DiscreteMdp verifies the bounds
/// against every grid state-action pair.
struct RewardModel {
  RewardFunction reward;
  double r_min = 0.0;
  double r_max = 0.0;
};

/// Finite MDP over grid-discretized state and action spaces.
///
/// The transition kernel on the grid is the Gaussian density evaluated at each
/// grid point and normalized over the grid. Kernel means and rewards are
/// tabulated once at construction; copies share that storage.
class DiscreteMdp {
 public:
  DiscreteMdp(StateSpace states, ActionSpace actions, TransitionModel transition,
              RewardModel reward, double gamma);

  const StateSpace& states() const;
  const ActionSpace& actions() const;
  const TransitionModel& transition() const;
  double gamma() const;
  std::size_t num_states() const;
  std::size_t num_actions() const;

  double reward(std::size_t s, std::size_t a) const;
  /// |S| x |A| reward table.
  const Eigen::MatrixXd& rewards() const;
  double r_min() const;
  double r_max() const;

  /// mu(s, a) for grid indices.
  Eigen::VectorXd mean(std::size_t s, std::size_t a) const;

  /// P(. | s, a) as a length-|S| probability vector.
  Eigen::VectorXd transition_distribution(std::size_t s, std::size_t a) const;
  /// sum_j P(j | s, a) values[j].
  double expected_value(std::size_t s, std::size_t a, const Eigen::VectorXd& values) const;
  /// argmax_j P(j | s, a); ties go to the lowest state index.
  std::size_t most_probable_next_state(std::size_t s, std::size_t a) const;
  /// One draw from P(. | s, a).
  std::size_t sample_next_state(std::size_t s, std::size_t a, std::mt19937_64& rng) const;

  /// Same model with a different discount factor.
  DiscreteMdp with_gamma(double gamma) const;

  struct Impl;

 private:
  explicit DiscreteMdp(std::shared_ptr<const Impl> impl, double gamma);
  std::shared_ptr<const Impl> impl_;
  double gamma_;
};

/// Free-function form of DiscreteMdp::transition_distribution.
Eigen::VectorXd discrete_transition_distribution(const DiscreteMdp& m, std::size_t s,
                                                 std::size_t a);

/// One synchronous Bellman sweep with exact expectations over the grid kernel:
/// Q'(s,a) = r(s,a) + gamma * sum_j P(j|s,a) max_b Q(j,b).
QTable exhaustive_update(const DiscreteMdp& m, const QTable& q, unsigned threads = 0);

/// Monte Carlo Bellman sweep with n IID next-state draws per pair. Each pair
/// uses its own stream derived from (seed, s, a).
QTable iid_update(const DiscreteMdp& m, const QTable& q, int n_samples, std::uint64_t seed,
                  unsigned threads = 0);

/// r(s,a) + gamma/n * sum_k values[s_k] with s_k ~ P(. | s, a).
double iid_update_entry(const DiscreteMdp& m, const Eigen::VectorXd& state_values, std::size_t s,
                        std::size_t a, int n_samples, std::mt19937_64& rng);

struct ValueIterationResult {
  QTable q;
  int sweeps = 0;
  double last_change = 0.0;
  bool converged = false;
};

/// Exhaustive value iteration from Q = 0 until the sup-norm change between
/// sweeps drops below `tolerance` or `max_sweeps` is reached.
ValueIterationResult value_iteration(const DiscreteMdp& m, double tolerance = 1e-8,
                                     int max_sweeps = 10000, unsigned threads = 0);

void check_shape(const DiscreteMdp& m, const QTable& q);

}  // namespace hamq
