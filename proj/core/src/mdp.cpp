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

#include "hamq/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "hamq/parallel.hpp"
#include "hamq/seeding.hpp"

namespace hamq {

namespace {

// Dense kernels up to this many entries (|S|^2 |A|) are tabulated once.
constexpr std::size_t kDenseCacheLimit = std::size_t{1} << 24;

bool off_diagonal_zero(const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (i != j && m(i, j) != 0.0) return false;
    }
  }
  return true;
}

// Inverse-CDF draw from unnormalized nonnegative weights.
template <typename Weights>
std::size_t draw_categorical(const Weights& w, std::size_t n, double total, double u) {
  const double target = u * total;
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (w[k] <= 0.0) continue;
    cumulative += w[k];
    last_positive = k;
    if (target < cumulative) return k;
  }
  return last_positive;
}

}  // namespace

TransitionModel::TransitionModel(MeanFunction mean, Eigen::MatrixXd covariance)
    : mean_(std::move(mean)), covariance_(std::move(covariance)) {
  if (!mean_) throw std::invalid_argument("transition mean function is empty");
  if (covariance_.rows() == 0 || covariance_.rows() != covariance_.cols()) {
    throw std::invalid_argument("transition covariance must be a non-empty square matrix");
  }
  if (!covariance_.allFinite()) throw std::invalid_argument("transition covariance not finite");
  const double scale = std::max(1.0, covariance_.cwiseAbs().maxCoeff());
  if ((covariance_ - covariance_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("transition covariance must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(covariance_, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0) {
    throw std::invalid_argument("transition covariance must be positive definite");
  }
  diagonal_ = off_diagonal_zero(covariance_);
  precision_ = covariance_.llt().solve(
      Eigen::MatrixXd::Identity(covariance_.rows(), covariance_.cols()));
  precision_ = 0.5 * (precision_ + precision_.transpose()).eval();
}

struct DiscreteMdp::Impl {
  StateSpace states;
  ActionSpace actions;
  TransitionModel transition;
  Eigen::MatrixXd rewards;
  double r_min;
  double r_max;
  Eigen::MatrixXd means;           // D_s x (|S| |A|), column s * |A| + a
  Eigen::VectorXd inv_variance;    // diagonal kernels only
  Eigen::MatrixXd dense_cache;     // |S| x (|S| |A|) when tabulated

  std::size_t pair(std::size_t s, std::size_t a) const { return s * actions.size() + a; }

  // Per-dimension normalized probabilities for a separable kernel, laid out
  // dimension after dimension.
  void separable_factors(std::size_t s, std::size_t a, std::vector<double>& out) const {
    const auto mu = means.col(static_cast<Eigen::Index>(pair(s, a)));
    out.clear();
    for (int d = 0; d < states.dims(); ++d) {
      const int n = states.points(d);
      const std::size_t offset = out.size();
      double max_log = -std::numeric_limits<double>::infinity();
      for (int k = 0; k < n; ++k) {
        const double diff = states.coordinate(d, k) - mu[d];
        const double lw = -0.5 * diff * diff * inv_variance[d];
        out.push_back(lw);
        max_log = std::max(max_log, lw);
      }
      double total = 0.0;
      for (int k = 0; k < n; ++k) {
        out[offset + k] = std::exp(out[offset + k] - max_log);
        total += out[offset + k];
      }
      for (int k = 0; k < n; ++k) out[offset + k] /= total;
    }
  }

  void dense_distribution(std::size_t s, std::size_t a, Eigen::Ref<Eigen::VectorXd> out) const {
    if (dense_cache.size() > 0) {
      out = dense_cache.col(static_cast<Eigen::Index>(pair(s, a)));
      return;
    }
    const Eigen::VectorXd mu = means.col(static_cast<Eigen::Index>(pair(s, a)));
    const auto& prec = transition.precision();
    Eigen::VectorXd x(states.dims());
    double max_log = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < states.size(); ++j) {
      states.point_into(j, x);
      const Eigen::VectorXd diff = x - mu;
      out[j] = -0.5 * diff.dot(prec * diff);
      max_log = std::max(max_log, out[j]);
    }
    out = (out.array() - max_log).exp();
    out /= out.sum();
  }

  Eigen::VectorXd distribution(std::size_t s, std::size_t a) const {
    Eigen::VectorXd out(states.size());
    if (!transition.is_diagonal()) {
      dense_distribution(s, a, out);
      return out;
    }
    std::vector<double> factors;
    separable_factors(s, a, factors);
    for (std::size_t j = 0; j < states.size(); ++j) {
      double p = 1.0;
      std::size_t offset = 0;
      for (int d = 0; d < states.dims(); ++d) {
        const auto k = (j / states.stride(d)) % static_cast<std::size_t>(states.points(d));
        p *= factors[offset + k];
        offset += static_cast<std::size_t>(states.points(d));
      }
      out[j] = p;
    }
    return out;
  }

  double expected_value(std::size_t s, std::size_t a, const Eigen::VectorXd& values) const {
    if (!transition.is_diagonal()) {
      if (dense_cache.size() > 0) {
        return dense_cache.col(static_cast<Eigen::Index>(pair(s, a))).dot(values);
      }
      return distribution(s, a).dot(values);
    }
    // Separable kernel: contract the value tensor one dimension at a time,
    // fastest-varying (last) dimension first.
    thread_local std::vector<double> factors;
    thread_local std::vector<double> buffer;
    separable_factors(s, a, factors);
    buffer.assign(values.data(), values.data() + values.size());
    std::size_t size = buffer.size();
    std::size_t offset = factors.size();
    for (int d = states.dims() - 1; d >= 0; --d) {
      const auto n = static_cast<std::size_t>(states.points(d));
      offset -= n;
      const std::size_t reduced = size / n;
      for (std::size_t p = 0; p < reduced; ++p) {
        double acc = 0.0;
        const double* block = buffer.data() + p * n;
        for (std::size_t k = 0; k < n; ++k) acc += factors[offset + k] * block[k];
        buffer[p] = acc;
      }
      size = reduced;
    }
    return buffer[0];
  }

  std::size_t most_probable(std::size_t s, std::size_t a) const {
    if (transition.is_diagonal()) {
      std::vector<double> factors;
      separable_factors(s, a, factors);
      std::size_t index = 0;
      std::size_t offset = 0;
      for (int d = 0; d < states.dims(); ++d) {
        const int n = states.points(d);
        int best = 0;
        for (int k = 1; k < n; ++k) {
          if (factors[offset + k] > factors[offset + best]) best = k;
        }
        index += states.stride(d) * static_cast<std::size_t>(best);
        offset += static_cast<std::size_t>(n);
      }
      return index;
    }
    const Eigen::VectorXd p = distribution(s, a);
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < p.size(); ++j) {
      if (p[j] > p[best]) best = j;
    }
    return static_cast<std::size_t>(best);
  }

  std::size_t sample(std::size_t s, std::size_t a, std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (transition.is_diagonal()) {
      thread_local std::vector<double> factors;
      separable_factors(s, a, factors);
      std::size_t index = 0;
      std::size_t offset = 0;
      for (int d = 0; d < states.dims(); ++d) {
        const auto n = static_cast<std::size_t>(states.points(d));
        const std::size_t k = draw_categorical(factors.data() + offset, n, 1.0, unit(rng));
        index += states.stride(d) * k;
        offset += n;
      }
      return index;
    }
    if (dense_cache.size() > 0) {
      const auto col = dense_cache.col(static_cast<Eigen::Index>(pair(s, a)));
      return draw_categorical(col, states.size(), 1.0, unit(rng));
    }
    const Eigen::VectorXd p = distribution(s, a);
    return draw_categorical(p, states.size(), 1.0, unit(rng));
  }
};

DiscreteMdp::DiscreteMdp(StateSpace states, ActionSpace actions, TransitionModel transition,
                         RewardModel reward, double gamma)
    : gamma_(gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("discount factor must lie in [0, 1)");
  }
  if (transition.dims() != states.dims()) {
    throw std::invalid_argument("transition covariance dimension does not match state space");
  }
  if (!reward.reward) throw std::invalid_argument("reward function is empty");
  if (!(reward.r_min <= reward.r_max)) throw std::invalid_argument("reward bounds out of order");

  const std::size_t ns = states.size();
  const std::size_t na = actions.size();
  Eigen::MatrixXd rewards(ns, na);
  Eigen::MatrixXd means(states.dims(), static_cast<Eigen::Index>(ns * na));
  Eigen::VectorXd x(states.dims());
  Eigen::VectorXd u(actions.dims());
  for (std::size_t a = 0; a < na; ++a) {
    actions.point_into(a, u);
    for (std::size_t s = 0; s < ns; ++s) {
      states.point_into(s, x);
      const double r = reward.reward(x, u);
      if (!std::isfinite(r) || r < reward.r_min || r > reward.r_max) {
        throw std::invalid_argument("reward " + std::to_string(r) + " at (s=" +
                                    std::to_string(s) + ", a=" + std::to_string(a) +
                                    ") lies outside the declared bounds");
      }
      rewards(s, a) = r;
      const Eigen::VectorXd mu = transition.mean(x, u);
      if (mu.size() != states.dims() || !mu.allFinite()) {
        throw std::invalid_argument("transition mean must be a finite vector of state dimension");
      }
      means.col(static_cast<Eigen::Index>(s * na + a)) = mu;
    }
  }

  auto impl = std::make_shared<Impl>(Impl{std::move(states), std::move(actions),
                                          std::move(transition), std::move(rewards),
                                          reward.r_min, reward.r_max, std::move(means),
                                          Eigen::VectorXd(), Eigen::MatrixXd()});
  if (impl->transition.is_diagonal()) {
    impl->inv_variance = impl->transition.covariance().diagonal().cwiseInverse();
  } else if (ns * ns * na <= kDenseCacheLimit) {
    Eigen::MatrixXd cache(ns, static_cast<Eigen::Index>(ns * na));
    for (std::size_t s = 0; s < ns; ++s) {
      for (std::size_t a = 0; a < na; ++a) {
        impl->dense_distribution(s, a, cache.col(static_cast<Eigen::Index>(s * na + a)));
      }
    }
    impl->dense_cache = std::move(cache);
  }
  impl_ = std::move(impl);
}

DiscreteMdp::DiscreteMdp(std::shared_ptr<const Impl> impl, double gamma)
    : impl_(std::move(impl)), gamma_(gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("discount factor must lie in [0, 1)");
  }
}

DiscreteMdp DiscreteMdp::with_gamma(double gamma) const { return DiscreteMdp(impl_, gamma); }

const StateSpace& DiscreteMdp::states() const { return impl_->states; }
const ActionSpace& DiscreteMdp::actions() const { return impl_->actions; }
const TransitionModel& DiscreteMdp::transition() const { return impl_->transition; }
double DiscreteMdp::gamma() const { return gamma_; }
std::size_t DiscreteMdp::num_states() const { return impl_->states.size(); }
std::size_t DiscreteMdp::num_actions() const { return impl_->actions.size(); }
double DiscreteMdp::reward(std::size_t s, std::size_t a) const { return impl_->rewards(s, a); }
const Eigen::MatrixXd& DiscreteMdp::rewards() const { return impl_->rewards; }
double DiscreteMdp::r_min() const { return impl_->r_min; }
double DiscreteMdp::r_max() const { return impl_->r_max; }

Eigen::VectorXd DiscreteMdp::mean(std::size_t s, std::size_t a) const {
  if (s >= num_states() || a >= num_actions()) throw std::out_of_range("state-action index");
  return impl_->means.col(static_cast<Eigen::Index>(impl_->pair(s, a)));
}

Eigen::VectorXd DiscreteMdp::transition_distribution(std::size_t s, std::size_t a) const {
  if (s >= num_states() || a >= num_actions()) throw std::out_of_range("state-action index");
  return impl_->distribution(s, a);
}

double DiscreteMdp::expected_value(std::size_t s, std::size_t a,
                                   const Eigen::VectorXd& values) const {
  if (static_cast<std::size_t>(values.size()) != num_states()) {
    throw std::invalid_argument("value vector length does not match |S|");
  }
  return impl_->expected_value(s, a, values);
}

std::size_t DiscreteMdp::most_probable_next_state(std::size_t s, std::size_t a) const {
  if (s >= num_states() || a >= num_actions()) throw std::out_of_range("state-action index");
  return impl_->most_probable(s, a);
}

std::size_t DiscreteMdp::sample_next_state(std::size_t s, std::size_t a,
                                           std::mt19937_64& rng) const {
  return impl_->sample(s, a, rng);
}

Eigen::VectorXd discrete_transition_distribution(const DiscreteMdp& m, std::size_t s,
                                                 std::size_t a) {
  return m.transition_distribution(s, a);
}

void check_shape(const DiscreteMdp& m, const QTable& q) {
  if (q.num_states() != m.num_states() || q.num_actions() != m.num_actions()) {
    throw std::invalid_argument("Q table shape " + std::to_string(q.num_states()) + "x" +
                                std::to_string(q.num_actions()) + " does not match MDP " +
                                std::to_string(m.num_states()) + "x" +
                                std::to_string(m.num_actions()));
  }
}

QTable exhaustive_update(const DiscreteMdp& m, const QTable& q, unsigned threads) {
  check_shape(m, q);
  const Eigen::VectorXd v = q.state_values();
  const std::size_t na = m.num_actions();
  Eigen::MatrixXd next(m.num_states(), na);
  parallel_for(m.num_states(), threads, [&](std::size_t s) {
    for (std::size_t a = 0; a < na; ++a) {
      next(s, a) = m.reward(s, a) + m.gamma() * m.expected_value(s, a, v);
    }
  });
  return QTable(std::move(next));
}

double iid_update_entry(const DiscreteMdp& m, const Eigen::VectorXd& state_values, std::size_t s,
                        std::size_t a, int n_samples, std::mt19937_64& rng) {
  if (n_samples < 1) throw std::invalid_argument("n_samples must be at least 1");
  double total = 0.0;
  for (int k = 0; k < n_samples; ++k) total += state_values[m.sample_next_state(s, a, rng)];
  return m.reward(s, a) + m.gamma() * total / static_cast<double>(n_samples);
}

QTable iid_update(const DiscreteMdp& m, const QTable& q, int n_samples, std::uint64_t seed,
                  unsigned threads) {
  check_shape(m, q);
  if (n_samples < 1) throw std::invalid_argument("n_samples must be at least 1");
  const Eigen::VectorXd v = q.state_values();
  const std::size_t na = m.num_actions();
  Eigen::MatrixXd next(m.num_states(), na);
  parallel_for(m.num_states(), threads, [&](std::size_t s) {
    for (std::size_t a = 0; a < na; ++a) {
      std::mt19937_64 rng(derive_seed(seed, {s, a}));
      next(s, a) = iid_update_entry(m, v, s, a, n_samples, rng);
    }
  });
  return QTable(std::move(next));
}

ValueIterationResult value_iteration(const DiscreteMdp& m, double tolerance, int max_sweeps,
                                     unsigned threads) {
  if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (max_sweeps < 1) throw std::invalid_argument("max_sweeps must be at least 1");
  ValueIterationResult result{QTable(m.num_states(), m.num_actions(), 0.0), 0, 0.0, false};
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    QTable next = exhaustive_update(m, result.q, threads);
    result.last_change = sup_error(next, result.q);
    result.q = std::move(next);
    result.sweeps = sweep;
    if (result.last_change < tolerance) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace hamq
