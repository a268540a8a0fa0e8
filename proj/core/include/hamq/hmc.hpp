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
#include <vector>

#include <Eigen/Dense>

#include "hamq/grid.hpp"

namespace hamq::hmc {

/// Gaussian N(mu, Sigma) multiplied by a smooth box cut-off: for each
/// dimension i the factor 1/(1+exp(-kappa (hi_i - s_i))) * 1/(1+exp(-kappa (s_i - lo_i))).
///
/// Energies follow U(s) = -log density with the Gaussian normalizer kept as a
/// constant; the mass matrix is Sigma^{-1}, so K(v) = v^T Sigma v / 2.
class TargetDensity {
 public:
  TargetDensity(Eigen::VectorXd mu, Eigen::MatrixXd sigma, std::vector<Interval> bounds,
                double kappa);

  int dims() const { return static_cast<int>(mu_.size()); }
  const Eigen::VectorXd& mu() const { return mu_; }
  const Eigen::MatrixXd& sigma() const { return sigma_; }
  const Eigen::MatrixXd& sigma_inv() const { return sigma_inv_; }
  const std::vector<Interval>& bounds() const { return bounds_; }
  double kappa() const { return kappa_; }
  /// Lower Cholesky factor of Sigma.
  const Eigen::MatrixXd& sigma_cholesky() const { return chol_; }
  /// 0.5 * log((2 pi)^D det Sigma).
  double log_normalizer() const { return log_normalizer_; }

  double potential(const Eigen::Ref<const Eigen::VectorXd>& s) const;
  void grad_potential(const Eigen::Ref<const Eigen::VectorXd>& s,
                      Eigen::Ref<Eigen::VectorXd> out) const;
  Eigen::VectorXd grad_potential(const Eigen::Ref<const Eigen::VectorXd>& s) const;
  double kinetic(const Eigen::Ref<const Eigen::VectorXd>& v) const;

 private:
  Eigen::VectorXd mu_;
  Eigen::MatrixXd sigma_;
  Eigen::MatrixXd sigma_inv_;
  Eigen::MatrixXd chol_;
  std::vector<Interval> bounds_;
  double kappa_;
  double log_normalizer_;
};

struct PhasePoint {
  Eigen::VectorXd position;
  Eigen::VectorXd momentum;
};

struct HmcConfig {
  int trajectory_steps = 100;
  double step_size = 0.02;
  int n_samples = 100;
  int burn_in = 10;
  std::uint64_t seed = 0;
};

struct ChainResult {
  /// dims x n_samples; column k is the k-th recorded position.
  Eigen::MatrixXd samples;
  double acceptance_rate = 0.0;
  /// Mean |H(proposal) - H(current)| over trajectories that stayed finite.
  double mean_abs_energy_error = 0.0;
  int accepted = 0;
  int proposals = 0;
};

/// log(1 + exp(x)) without overflow.
double softplus(double x);
/// 1 / (1 + exp(-x)) without overflow.
double sigmoid(double x);

double potential(const TargetDensity& t, const Eigen::Ref<const Eigen::VectorXd>& s);
Eigen::VectorXd grad_potential(const TargetDensity& t, const Eigen::Ref<const Eigen::VectorXd>& s);
double kinetic(const TargetDensity& t, const Eigen::Ref<const Eigen::VectorXd>& v);
double hamiltonian(const TargetDensity& t, const PhasePoint& p);

/// L Stormer-Verlet steps of size dl with drift ds/dl = Sigma v. Returns
/// nullopt if any intermediate state becomes non-finite.
std::optional<PhasePoint> leapfrog(const TargetDensity& t, const PhasePoint& start, int steps,
                                   double step_size);

/// Metropolis-Hastings test: accept iff u < min(1, exp(h_current - h_proposal)).
/// A non-finite proposal energy is always rejected.
bool mh_accept(double h_current, double h_proposal, double u);

/// Runs one chain. The start is drawn from N(mu, Sigma); each iteration
/// refreshes momentum from N(0, Sigma^{-1}), integrates a trajectory and
/// applies mh_accept. The current position is recorded after every
/// iteration (rejections repeat it); the first burn_in records are dropped.
ChainResult sample_chain(const TargetDensity& t, const HmcConfig& config);

/// ceil((1 + xi)/(1 - xi) * 2/gamma^2 * log(2 |Omega| T / delta)), the
/// per-pair HMC sample count that controls the Monte Carlo term of the
/// Q-update error bound. xi is the chain's spectral-gap parameter.
long long recommended_sample_count(double xi, double gamma, long long omega_size,
                                   long long horizon, double delta);

}  // namespace hamq::hmc
