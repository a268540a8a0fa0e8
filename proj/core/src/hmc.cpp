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

#include "hamq/hmc.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace hamq::hmc {

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

TargetDensity::TargetDensity(Eigen::VectorXd mu, Eigen::MatrixXd sigma,
                             std::vector<Interval> bounds, double kappa)
    : mu_(std::move(mu)), sigma_(std::move(sigma)), bounds_(std::move(bounds)), kappa_(kappa) {
  const auto d = mu_.size();
  if (d == 0) throw std::invalid_argument("target dimension must be positive");
  if (sigma_.rows() != d || sigma_.cols() != d) {
    throw std::invalid_argument("target covariance shape does not match mean");
  }
  if (static_cast<Eigen::Index>(bounds_.size()) != d) {
    throw std::invalid_argument("target bounds count does not match mean");
  }
  if (!mu_.allFinite() || !sigma_.allFinite()) throw std::invalid_argument("target not finite");
  if (!(kappa_ > 0.0) || !std::isfinite(kappa_)) throw std::invalid_argument("kappa must be > 0");
  for (const auto& b : bounds_) {
    if (!(b.lo < b.hi)) throw std::invalid_argument("target bounds must satisfy lo < hi");
  }
  const double scale = std::max(1.0, sigma_.cwiseAbs().maxCoeff());
  if ((sigma_ - sigma_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("target covariance must be symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(sigma_);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("target covariance must be positive definite");
  }
  chol_ = llt.matrixL();
  sigma_inv_ = llt.solve(Eigen::MatrixXd::Identity(d, d));
  sigma_inv_ = 0.5 * (sigma_inv_ + sigma_inv_.transpose()).eval();
  const double log_det = 2.0 * chol_.diagonal().array().log().sum();
  log_normalizer_ = 0.5 * (static_cast<double>(d) * std::log(2.0 * std::numbers::pi) + log_det);
}

double TargetDensity::potential(const Eigen::Ref<const Eigen::VectorXd>& s) const {
  const Eigen::VectorXd diff = s - mu_;
  double u = 0.5 * diff.dot(sigma_inv_ * diff) + log_normalizer_;
  for (int i = 0; i < dims(); ++i) {
    u += softplus(-kappa_ * (bounds_[i].hi - s[i])) + softplus(-kappa_ * (s[i] - bounds_[i].lo));
  }
  return u;
}

void TargetDensity::grad_potential(const Eigen::Ref<const Eigen::VectorXd>& s,
                                   Eigen::Ref<Eigen::VectorXd> out) const {
  out.noalias() = sigma_inv_ * (s - mu_);
  for (int i = 0; i < dims(); ++i) {
    out[i] += kappa_ * (sigmoid(-kappa_ * (bounds_[i].hi - s[i])) -
                        sigmoid(-kappa_ * (s[i] - bounds_[i].lo)));
  }
}

Eigen::VectorXd TargetDensity::grad_potential(const Eigen::Ref<const Eigen::VectorXd>& s) const {
  Eigen::VectorXd out(dims());
  grad_potential(s, out);
  return out;
}

double TargetDensity::kinetic(const Eigen::Ref<const Eigen::VectorXd>& v) const {
  return 0.5 * v.dot(sigma_ * v);
}

double potential(const TargetDensity& t, const Eigen::Ref<const Eigen::VectorXd>& s) {
  return t.potential(s);
}

Eigen::VectorXd grad_potential(const TargetDensity& t,
                               const Eigen::Ref<const Eigen::VectorXd>& s) {
  return t.grad_potential(s);
}

double kinetic(const TargetDensity& t, const Eigen::Ref<const Eigen::VectorXd>& v) {
  return t.kinetic(v);
}

double hamiltonian(const TargetDensity& t, const PhasePoint& p) {
  return t.potential(p.position) + t.kinetic(p.momentum);
}

namespace {

// In-place trajectory; false when the state leaves the finite range.
bool integrate(const TargetDensity& t, Eigen::VectorXd& s, Eigen::VectorXd& v, int steps,
               double dl, Eigen::VectorXd& grad) {
  t.grad_potential(s, grad);
  v.noalias() -= 0.5 * dl * grad;
  for (int l = 0; l < steps; ++l) {
    s.noalias() += dl * (t.sigma() * v);
    t.grad_potential(s, grad);
    // Trailing half-kick of this step fused with the leading half-kick of the next.
    const double kick = (l + 1 == steps) ? 0.5 * dl : dl;
    v.noalias() -= kick * grad;
    if (!s.allFinite() || !v.allFinite()) return false;
  }
  return true;
}

void check_trajectory_args(int steps, double step_size) {
  if (steps < 1) throw std::invalid_argument("leapfrog needs at least one step");
  if (!(step_size > 0.0) || !std::isfinite(step_size)) {
    throw std::invalid_argument("leapfrog step size must be positive");
  }
}

}  // namespace

std::optional<PhasePoint> leapfrog(const TargetDensity& t, const PhasePoint& start, int steps,
                                   double step_size) {
  check_trajectory_args(steps, step_size);
  if (start.position.size() != t.dims() || start.momentum.size() != t.dims()) {
    throw std::invalid_argument("phase point dimension does not match target");
  }
  PhasePoint p = start;
  Eigen::VectorXd grad(t.dims());
  if (!integrate(t, p.position, p.momentum, steps, step_size, grad)) return std::nullopt;
  return p;
}

bool mh_accept(double h_current, double h_proposal, double u) {
  if (!std::isfinite(h_proposal)) return false;
  const double delta = h_current - h_proposal;
  if (delta >= 0.0) return true;
  return u < std::exp(delta);
}

ChainResult sample_chain(const TargetDensity& t, const HmcConfig& config) {
  if (config.n_samples < 1) throw std::invalid_argument("n_samples must be at least 1");
  if (config.burn_in < 0) throw std::invalid_argument("burn_in must be nonnegative");
  check_trajectory_args(config.trajectory_steps, config.step_size);

  const int d = t.dims();
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd z(d);
  auto draw_standard = [&] {
    for (int i = 0; i < d; ++i) z[i] = normal(rng);
  };

  // Start from the untruncated kernel N(mu, Sigma).
  draw_standard();
  Eigen::VectorXd current = t.mu() + t.sigma_cholesky() * z;
  double u_current = t.potential(current);

  ChainResult result;
  result.samples.resize(d, config.n_samples);
  const auto upper = t.sigma_cholesky().transpose().triangularView<Eigen::Upper>();
  Eigen::VectorXd s(d), v(d), grad(d);
  double energy_error_sum = 0.0;
  int finite_trajectories = 0;

  const int iterations = config.burn_in + config.n_samples;
  for (int it = 0; it < iterations; ++it) {
    // v ~ N(0, Sigma^{-1}): solve L^T v = z with Sigma = L L^T.
    draw_standard();
    v = upper.solve(z);
    const double h_current = u_current + t.kinetic(v);
    s = current;
    const bool finite = integrate(t, s, v, config.trajectory_steps, config.step_size, grad);
    const double u_proposal = finite ? t.potential(s) : std::numeric_limits<double>::infinity();
    const double h_proposal = finite ? u_proposal + t.kinetic(v) : u_proposal;
    if (std::isfinite(h_proposal)) {
      energy_error_sum += std::abs(h_proposal - h_current);
      ++finite_trajectories;
    }
    // Draw u every iteration so the stream does not depend on outcomes.
    const double u = unit(rng);
    ++result.proposals;
    if (mh_accept(h_current, h_proposal, u)) {
      current = s;
      u_current = u_proposal;
      ++result.accepted;
    }
    if (it >= config.burn_in) result.samples.col(it - config.burn_in) = current;
  }
  result.acceptance_rate =
      static_cast<double>(result.accepted) / static_cast<double>(result.proposals);
  result.mean_abs_energy_error =
      finite_trajectories > 0 ? energy_error_sum / finite_trajectories : 0.0;
  return result;
}

long long recommended_sample_count(double xi, double gamma, long long omega_size,
                                   long long horizon, double delta) {
  if (!(xi >= 0.0 && xi < 1.0)) throw std::invalid_argument("xi must lie in [0, 1)");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in (0, 1]");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (omega_size < 1 || horizon < 1) {
    throw std::invalid_argument("omega_size and horizon must be positive");
  }
  const double count = (1.0 + xi) / (1.0 - xi) * (2.0 / (gamma * gamma)) *
                       std::log(2.0 * static_cast<double>(omega_size) *
                                static_cast<double>(horizon) / delta);
  return static_cast<long long>(std::ceil(count));
}

}  // namespace hamq::hmc
