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

#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "hamq/mdp.hpp"

namespace hamq::envs {

// Cart-pole. State (theta, theta_dot, x, x_dot), scalar force action.

struct CartPoleParams {
  double pole_mass = 0.1;   // kg
  double cart_mass = 1.0;   // kg
  double pole_length = 0.5; // m
  double gravity = 9.8;     // m/s^2
  double euler_dt = 0.02;   // s
  Eigen::Vector4d covariance_diag{0.143, 0.990, 0.635, 1.346};
};

/// Returns (theta_ddot, x_ddot); theta_ddot is computed first and fed into x_ddot.
Eigen::Vector2d cartpole_accel(const Eigen::Vector4d& s, double force, const CartPoleParams& p);
/// Explicit Euler step of the noise-free dynamics.
Eigen::Vector4d cartpole_mean_next(const Eigen::Vector4d& s, double force,
                                   const CartPoleParams& p);
/// cos^4(15 theta).
double cartpole_reward(const Eigen::Vector4d& s, double force);

// Acrobot. State (theta1, theta1_dot, theta2, theta2_dot) with theta1 measured
// from the upright vertical and theta2 relative to link 1; torque acts on the
// second joint.

struct AcrobotParams {
  double link1_mass = 1.0;
  double link2_mass = 1.0;
  double link1_length = 1.0;
  double link1_com = 0.5;
  double link2_com = 0.5;
  double link1_inertia = 1.0;
  double link2_inertia = 1.0;
  double gravity = 9.8;
  double euler_dt = 0.02;
  Eigen::Vector4d covariance_diag{0.143, 0.990, 0.635, 1.346};
};

/// Returns (theta1_ddot, theta2_ddot).
Eigen::Vector2d acrobot_accel(const Eigen::Vector4d& s, double torque, const AcrobotParams& p);
Eigen::Vector4d acrobot_mean_next(const Eigen::Vector4d& s, double torque,
                                  const AcrobotParams& p);
/// ((cos th1 + cos(th1 + th2) + 2) / 4)^4: 1 upright, 0 hanging.
double acrobot_reward(const Eigen::Vector4d& s, double torque);

// Planar underwater glider. State (x, y, x_dot, y_dot, theta, theta_dot).

struct GliderParams {
  double mass = 1.03;              // kg
  double inertia_in = 0.5;         // kg m^2
  double inertia_out = 0.174;      // kg m^2
  double radius = 0.08;            // m
  double flap_length = 0.09;       // m
  double flap_width = 0.044;       // d_f, m
  double body_width = 0.02;        // d_b, m
  double beta = 30.0;              // degrees
  double psi = 20.0;               // degrees
  double flap_drag_coeff = 2.0;    // C_f
  double body_drag_coeff = 2.0;    // C_b
  double water_density = 1027.0;   // kg/m^3
  // Tabulated force coefficients used by the dynamics.
  double alpha_f = 0.062;
  double alpha_b = 0.005;
  double mu_f = 0.0074;
  double euler_dt = 0.02;
  Eigen::Matrix<double, 6, 1> covariance_diag =
      (Eigen::Matrix<double, 6, 1>() << 11.111, 69.444, 11.111, 69.444, 0.143, 0.990).finished();
};

struct GliderCoefficients {
  double alpha_f = 0.0;
  double alpha_b = 0.0;
  double mu_f = 0.0;
};

/// alpha_f, alpha_b and mu_f recomputed from the physical parameters.
GliderCoefficients derive_glider_coefficients(const GliderParams& p);

/// Returns (x_ddot, y_ddot, theta_ddot) from M q_ddot = R(theta) F_f + F_b + tau.
Eigen::Vector3d glider_accel(const Eigen::Matrix<double, 6, 1>& s, double a,
                             const GliderParams& p);
Eigen::Matrix<double, 6, 1> glider_mean_next(const Eigen::Matrix<double, 6, 1>& s, double a,
                                             const GliderParams& p);

// Ocean field statistics for the glider reward.

struct OceanField {
  double decorrelation_scale = 2.5;  // sigma
  double noise_variance = 0.01;      // eta
  Eigen::Matrix2d retrieval_cost = (Eigen::Matrix2d() << 1.0, 0.0, 0.0, 0.0).finished();
  double tradeoff = 0.1;             // lambda
  /// Positions where the field uncertainty is evaluated.
  std::vector<Eigen::Vector2d> evaluation_points;
};

/// exp(-|q - q'|^2 / sigma^2).
double ocean_correlation(const Eigen::Vector2d& q, const Eigen::Vector2d& q2, double sigma);
/// W_ij = eta delta_ij + B(q_i, q_j). Throws std::domain_error if W is singular.
Eigen::MatrixXd build_W(const std::vector<Eigen::Vector2d>& points, double eta, double sigma);
/// sum over evaluation points q of sum_ij B(q, q_i) (W^{-1})_ij B(q_j, q).
double uncertainty_reduction(const std::vector<Eigen::Vector2d>& points, const OceanField& field);

/// Current state plus the most probable next state under every action.
std::vector<std::size_t> measurement_states(const DiscreteMdp& m, std::size_t s);

/// -lambda q^T C q + r_u for the glider at grid state s, where r_u is the
/// uncertainty reduction of measuring at the positions of measurement_states.
/// Independent of the action.
double ocean_reward(const DiscreteMdp& m, std::size_t s, const OceanField& field);

struct EnvOptions {
  double gamma = 0.9;
  /// Overrides every environment's Euler step when set.
  std::optional<double> euler_dt;
  /// Overrides the ocean measurement-noise variance when set.
  std::optional<double> ocean_noise;
};

std::vector<std::string_view> env_names();

DiscreteMdp make_cartpole(const CartPoleParams& p = {}, double gamma = 0.9);
DiscreteMdp make_acrobot(const AcrobotParams& p = {}, double gamma = 0.9);
DiscreteMdp make_glider(const GliderParams& p = {}, OceanField field = {}, double gamma = 0.9);

/// "cartpole", "acrobot" or "glider"; throws std::invalid_argument otherwise.
DiscreteMdp make_env(std::string_view name, const EnvOptions& options = {});

/// The (x, y) positions of the glider grid, used as the default evaluation set.
std::vector<Eigen::Vector2d> glider_position_grid(const StateSpace& states);

}  // namespace hamq::envs
