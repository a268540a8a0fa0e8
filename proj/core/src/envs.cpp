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

#include "hamq/envs.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hamq::envs {

namespace {

constexpr double kPi = std::numbers::pi;

double sgn(double x) { return static_cast<double>((x > 0.0) - (x < 0.0)); }
double deg2rad(double deg) { return deg * kPi / 180.0; }

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument(std::string(name) + " must be positive");
  }
}

}  // namespace

// --- cart-pole --------------------------------------------------------------

Eigen::Vector2d cartpole_accel(const Eigen::Vector4d& s, double force, const CartPoleParams& p) {
  const double theta = s[0];
  const double theta_dot = s[1];
  const double m = p.pole_mass;
  const double total = p.pole_mass + p.cart_mass;
  const double sin_t = std::sin(theta);
  const double cos_t = std::cos(theta);
  const double push = (force + m * p.pole_length * theta_dot * theta_dot * sin_t) / total;
  const double theta_acc = (p.gravity * sin_t - push * cos_t) /
                           (p.pole_length * (4.0 / 3.0 - m * cos_t * cos_t / total));
  const double x_acc =
      (force + m * p.pole_length * (theta_dot * theta_dot * sin_t - theta_acc * cos_t)) / total;
  return {theta_acc, x_acc};
}

Eigen::Vector4d cartpole_mean_next(const Eigen::Vector4d& s, double force,
                                   const CartPoleParams& p) {
  const Eigen::Vector2d acc = cartpole_accel(s, force, p);
  const double dt = p.euler_dt;
  return {s[0] + s[1] * dt, s[1] + acc[0] * dt, s[2] + s[3] * dt, s[3] + acc[1] * dt};
}

double cartpole_reward(const Eigen::Vector4d& s, double /*force*/) {
  const double c = std::cos(15.0 * s[0]);
  const double c2 = c * c;
  return c2 * c2;
}

// --- acrobot ----------------------------------------------------------------

Eigen::Vector2d acrobot_accel(const Eigen::Vector4d& s, double torque, const AcrobotParams& p) {
  const double th1 = s[0];
  const double dth1 = s[1];
  const double th2 = s[2];
  const double dth2 = s[3];
  const double m1 = p.link1_mass;
  const double m2 = p.link2_mass;
  const double l1 = p.link1_length;
  const double lc1 = p.link1_com;
  const double lc2 = p.link2_com;
  const double g = p.gravity;

  const double d1 = m1 * lc1 * lc1 + m2 * (l1 * l1 + lc2 * lc2 + 2.0 * l1 * lc2 * std::cos(th2)) +
                    p.link1_inertia + p.link2_inertia;
  const double d2 = m2 * (lc2 * lc2 + l1 * lc2 * std::cos(th2)) + p.link2_inertia;
  // Gravity terms carry -sin because theta1 = 0 is the upright configuration.
  const double phi2 = -m2 * lc2 * g * std::sin(th1 + th2);
  const double phi1 = -m2 * l1 * lc2 * dth2 * dth2 * std::sin(th2) -
                      2.0 * m2 * l1 * lc2 * dth2 * dth1 * std::sin(th2) -
                      (m1 * lc1 + m2 * l1) * g * std::sin(th1) + phi2;
  const double th2_acc =
      (torque + d2 / d1 * phi1 - m2 * l1 * lc2 * dth1 * dth1 * std::sin(th2) - phi2) /
      (m2 * lc2 * lc2 + p.link2_inertia - d2 * d2 / d1);
  const double th1_acc = -(d2 * th2_acc + phi1) / d1;
  return {th1_acc, th2_acc};
}

Eigen::Vector4d acrobot_mean_next(const Eigen::Vector4d& s, double torque,
                                  const AcrobotParams& p) {
  const Eigen::Vector2d acc = acrobot_accel(s, torque, p);
  const double dt = p.euler_dt;
  return {s[0] + s[1] * dt, s[1] + acc[0] * dt, s[2] + s[3] * dt, s[3] + acc[1] * dt};
}

double acrobot_reward(const Eigen::Vector4d& s, double /*torque*/) {
  const double height = (std::cos(s[0]) + std::cos(s[0] + s[2]) + 2.0) / 4.0;
  const double h2 = height * height;
  return h2 * h2;
}

// --- glider -----------------------------------------------------------------

GliderCoefficients derive_glider_coefficients(const GliderParams& p) {
  const double psi = deg2rad(p.psi);
  const double r = p.radius;
  const double len = p.flap_length;
  GliderCoefficients c;
  c.alpha_f = 0.5 * p.water_density * p.flap_drag_coeff * p.flap_width * len *
              (r * r + (len / 2.0) * (len / 2.0) + r * len * std::cos(psi));
  c.mu_f = c.alpha_f * (len / 2.0 + r * std::cos(psi));
  c.alpha_b = 0.5 * p.body_drag_coeff * p.body_width * kPi * r;
  return c;
}

Eigen::Vector3d glider_accel(const Eigen::Matrix<double, 6, 1>& s, double a,
                             const GliderParams& p) {
  const double xd = s[2];
  const double yd = s[3];
  const double theta = s[4];
  const double thd = s[5];
  const double angle = deg2rad(p.beta + p.psi);

  const Eigen::Vector3d flap{p.alpha_f * thd * thd * sgn(thd) * std::sin(angle),
                             p.alpha_f * thd * thd * std::cos(angle), 0.0};
  const double speed = std::sqrt(xd * xd + yd * yd);
  const Eigen::Vector3d body{-p.alpha_b * speed * xd, -p.alpha_b * speed * yd, 0.0};
  const Eigen::Vector3d torque{0.0, 0.0, -p.mu_f * sgn(thd) * thd * thd - p.inertia_in * a};

  Eigen::Matrix3d rot;
  rot << std::cos(theta), -std::sin(theta), 0.0,
         std::sin(theta), std::cos(theta), 0.0,
         0.0, 0.0, 1.0;
  const Eigen::Vector3d force = rot * flap + body + torque;
  return {force[0] / p.mass, force[1] / p.mass, force[2] / (p.inertia_in + p.inertia_out)};
}

Eigen::Matrix<double, 6, 1> glider_mean_next(const Eigen::Matrix<double, 6, 1>& s, double a,
                                             const GliderParams& p) {
  const Eigen::Vector3d acc = glider_accel(s, a, p);
  const double dt = p.euler_dt;
  Eigen::Matrix<double, 6, 1> next;
  next << s[0] + s[2] * dt, s[1] + s[3] * dt, s[2] + acc[0] * dt, s[3] + acc[1] * dt,
      s[4] + s[5] * dt, s[5] + acc[2] * dt;
  return next;
}

// --- ocean field --------------------------------------------------------------

double ocean_correlation(const Eigen::Vector2d& q, const Eigen::Vector2d& q2, double sigma) {
  require_positive(sigma, "decorrelation scale");
  return std::exp(-(q - q2).squaredNorm() / (sigma * sigma));
}

Eigen::MatrixXd build_W(const std::vector<Eigen::Vector2d>& points, double eta, double sigma) {
  if (!(eta >= 0.0)) throw std::invalid_argument("noise variance must be nonnegative");
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd w(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double b = ocean_correlation(points[i], points[j], sigma);
      w(i, j) = b;
      w(j, i) = b;
    }
    w(i, i) += eta;
  }
  if (n == 0) return w;
  Eigen::LLT<Eigen::MatrixXd> llt(w);
  const double scale = w.diagonal().maxCoeff();
  if (llt.info() != Eigen::Success ||
      llt.matrixLLT().diagonal().array().square().minCoeff() <= 1e-12 * scale) {
    throw std::domain_error("measurement covariance W is singular");
  }
  return w;
}

double uncertainty_reduction(const std::vector<Eigen::Vector2d>& points,
                             const OceanField& field) {
  if (points.empty()) throw std::invalid_argument("uncertainty reduction needs measurements");
  const double sigma = field.decorrelation_scale;
  const Eigen::MatrixXd w = build_W(points, field.noise_variance, sigma);
  const Eigen::LLT<Eigen::MatrixXd> llt(w);
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::VectorXd b(n);
  double total = 0.0;
  for (const auto& q : field.evaluation_points) {
    for (Eigen::Index i = 0; i < n; ++i) b[i] = ocean_correlation(q, points[i], sigma);
    total += b.dot(llt.solve(b));
  }
  return total;
}

std::vector<std::size_t> measurement_states(const DiscreteMdp& m, std::size_t s) {
  std::vector<std::size_t> out{s};
  for (std::size_t a = 0; a < m.num_actions(); ++a) out.push_back(m.most_probable_next_state(s, a));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double ocean_reward(const DiscreteMdp& m, std::size_t s, const OceanField& field) {
  if (m.states().dims() < 2) throw std::invalid_argument("ocean reward needs (x, y) state dims");
  std::vector<Eigen::Vector2d> positions;
  for (const std::size_t j : measurement_states(m, s)) {
    const Eigen::VectorXd x = m.states().point(j);
    positions.emplace_back(x[0], x[1]);
  }
  const Eigen::VectorXd x = m.states().point(s);
  const Eigen::Vector2d q{x[0], x[1]};
  return -field.tradeoff * q.dot(field.retrieval_cost * q) +
         uncertainty_reduction(positions, field);
}

std::vector<Eigen::Vector2d> glider_position_grid(const StateSpace& states) {
  std::vector<Eigen::Vector2d> out;
  for (int i = 0; i < states.points(0); ++i) {
    for (int j = 0; j < states.points(1); ++j) {
      out.emplace_back(states.coordinate(0, i), states.coordinate(1, j));
    }
  }
  return out;
}

// --- factories ----------------------------------------------------------------

DiscreteMdp make_cartpole(const CartPoleParams& p, double gamma) {
  require_positive(p.pole_mass, "pole mass");
  require_positive(p.cart_mass, "cart mass");
  require_positive(p.pole_length, "pole length");
  require_positive(p.euler_dt, "euler_dt");
  StateSpace states({{-kPi / 2, kPi / 2}, {-3.0, 3.0}, {-2.4, 2.4}, {-3.5, 3.5}}, {5, 5, 5, 5});
  ActionSpace actions({{-10.0, 10.0}}, {10});
  TransitionModel transition(
      [p](const Eigen::VectorXd& s, const Eigen::VectorXd& a) -> Eigen::VectorXd {
        return cartpole_mean_next(Eigen::Vector4d(s), a[0], p);
      },
      p.covariance_diag.asDiagonal().toDenseMatrix());
  RewardModel reward{[](const Eigen::VectorXd& s, const Eigen::VectorXd& a) {
                       return cartpole_reward(Eigen::Vector4d(s), a[0]);
                     },
                     0.0, 1.0};
  return DiscreteMdp(std::move(states), std::move(actions), std::move(transition),
                     std::move(reward), gamma);
}

DiscreteMdp make_acrobot(const AcrobotParams& p, double gamma) {
  require_positive(p.link1_mass, "link1 mass");
  require_positive(p.link2_mass, "link2 mass");
  require_positive(p.link1_length, "link1 length");
  require_positive(p.link1_inertia, "link1 inertia");
  require_positive(p.link2_inertia, "link2 inertia");
  require_positive(p.euler_dt, "euler_dt");
  StateSpace states({{-kPi, kPi}, {-3.0, 3.0}, {-kPi, kPi}, {-3.0, 3.0}}, {5, 5, 5, 5});
  ActionSpace actions({{-10.0, 10.0}}, {10});
  TransitionModel transition(
      [p](const Eigen::VectorXd& s, const Eigen::VectorXd& a) -> Eigen::VectorXd {
        return acrobot_mean_next(Eigen::Vector4d(s), a[0], p);
      },
      p.covariance_diag.asDiagonal().toDenseMatrix());
  RewardModel reward{[](const Eigen::VectorXd& s, const Eigen::VectorXd& a) {
                       return acrobot_reward(Eigen::Vector4d(s), a[0]);
                     },
                     0.0, 1.0};
  return DiscreteMdp(std::move(states), std::move(actions), std::move(transition),
                     std::move(reward), gamma);
}

DiscreteMdp make_glider(const GliderParams& p, OceanField field, double gamma) {
  require_positive(p.mass, "glider mass");
  require_positive(p.inertia_in + p.inertia_out, "glider inertia");
  require_positive(p.euler_dt, "euler_dt");
  require_positive(field.decorrelation_scale, "decorrelation scale");
  if (!(field.noise_variance >= 0.0)) throw std::invalid_argument("noise variance must be >= 0");
  if (!(field.tradeoff >= 0.0)) throw std::invalid_argument("tradeoff must be >= 0");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> cost_eig(field.retrieval_cost);
  if ((field.retrieval_cost - field.retrieval_cost.transpose()).cwiseAbs().maxCoeff() > 0.0 ||
      cost_eig.eigenvalues().minCoeff() < 0.0) {
    throw std::invalid_argument("retrieval cost must be symmetric positive semidefinite");
  }

  StateSpace states({{-10.0, 10.0}, {-10.0, 10.0}, {-25.0, 25.0}, {-25.0, 25.0}, {-kPi, kPi},
                     {-3.0, 3.0}},
                    {5, 5, 5, 5, 5, 5});
  ActionSpace actions({{-1.0, 1.0}}, {5});
  if (field.evaluation_points.empty()) field.evaluation_points = glider_position_grid(states);
  TransitionModel transition(
      [p](const Eigen::VectorXd& s, const Eigen::VectorXd& a) -> Eigen::VectorXd {
        return glider_mean_next(Eigen::Matrix<double, 6, 1>(s), a[0], p);
      },
      p.covariance_diag.asDiagonal().toDenseMatrix());

  // The reward depends on the kernel's most probable next states, so tabulate
  // it against a reward-free copy of the model first.
  const DiscreteMdp kinematic(states, actions, transition,
                              RewardModel{[](const Eigen::VectorXd&, const Eigen::VectorXd&) {
                                            return 0.0;
                                          },
                                          0.0, 0.0},
                              gamma);
  auto table = std::make_shared<std::vector<double>>(states.size());
  for (std::size_t s = 0; s < states.size(); ++s) (*table)[s] = ocean_reward(kinematic, s, field);

  double max_sq_radius = 0.0;
  for (int d = 0; d < 2; ++d) {
    const auto& r = states.range(d);
    max_sq_radius += std::max(r.lo * r.lo, r.hi * r.hi);
  }
  const double r_min = -field.tradeoff * cost_eig.eigenvalues().maxCoeff() * max_sq_radius;
  const double r_max = static_cast<double>(field.evaluation_points.size());

  const StateSpace lookup = states;
  RewardModel reward{[table, lookup](const Eigen::VectorXd& s, const Eigen::VectorXd&) {
                       return (*table)[lookup.index_of(s)];
                     },
                     r_min, r_max};
  return DiscreteMdp(std::move(states), std::move(actions), std::move(transition),
                     std::move(reward), gamma);
}

std::vector<std::string_view> env_names() { return {"cartpole", "acrobot", "glider"}; }

DiscreteMdp make_env(std::string_view name, const EnvOptions& options) {
  if (name == "cartpole") {
    CartPoleParams p;
    if (options.euler_dt) p.euler_dt = *options.euler_dt;
    return make_cartpole(p, options.gamma);
  }
  if (name == "acrobot") {
    AcrobotParams p;
    if (options.euler_dt) p.euler_dt = *options.euler_dt;
    return make_acrobot(p, options.gamma);
  }
  if (name == "glider") {
    GliderParams p;
    if (options.euler_dt) p.euler_dt = *options.euler_dt;
    OceanField field;
    if (options.ocean_noise) field.noise_variance = *options.ocean_noise;
    return make_glider(p, std::move(field), options.gamma);
  }
  throw std::invalid_argument("unknown environment '" + std::string(name) +
                              "' (expected cartpole, acrobot or glider)");
}

}  // namespace hamq::envs
