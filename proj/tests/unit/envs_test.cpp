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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <gtest/gtest.h>

#include "hamq/envs.hpp"

namespace hamq::envs {
namespace {

constexpr double kPi = std::numbers::pi;

// Cart-pole accelerations written out with the default parameters inlined.
Eigen::Vector2d cartpole_oracle(double th, double thd, double a) {
  const double m = 0.1, big_m = 1.0, l = 0.5, g = 9.8;
  const double num = g * std::sin(th) + std::cos(th) * (-a - m * l * thd * thd * std::sin(th)) / (m + big_m);
  const double den = l * (4.0 / 3.0 - m * std::pow(std::cos(th), 2) / (m + big_m));
  const double thdd = num / den;
  const double xdd = (a + m * l * (thd * thd * std::sin(th) - thdd * std::cos(th))) / (m + big_m);
  return {thdd, xdd};
}

// Textbook acrobot equations with theta1 measured from the hanging position.
Eigen::Vector2d acrobot_textbook(double th1_hanging, double dth1, double th2, double dth2,
                                 double tau) {
  const double m1 = 1, m2 = 1, l1 = 1, lc1 = 0.5, lc2 = 0.5, i1 = 1, i2 = 1, g = 9.8;
  const double d1 = m1 * lc1 * lc1 + m2 * (l1 * l1 + lc2 * lc2 + 2 * l1 * lc2 * std::cos(th2)) + i1 + i2;
  const double d2 = m2 * (lc2 * lc2 + l1 * lc2 * std::cos(th2)) + i2;
  const double phi2 = m2 * lc2 * g * std::cos(th1_hanging + th2 - kPi / 2);
  const double phi1 = -m2 * l1 * lc2 * dth2 * dth2 * std::sin(th2) -
                      2 * m2 * l1 * lc2 * dth2 * dth1 * std::sin(th2) +
                      (m1 * lc1 + m2 * l1) * g * std::cos(th1_hanging - kPi / 2) + phi2;
  const double ddth2 = (tau + d2 / d1 * phi1 - m2 * l1 * lc2 * dth1 * dth1 * std::sin(th2) - phi2) /
                       (m2 * lc2 * lc2 + i2 - d2 * d2 / d1);
  const double ddth1 = -(d2 * ddth2 + phi1) / d1;
  return {ddth1, ddth2};
}

using Vec6 = Eigen::Matrix<double, 6, 1>;

// Glider accelerations with every component expanded by hand.
Eigen::Vector3d glider_oracle(const Vec6& s, double a) {
  const double m = 1.03, iin = 0.5, iout = 0.174;
  const double af = 0.062, ab = 0.005, muf = 0.0074;
  const double ang = (30.0 + 20.0) * kPi / 180.0;
  const double xd = s[2], yd = s[3], th = s[4], w = s[5];
  const double sg = w > 0 ? 1.0 : (w < 0 ? -1.0 : 0.0);
  const double ffx = af * w * w * sg * std::sin(ang);
  const double ffy = af * w * w * std::cos(ang);
  const double speed = std::hypot(xd, yd);
  const double fx = std::cos(th) * ffx - std::sin(th) * ffy - ab * speed * xd;
  const double fy = std::sin(th) * ffx + std::cos(th) * ffy - ab * speed * yd;
  const double torque = -muf * sg * w * w - iin * a;
  return {fx / m, fy / m, torque / (iin + iout)};
}

TEST(CartPoleTest, UprightEquilibriumIsExact) {
  for (const double x : {-2.0, 0.0, 1.7}) {
    const Eigen::Vector2d acc = cartpole_accel(Eigen::Vector4d(0.0, 0.0, x, 0.0), 0.0, {});
    EXPECT_EQ(acc[0], 0.0);
    EXPECT_EQ(acc[1], 0.0);
  }
}

TEST(CartPoleTest, TiltedPoleFallsFurther) {
  EXPECT_GT(cartpole_accel(Eigen::Vector4d(0.05, 0.0, 0.0, 0.0), 0.0, {})[0], 0.0);
  EXPECT_LT(cartpole_accel(Eigen::Vector4d(-0.05, 0.0, 0.0, 0.0), 0.0, {})[0], 0.0);
}

TEST(CartPoleTest, MatchesFormulaOracle) {
  const Eigen::Vector2d acc = cartpole_accel(Eigen::Vector4d(0.1, 0.5, 0.0, 0.0), 2.0, {});
  const Eigen::Vector2d oracle = cartpole_oracle(0.1, 0.5, 2.0);
  EXPECT_NEAR(acc[0], oracle[0], 1e-12);
  EXPECT_NEAR(acc[1], oracle[1], 1e-12);
}

TEST(CartPoleTest, EulerStep) {
  CartPoleParams p;
  const Eigen::Vector4d s(0.1, 0.5, 0.0, 0.0);
  const Eigen::Vector2d acc = cartpole_oracle(0.1, 0.5, 2.0);
  const Eigen::Vector4d next = cartpole_mean_next(s, 2.0, p);
  EXPECT_NEAR(next[0], 0.1 + 0.5 * 0.02, 1e-15);
  EXPECT_NEAR(next[1], 0.5 + acc[0] * 0.02, 1e-12);
  EXPECT_NEAR(next[2], 0.0, 1e-15);
  EXPECT_NEAR(next[3], acc[1] * 0.02, 1e-12);
  p.euler_dt = 0.0;
  EXPECT_EQ(cartpole_mean_next(Eigen::Vector4d(0.3, -1.0, 2.0, 0.4), 5.0, p),
            Eigen::Vector4d(0.3, -1.0, 2.0, 0.4));
  EXPECT_EQ(cartpole_mean_next(Eigen::Vector4d(0.0, 0.0, 1.0, 0.0), 0.0, {}),
            Eigen::Vector4d(0.0, 0.0, 1.0, 0.0));
}

TEST(CartPoleTest, Reward) {
  EXPECT_EQ(cartpole_reward(Eigen::Vector4d(0.0, 1.0, 2.0, 3.0), 5.0), 1.0);
  EXPECT_NEAR(cartpole_reward(Eigen::Vector4d(kPi / 30.0, 0, 0, 0), 0.0), 0.0, 1e-30);
  for (double th = -1.6; th <= 1.6; th += 0.01) {
    const double r = cartpole_reward(Eigen::Vector4d(th, 0, 0, 0), 0.0);
    EXPECT_GE(r, 0.0);
    EXPECT_LE(r, 1.0);
  }
}

TEST(AcrobotTest, HangingRestIsEquilibrium) {
  const Eigen::Vector2d acc = acrobot_accel(Eigen::Vector4d(kPi, 0.0, 0.0, 0.0), 0.0, {});
  EXPECT_NEAR(acc[0], 0.0, 1e-13);
  EXPECT_NEAR(acc[1], 0.0, 1e-13);
}

TEST(AcrobotTest, RewardPeaksUpright) {
  EXPECT_DOUBLE_EQ(acrobot_reward(Eigen::Vector4d(0.0, 0.0, 0.0, 0.0), 0.0), 1.0);
  EXPECT_NEAR(acrobot_reward(Eigen::Vector4d(kPi, 0.0, 0.0, 0.0), 0.0), 0.0, 1e-30);
}

TEST(AcrobotTest, MatchesTextbookEquationsUnderAngleShift) {
  const double states[][4] = {{0.3, -0.4, 0.8, 1.1}, {2.0, 1.5, -1.2, -0.3}, {-2.5, 0.0, 3.0, 2.0}};
  for (const auto& s : states) {
    for (const double tau : {-10.0, 0.0, 3.0}) {
      const Eigen::Vector2d acc = acrobot_accel(Eigen::Vector4d(s[0], s[1], s[2], s[3]), tau, {});
      const Eigen::Vector2d oracle = acrobot_textbook(s[0] + kPi, s[1], s[2], s[3], tau);
      EXPECT_NEAR(acc[0], oracle[0], 1e-10);
      EXPECT_NEAR(acc[1], oracle[1], 1e-10);
    }
  }
}

TEST(AcrobotTest, EulerStep) {
  const Eigen::Vector4d s(0.3, -0.4, 0.8, 1.1);
  const Eigen::Vector2d acc = acrobot_textbook(0.3 + kPi, -0.4, 0.8, 1.1, 2.0);
  const Eigen::Vector4d next = acrobot_mean_next(s, 2.0, {});
  EXPECT_NEAR(next[0], 0.3 - 0.4 * 0.02, 1e-15);
  EXPECT_NEAR(next[1], -0.4 + acc[0] * 0.02, 1e-12);
  EXPECT_NEAR(next[2], 0.8 + 1.1 * 0.02, 1e-15);
  EXPECT_NEAR(next[3], 1.1 + acc[1] * 0.02, 1e-12);
}

TEST(GliderTest, RestWithoutActionHasNoAcceleration) {
  Vec6 s;
  s << 3.0, -2.0, 0.0, 0.0, 0.7, 0.0;
  EXPECT_EQ(glider_accel(s, 0.0, {}), Eigen::Vector3d::Zero());
}

TEST(GliderTest, TranslationDragAndActionTorque) {
  Vec6 s;
  s << 0.0, 0.0, 2.0, 0.0, 0.4, 0.0;
  const Eigen::Vector3d acc = glider_accel(s, 0.6, {});
  EXPECT_LT(acc[0], 0.0);
  EXPECT_EQ(acc[1], 0.0);
  EXPECT_NEAR(acc[2], -0.5 * 0.6 / (0.5 + 0.174), 1e-15);
}

TEST(GliderTest, MatchesFormulaOracle) {
  Vec6 s;
  s << 1.0, 1.0, 2.0, -1.0, 0.3, 0.5;
  const Eigen::Vector3d acc = glider_accel(s, 0.5, {});
  const Eigen::Vector3d oracle = glider_oracle(s, 0.5);
  EXPECT_LT((acc - oracle).cwiseAbs().maxCoeff(), 1e-12);
  s[5] = -0.8;
  EXPECT_LT((glider_accel(s, -1.0, {}) - glider_oracle(s, -1.0)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(GliderTest, RotationEquivariance) {
  Vec6 s;
  s << 1.0, -2.0, 1.5, -0.7, 0.3, 0.9;
  const double phi = 0.83;
  Eigen::Matrix2d rot;
  rot << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
  Vec6 r = s;
  r.segment<2>(0) = rot * s.segment<2>(0);
  r.segment<2>(2) = rot * s.segment<2>(2);
  r[4] += phi;
  const Eigen::Vector3d a = glider_accel(s, 0.4, {});
  const Eigen::Vector3d b = glider_accel(r, 0.4, {});
  EXPECT_LT((b.head<2>() - rot * a.head<2>()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(b[2], a[2], 1e-15);
}

TEST(GliderTest, EulerStep) {
  Vec6 s;
  s << 1.0, 1.0, 2.0, -1.0, 0.3, 0.5;
  const Eigen::Vector3d acc = glider_oracle(s, 0.5);
  const Vec6 next = glider_mean_next(s, 0.5, {});
  Vec6 expected;
  expected << 1.0 + 2.0 * 0.02, 1.0 - 1.0 * 0.02, 2.0 + acc[0] * 0.02, -1.0 + acc[1] * 0.02,
      0.3 + 0.5 * 0.02, 0.5 + acc[2] * 0.02;
  EXPECT_LT((next - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(GliderTest, DerivedCoefficientsAgreeWithTable) {
  const GliderParams p;
  const GliderCoefficients c = derive_glider_coefficients(p);
  EXPECT_NEAR(c.alpha_f / p.alpha_f, 1.0, 0.05);
  EXPECT_NEAR(c.alpha_b / p.alpha_b, 1.0, 0.05);
  EXPECT_NEAR(c.mu_f / p.mu_f, 1.0, 0.05);
}

TEST(OceanTest, CorrelationAndW) {
  const Eigen::Vector2d q(1.0, -2.0);
  EXPECT_EQ(ocean_correlation(q, q, 2.5), 1.0);
  EXPECT_LT(ocean_correlation(q, Eigen::Vector2d(1e3, 0.0), 2.5), 1e-300);
  const Eigen::Vector2d q2(0.5, 0.0);
  EXPECT_DOUBLE_EQ(ocean_correlation(q, q2, 2.5), std::exp(-(0.25 + 4.0) / 6.25));
  const Eigen::MatrixXd w = build_W({q, q2}, 0.01, 2.5);
  EXPECT_DOUBLE_EQ(w(0, 0), 1.01);
  EXPECT_EQ(w(0, 1), w(1, 0));
  EXPECT_THROW(build_W({q, q}, 0.0, 2.5), std::domain_error);
  EXPECT_NO_THROW(build_W({q, q}, 0.01, 2.5));
  EXPECT_THROW(ocean_correlation(q, q2, 0.0), std::invalid_argument);
}

TEST(OceanTest, UncertaintyReductionSmallCases) {
  OceanField field;
  field.evaluation_points = {};
  EXPECT_EQ(uncertainty_reduction({Eigen::Vector2d(0, 0)}, field), 0.0);

  field.noise_variance = 0.0;
  field.evaluation_points = {Eigen::Vector2d(1.0, 2.0)};
  EXPECT_NEAR(uncertainty_reduction({Eigen::Vector2d(1.0, 2.0)}, field), 1.0, 1e-15);

  field.noise_variance = 0.3;
  const Eigen::Vector2d q(0.4, -0.2), m1(1.0, 1.0);
  const double b = ocean_correlation(q, m1, 2.5);
  field.evaluation_points = {q};
  EXPECT_NEAR(uncertainty_reduction({m1}, field), b * b / 1.3, 1e-15);
}

TEST(OceanTest, TwoMeasurementsExplicitInverse) {
  OceanField field;
  field.noise_variance = 0.05;
  field.evaluation_points = {{0.0, 0.0}, {2.0, -1.0}, {-3.0, 4.0}};
  const Eigen::Vector2d p1(1.0, 0.5), p2(-0.5, 2.0);
  const double sig = 2.5;
  const double w11 = 1.05, w22 = 1.05, w12 = std::exp(-(p1 - p2).squaredNorm() / (sig * sig));
  const double det = w11 * w22 - w12 * w12;
  double oracle = 0.0;
  for (const auto& q : field.evaluation_points) {
    const double b1 = std::exp(-(q - p1).squaredNorm() / (sig * sig));
    const double b2 = std::exp(-(q - p2).squaredNorm() / (sig * sig));
    oracle += (b1 * (w22 * b1 - w12 * b2) + b2 * (-w12 * b1 + w11 * b2)) / det;
  }
  EXPECT_NEAR(uncertainty_reduction({p1, p2}, field), oracle, 1e-12);
}

TEST(OceanTest, ReductionIsPositiveAndShrinksWithNoise) {
  OceanField field;
  field.evaluation_points = {{0.0, 0.0}, {5.0, 5.0}, {-5.0, 0.0}, {2.5, -2.5}};
  const std::vector<Eigen::Vector2d> pts = {{0.0, 0.0}, {1.0, 2.0}, {-4.0, 1.0}};
  double prev = INFINITY;
  for (const double eta : {0.001, 0.01, 0.1, 1.0, 10.0}) {
    field.noise_variance = eta;
    const double r = uncertainty_reduction(pts, field);
    EXPECT_GT(r, 0.0);
    EXPECT_LE(r, prev);
    prev = r;
  }
}

class GliderEnvTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { mdp_ = new DiscreteMdp(make_glider()); }
  static void TearDownTestSuite() {
    delete mdp_;
    mdp_ = nullptr;
  }
  static DiscreteMdp* mdp_;
};
DiscreteMdp* GliderEnvTest::mdp_ = nullptr;

TEST_F(GliderEnvTest, Shape) {
  EXPECT_EQ(mdp_->num_states(), 15625u);
  EXPECT_EQ(mdp_->num_actions(), 5u);
}

TEST_F(GliderEnvTest, RewardMatchesDenseDoubleSum) {
  const auto grid = glider_position_grid(mdp_->states());
  ASSERT_EQ(grid.size(), 25u);
  OceanField with_grid;
  with_grid.evaluation_points = grid;
  for (const std::size_t s : {0u, 777u, 7812u, 15624u}) {
    // Z_s: the state and each action's most probable next state, by dense argmax.
    std::vector<std::size_t> z{s};
    for (std::size_t a = 0; a < 5; ++a) {
      Eigen::Index j = 0;
      mdp_->transition_distribution(s, a).maxCoeff(&j);
      z.push_back(static_cast<std::size_t>(j));
    }
    std::sort(z.begin(), z.end());
    z.erase(std::unique(z.begin(), z.end()), z.end());
    const auto n = static_cast<Eigen::Index>(z.size());
    Eigen::MatrixXd w(n, n);
    std::vector<Eigen::Vector2d> pos;
    for (const std::size_t j : z) pos.emplace_back(mdp_->states().point(j).head<2>());
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index k = 0; k < n; ++k) {
        w(i, k) = (i == k ? 0.01 : 0.0) + std::exp(-(pos[i] - pos[k]).squaredNorm() / 6.25);
      }
    }
    const Eigen::MatrixXd winv = w.inverse();
    double ru = 0.0;
    for (const auto& q : grid) {
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < n; ++k) {
          ru += std::exp(-(q - pos[i]).squaredNorm() / 6.25) * winv(i, k) *
                std::exp(-(q - pos[k]).squaredNorm() / 6.25);
        }
      }
    }
    const Eigen::Vector2d here = mdp_->states().point(s).head<2>();
    const double expected = -0.1 * here[0] * here[0] + ru;
    EXPECT_NEAR(mdp_->reward(s, 0), expected, 1e-10);
    EXPECT_NEAR(ocean_reward(*mdp_, s, with_grid), expected, 1e-10);
    for (std::size_t a = 1; a < 5; ++a) EXPECT_EQ(mdp_->reward(s, a), mdp_->reward(s, 0));
  }
}

TEST_F(GliderEnvTest, ZeroTradeoffLeavesUncertaintyTerm) {
  const auto grid = glider_position_grid(mdp_->states());
  OceanField field{2.5, 0.01, (Eigen::Matrix2d() << 1.0, 0.0, 0.0, 0.0).finished(), 0.0, grid};
  OceanField with_cost = field;
  with_cost.tradeoff = 0.1;
  // The centre state sits at the origin, where the cost term vanishes.
  const std::size_t origin = mdp_->states().index_of(Eigen::VectorXd::Zero(6));
  EXPECT_EQ(ocean_reward(*mdp_, origin, field), ocean_reward(*mdp_, origin, with_cost));
  const std::size_t corner = 0;
  const double ru = uncertainty_reduction(
      [&] {
        std::vector<Eigen::Vector2d> pts;
        for (const std::size_t j : measurement_states(*mdp_, corner)) {
          pts.emplace_back(mdp_->states().point(j).head<2>());
        }
        return pts;
      }(),
      field);
  EXPECT_EQ(ocean_reward(*mdp_, corner, field), ru);
  EXPECT_GT(ru, 0.0);
}

TEST(MakeEnvTest, ShapesAndErrors) {
  const DiscreteMdp cart = make_env("cartpole");
  EXPECT_EQ(cart.num_states(), 625u);
  EXPECT_EQ(cart.num_actions(), 10u);
  const DiscreteMdp acro = make_env("acrobot");
  EXPECT_EQ(acro.num_states(), 625u);
  EXPECT_EQ(acro.num_actions(), 10u);
  EXPECT_THROW(make_env("mountaincar"), std::invalid_argument);
  EXPECT_EQ(cart.states().range(0).lo, -kPi / 2);
  EXPECT_EQ(cart.states().range(3).hi, 3.5);
  EXPECT_EQ(cart.actions().range(0).lo, -10.0);
  EXPECT_EQ(cart.transition().covariance()(1, 1), 0.990);
}

TEST(MakeEnvTest, OptionsOverrideDefaults) {
  EnvOptions options;
  options.gamma = 0.5;
  options.euler_dt = 0.04;
  const DiscreteMdp m = make_env("cartpole", options);
  EXPECT_EQ(m.gamma(), 0.5);
  CartPoleParams p;
  p.euler_dt = 0.04;
  for (std::size_t s = 0; s < m.num_states(); s += 37) {
    const Eigen::Vector4d x = m.states().point(s);
    EXPECT_EQ(m.mean(s, 3), cartpole_mean_next(x, m.actions().point(3)[0], p));
  }
  options.euler_dt = -1.0;
  EXPECT_THROW(make_env("cartpole", options), std::invalid_argument);
}

}  // namespace
}  // namespace hamq::envs
