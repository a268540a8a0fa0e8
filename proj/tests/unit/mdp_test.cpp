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

#include <cmath>
#include <random>
#include <stdexcept>

#include <gtest/gtest.h>

#include "hamq/mdp.hpp"
#include "toy_models.hpp"

namespace hamq {
namespace {

using testing::planar_toy_mdp;
using testing::three_state_mdp;

// Unnormalized Gaussian density of every grid point, computed directly.
Eigen::VectorXd grid_density(const DiscreteMdp& m, const Eigen::VectorXd& mu) {
  const Eigen::MatrixXd prec = m.transition().covariance().inverse();
  Eigen::VectorXd w(static_cast<Eigen::Index>(m.num_states()));
  for (std::size_t j = 0; j < m.num_states(); ++j) {
    const Eigen::VectorXd d = m.states().point(j) - mu;
    w[static_cast<Eigen::Index>(j)] = std::exp(-0.5 * d.dot(prec * d));
  }
  return w;
}

TEST(TransitionDistributionTest, NonnegativeAndNormalized) {
  const DiscreteMdp m = planar_toy_mdp();
  for (std::size_t s = 0; s < m.num_states(); ++s) {
    for (std::size_t a = 0; a < m.num_actions(); ++a) {
      const Eigen::VectorXd p = discrete_transition_distribution(m, s, a);
      EXPECT_GE(p.minCoeff(), 0.0);
      EXPECT_NEAR(p.sum(), 1.0, 1e-12);
    }
  }
}

TEST(TransitionDistributionTest, ThreePointHandOracle) {
  const DiscreteMdp m = three_state_mdp(0.9, 1.0);
  // State 1 is x = 0; action 1 is a = 0, so mu = 0.
  const Eigen::VectorXd p = discrete_transition_distribution(m, 1, 1);
  const double e = std::exp(-0.5);
  const double z = 1.0 + 2.0 * e;
  EXPECT_NEAR(p[0], e / z, 1e-15);
  EXPECT_NEAR(p[1], 1.0 / z, 1e-15);
  EXPECT_NEAR(p[2], e / z, 1e-15);
}

TEST(TransitionDistributionTest, SymmetricUnderAxisReflection) {
  // Centre state with the zero action: mu sits on the grid centre.
  StateSpace states({{-1.0, 1.0}, {-2.0, 2.0}}, {5, 5});
  ActionSpace actions({{-1.0, 1.0}}, {1});
  const auto mdp = [&](double v0, double v1) {
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(2, 2);
    cov(0, 0) = v0;
    cov(1, 1) = v1;
    return DiscreteMdp(states, actions,
                       TransitionModel([](const Eigen::VectorXd& s,
                                          const Eigen::VectorXd&) -> Eigen::VectorXd { return s; },
                                       cov),
                       RewardModel{[](const Eigen::VectorXd&, const Eigen::VectorXd&) { return 0.0; },
                                   0.0, 0.0},
                       0.5);
  };
  const DiscreteMdp m = mdp(0.3, 0.3);
  const std::size_t centre = 12;
  const Eigen::VectorXd p = discrete_transition_distribution(m, centre, 0);
  for (std::size_t j = 0; j < m.num_states(); ++j) {
    const auto idx = m.states().multi_index(j);
    const std::array<int, 2> flip0{4 - idx[0], idx[1]};
    const std::array<int, 2> flip1{idx[0], 4 - idx[1]};
    EXPECT_NEAR(p[static_cast<Eigen::Index>(j)],
                p[static_cast<Eigen::Index>(m.states().flat_index(flip0))], 1e-15);
    EXPECT_NEAR(p[static_cast<Eigen::Index>(j)],
                p[static_cast<Eigen::Index>(m.states().flat_index(flip1))], 1e-15);
  }
}

TEST(TransitionDistributionTest, MatchesRescaledDirectDensityForCorrelatedCovariance) {
  StateSpace states({{-1.0, 1.0}, {-1.0, 1.0}}, {4, 3});
  ActionSpace actions({{-0.5, 0.5}}, {2});
  Eigen::MatrixXd cov(2, 2);
  cov << 0.4, 0.15, 0.15, 0.3;
  const DiscreteMdp m(
      states, actions,
      TransitionModel(
          [](const Eigen::VectorXd& s, const Eigen::VectorXd& a) -> Eigen::VectorXd {
            return Eigen::Vector2d(0.8 * s[0] + a[0], 0.5 * s[1] - a[0]);
          },
          cov),
      RewardModel{[](const Eigen::VectorXd&, const Eigen::VectorXd&) { return 0.0; }, 0.0, 0.0},
      0.5);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> scale(1e-3, 1e3);
  for (std::size_t s = 0; s < m.num_states(); ++s) {
    for (std::size_t a = 0; a < m.num_actions(); ++a) {
      // Normalization makes the result independent of any positive rescaling.
      const Eigen::VectorXd w = scale(rng) * grid_density(m, m.mean(s, a));
      const Eigen::VectorXd oracle = w / w.sum();
      const Eigen::VectorXd p = discrete_transition_distribution(m, s, a);
      EXPECT_LT((p - oracle).cwiseAbs().maxCoeff(), 1e-14);
    }
  }
}

TEST(TransitionDistributionTest, MostProbableNextStateMatchesArgmax) {
  const DiscreteMdp m = planar_toy_mdp();
  for (std::size_t s = 0; s < m.num_states(); ++s) {
    for (std::size_t a = 0; a < m.num_actions(); ++a) {
      const Eigen::VectorXd p = discrete_transition_distribution(m, s, a);
      Eigen::Index best = 0;
      for (Eigen::Index j = 1; j < p.size(); ++j) {
        if (p[j] > p[best]) best = j;
      }
      EXPECT_EQ(m.most_probable_next_state(s, a), static_cast<std::size_t>(best));
    }
  }
}

TEST(DiscreteMdpTest, ValidatesConstruction) {
  StateSpace states({{0.0, 1.0}}, {2});
  ActionSpace actions({{0.0, 1.0}}, {2});
  const MeanFunction mean = [](const Eigen::VectorXd& s, const Eigen::VectorXd&) -> Eigen::VectorXd {
    return s;
  };
  const RewardModel ok{[](const Eigen::VectorXd& s, const Eigen::VectorXd&) { return s[0]; }, 0.0,
                       1.0};
  const TransitionModel tm(mean, Eigen::MatrixXd::Identity(1, 1));
  EXPECT_THROW(DiscreteMdp(states, actions, tm, ok, 1.0), std::invalid_argument);
  EXPECT_THROW(DiscreteMdp(states, actions, tm, ok, -0.1), std::invalid_argument);
  const RewardModel too_narrow{ok.reward, 0.0, 0.5};
  EXPECT_THROW(DiscreteMdp(states, actions, tm, too_narrow, 0.5), std::invalid_argument);
  EXPECT_NO_THROW(DiscreteMdp(states, actions, tm, ok, 0.0));

  Eigen::MatrixXd asym(2, 2);
  asym << 1.0, 0.2, 0.1, 1.0;
  EXPECT_THROW(TransitionModel(mean, asym), std::invalid_argument);
  Eigen::MatrixXd indefinite(2, 2);
  indefinite << 1.0, 2.0, 2.0, 1.0;
  EXPECT_THROW(TransitionModel(mean, indefinite), std::invalid_argument);
  EXPECT_THROW(TransitionModel(mean, Eigen::MatrixXd::Zero(1, 1)), std::invalid_argument);
  EXPECT_THROW(TransitionModel(nullptr, Eigen::MatrixXd::Identity(1, 1)), std::invalid_argument);
}

TEST(ExhaustiveUpdateTest, ZeroDiscountGivesRewards) {
  const DiscreteMdp m = planar_toy_mdp(0.0);
  const QTable out = exhaustive_update(m, QTable::uniform_random(25, 5, 1));
  EXPECT_EQ(out.values(), m.rewards());
}

TEST(ExhaustiveUpdateTest, ConstantTable) {
  const DiscreteMdp m = planar_toy_mdp(0.9);
  const double c = 3.25;
  const QTable out = exhaustive_update(m, QTable(25, 5, c));
  EXPECT_LT((out.values() - (m.rewards().array() + 0.9 * c).matrix()).cwiseAbs().maxCoeff(),
            1e-12);
}

TEST(ExhaustiveUpdateTest, DoesNotModifyInputAndRejectsBadShape) {
  const DiscreteMdp m = three_state_mdp();
  const QTable q = QTable::uniform_random(3, 3, 2);
  const QTable copy = q;
  (void)exhaustive_update(m, q);
  EXPECT_TRUE(q == copy);
  EXPECT_THROW(exhaustive_update(m, QTable(3, 2)), std::invalid_argument);
}

TEST(ExhaustiveUpdateTest, ThreadCountDoesNotChangeResult) {
  const DiscreteMdp m = planar_toy_mdp();
  const QTable q = QTable::uniform_random(25, 5, 9);
  EXPECT_TRUE(exhaustive_update(m, q, 1) == exhaustive_update(m, q, 4));
}

TEST(ExhaustiveUpdateTest, ContractionOnRandomPairs) {
  const DiscreteMdp m = planar_toy_mdp(0.9);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const QTable q1(testing::random_matrix(25, 5, rng, -10.0, 10.0));
    const QTable q2(testing::random_matrix(25, 5, rng, -10.0, 10.0));
    EXPECT_LE(sup_error(exhaustive_update(m, q1), exhaustive_update(m, q2)),
              0.9 * sup_error(q1, q2) + 1e-12);
  }
}

TEST(ExhaustiveUpdateTest, PreservesValueBounds) {
  const DiscreteMdp m = three_state_mdp(0.8);
  const double lo = m.r_min() / (1.0 - 0.8);
  const double hi = m.r_max() / (1.0 - 0.8);
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const QTable q(testing::random_matrix(3, 3, rng, lo, hi));
    const QTable out = exhaustive_update(m, q);
    EXPECT_GE(out.values().minCoeff(), lo - 1e-12);
    EXPECT_LE(out.values().maxCoeff(), hi + 1e-12);
  }
}

TEST(ValueIterationTest, ReachesFixedPoint) {
  const DiscreteMdp m = planar_toy_mdp(0.9);
  const auto vi = value_iteration(m, 1e-10);
  EXPECT_TRUE(vi.converged);
  EXPECT_LT(sup_error(exhaustive_update(m, vi.q), vi.q), 1e-9);
}

TEST(ValueIterationTest, ReportsNonConvergenceAtSweepCap) {
  const DiscreteMdp m = planar_toy_mdp(0.9);
  const auto vi = value_iteration(m, 1e-12, 3);
  EXPECT_FALSE(vi.converged);
  EXPECT_EQ(vi.sweeps, 3);
}

TEST(IidUpdateTest, ZeroDiscountGivesRewards) {
  const DiscreteMdp m = planar_toy_mdp(0.0);
  const QTable out = iid_update(m, QTable::uniform_random(25, 5, 1), 7, 3);
  EXPECT_EQ(out.values(), m.rewards());
}

TEST(IidUpdateTest, PointMassKernel) {
  const DiscreteMdp m = three_state_mdp(0.9, 1e-6);
  const QTable q = QTable::uniform_random(3, 3, 8);
  const QTable out = iid_update(m, q, 25, 17);
  const Eigen::VectorXd v = q.state_values();
  for (std::size_t s = 0; s < 3; ++s) {
    for (std::size_t a = 0; a < 3; ++a) {
      // Mean s + a clamps onto the grid at {-1, 0, 1}.
      const double target = std::clamp(m.states().point(s)[0] + m.actions().point(a)[0], -1.0, 1.0);
      const std::size_t j = m.states().nearest(Eigen::VectorXd::Constant(1, target));
      EXPECT_NEAR(out(s, a), m.reward(s, a) + 0.9 * v[static_cast<Eigen::Index>(j)], 1e-12);
    }
  }
}

TEST(IidUpdateTest, WithinFourStandardErrorsOfExhaustive) {
  const DiscreteMdp m = three_state_mdp(0.9, 0.5);
  const QTable q = QTable::uniform_random(3, 3, 21);
  const int n = 10000;
  const QTable sampled = iid_update(m, q, n, 99);
  const QTable exact = exhaustive_update(m, q);
  const Eigen::VectorXd v = q.state_values();
  for (std::size_t s = 0; s < 3; ++s) {
    for (std::size_t a = 0; a < 3; ++a) {
      const Eigen::VectorXd p = discrete_transition_distribution(m, s, a);
      const double mean = p.dot(v);
      const double var = p.dot((v.array() - mean).square().matrix());
      const double se = 0.9 * std::sqrt(var / n);
      EXPECT_LE(std::abs(sampled(s, a) - exact(s, a)), 4.0 * se);
    }
  }
}

TEST(IidUpdateTest, SeededReproducibleAndThreadIndependent) {
  const DiscreteMdp m = planar_toy_mdp();
  const QTable q = QTable::uniform_random(25, 5, 2);
  const QTable a = iid_update(m, q, 50, 1234, 1);
  const QTable b = iid_update(m, q, 50, 1234, 3);
  const QTable c = iid_update(m, q, 50, 1235, 1);
  EXPECT_TRUE(a == b);
  EXPECT_FALSE(a == c);
  EXPECT_THROW(iid_update(m, q, 0, 1), std::invalid_argument);
}

TEST(DiscreteMdpTest, WithGammaSharesModel) {
  const DiscreteMdp m = planar_toy_mdp(0.9);
  const DiscreteMdp m0 = m.with_gamma(0.0);
  EXPECT_EQ(m0.gamma(), 0.0);
  EXPECT_EQ(m0.rewards(), m.rewards());
  EXPECT_THROW(m.with_gamma(1.0), std::invalid_argument);
}

}  // namespace
}  // namespace hamq
