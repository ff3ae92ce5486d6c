#include <cmath>
#include <cstdlib>
#include <sstream>

#include <gtest/gtest.h>

#include "evil/env_config.h"
#include "evil/point_mass.h"
#include "evil/policy.h"
#include "evil/reward.h"
#include "evil/tabular_mdp.h"
#include "evil/trajectory.h"
#include "evil/wrappers.h"
#include "test_util.h"

namespace evil {
namespace {

EnvPtr gridworld5() { return std::make_shared<const TabularMdp>(make_gridworld(GridworldOptions{})); }

void expect_rows_sum_to_one(const TabularMdp& mdp) {
  for (int s = 0; s < mdp.num_states(); ++s) {
    for (int a = 0; a < mdp.num_actions(); ++a) {
      double total = 0.0;
      for (int n = 0; n < mdp.num_states(); ++n) {
        EXPECT_GE(mdp.transition(s, a, n), 0.0);
        total += mdp.transition(s, a, n);
      }
      EXPECT_NEAR(total, 1.0, 1e-12) << "row (" << s << ", " << a << ")";
    }
  }
}

void expect_same_trajectory(const Trajectory& a, const Trajectory& b) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t h = 0; h < a.size(); ++h) {
    EXPECT_EQ(a.states[h], b.states[h]);
    EXPECT_EQ(a.actions[h], b.actions[h]);
    EXPECT_EQ(a.executed_actions[h], b.executed_actions[h]);
    EXPECT_EQ(a.rewards[h], b.rewards[h]);
  }
}

TEST(Gridworld, LayoutAndDynamics) {
  const TabularMdp g = make_gridworld(GridworldOptions{});
  EXPECT_EQ(g.num_states(), 25);
  EXPECT_EQ(g.num_actions(), 4);
  EXPECT_EQ(g.horizon(), 20);
  EXPECT_TRUE(g.deterministic());
  expect_rows_sum_to_one(g);
  const int goal = 0;
  for (int a = 0; a < 4; ++a) {
    EXPECT_EQ(g.transition(goal, a, goal), 1.0);
    EXPECT_EQ(g.reward_table()(goal, a), 1.0);
  }
  // corner (4, 4): up and right bump into the wall
  const int corner = 24;
  EXPECT_EQ(g.transition(corner, kUp, corner), 1.0);
  EXPECT_EQ(g.transition(corner, kRight, corner), 1.0);
  EXPECT_EQ(g.transition(corner, kLeft, 23), 1.0);
  EXPECT_EQ(g.transition(corner, kDown, 19), 1.0);
  EXPECT_EQ(g.reward_table()(corner, kUp), -0.01);
  EXPECT_EQ(g.initial_dist()[corner], 1.0);
}

TEST(Gridworld, TwoByTwoRowsAreDistributions) {
  const TabularMdp g = make_gridworld(2, 2, {0, 0}, 0.0, 1.0);
  EXPECT_EQ(g.num_states(), 4);
  expect_rows_sum_to_one(g);
}

TEST(Gridworld, RejectsBadLayouts) {
  EXPECT_THROW(make_gridworld(5, 5, {7, 0}, -0.01, 1.0), std::invalid_argument);
  EXPECT_THROW(make_gridworld(1, 5, {0, 0}, -0.01, 1.0), std::invalid_argument);
}

TEST(TabularMdp, RejectsMalformedTransitions) {
  EXPECT_THROW(TabularMdp(1, 1, {0.5}, Eigen::MatrixXd::Zero(1, 1), 1, Eigen::VectorXd::Ones(1)),
               std::invalid_argument);
  EXPECT_THROW(TabularMdp(2, 1, {0.5, 0.4, 0.0, 1.0}, Eigen::MatrixXd::Zero(2, 1), 1,
                          Eigen::VectorXd::Constant(2, 0.5)),
               std::invalid_argument);
  EXPECT_THROW(TabularMdp(1, 1, {1.0}, Eigen::MatrixXd::Zero(1, 1), 0, Eigen::VectorXd::Ones(1)),
               std::invalid_argument);
}

TEST(Rollout, PureFunctionOfSeed) {
  Rng rng(3);
  const auto mdp = std::make_shared<const TabularMdp>(testing::random_mdp(rng, 6, 3, 15));
  const TabularSoftmaxPolicy policy(Eigen::MatrixXd::Random(6, 3));
  const GroundTruthReward truth;
  const Trajectory a = rollout(*mdp, policy, truth, 42);
  const Trajectory b = rollout(*mdp, policy, truth, 42);
  expect_same_trajectory(a, b);
  const Trajectory c = rollout(*mdp, policy, truth, 43);
  bool differs = false;
  for (std::size_t h = 0; h < a.size(); ++h) differs |= a.actions[h] != c.actions[h];
  EXPECT_TRUE(differs);
}

TEST(Rollout, RewardsAreGroundTruthOfExecutedActions) {
  const EnvPtr env = std::make_shared<TrembleWrapper>(gridworld5(), 0.5);
  const TabularSoftmaxPolicy policy(25, 4);
  const GroundTruthReward truth;
  const Trajectory t = rollout(*env, policy, truth, 7);
  ASSERT_EQ(t.size(), 20u);
  for (std::size_t h = 0; h < t.size(); ++h) {
    EXPECT_EQ(t.rewards[h], env->reward(t.states[h], t.executed_actions[h]));
  }
}

TEST(Rollout, DeterministicEnvAndPolicyGiveSameTrajectoryForAnySeed) {
  const EnvPtr env = gridworld5();
  const DeterministicTablePolicy policy(std::vector<int>(25, kLeft), 4);
  const GroundTruthReward truth;
  expect_same_trajectory(rollout(*env, policy, truth, 1), rollout(*env, policy, truth, 99));
}

TEST(Rollout, RejectsMismatchedActionSpaces) {
  const auto pm = std::make_shared<const PointMassEnv>();
  const TabularSoftmaxPolicy policy(25, 4);
  EXPECT_THROW(rollout(*pm, policy, GroundTruthReward{}, 0), std::invalid_argument);
}

TEST(Tremble, CertainTrembleIsUniformOverActions) {
  const TrembleWrapper env(gridworld5(), 1.0);
  Rng rng(11);
  const int n = 10000;
  std::vector<int> counts(4, 0);
  const State s = from_index(12);
  for (int i = 0; i < n; ++i) {
    const StepResult r = env.step(s, from_index(kUp), rng);
    EXPECT_TRUE(r.perturbed);
    ++counts[as_index(r.executed)];
  }
  const double p = 0.25;
  const double sd = std::sqrt(n * p * (1 - p));
  for (int c : counts) EXPECT_LE(std::abs(c - n * p), 3 * sd);
}

TEST(Tremble, PerturbationRateMatchesP) {
  const TrembleWrapper env(gridworld5(), 0.05);
  Rng rng(5);
  const int n = 20000;
  int perturbed = 0;
  for (int i = 0; i < n; ++i) perturbed += env.step(from_index(12), from_index(kUp), rng).perturbed;
  const double sd = std::sqrt(n * 0.05 * 0.95);
  EXPECT_LE(std::abs(perturbed - n * 0.05), 3 * sd);
}

TEST(Tremble, ZeroProbabilityIsBitwiseIdenticalToInner) {
  Rng rng(8);
  const auto mdp = std::make_shared<const TabularMdp>(testing::random_mdp(rng, 5, 3, 12));
  const TrembleWrapper wrapped(mdp, 0.0);
  const TabularSoftmaxPolicy policy(Eigen::MatrixXd::Random(5, 3));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    expect_same_trajectory(rollout(*mdp, policy, GroundTruthReward{}, seed),
                           rollout(wrapped, policy, GroundTruthReward{}, seed));
  }
}

TEST(Tremble, RejectsInvalidProbability) {
  EXPECT_THROW(TrembleWrapper(gridworld5(), 1.5), std::invalid_argument);
  EXPECT_THROW(TrembleWrapper(gridworld5(), -0.1), std::invalid_argument);
}

TEST(Tremble, TabularEquivalentMatchesEmpiricalTransitions) {
  const TrembleWrapper env(gridworld5(), 0.2);
  const TabularMdp* eq = env.tabular();
  ASSERT_NE(eq, nullptr);
  expect_rows_sum_to_one(*eq);
  // From the centre, "up" stays intended with 1 - p + p / 4.
  EXPECT_NEAR(eq->transition(12, kUp, 17), 0.8 + 0.05, 1e-12);
  EXPECT_NEAR(eq->transition(12, kUp, 7), 0.05, 1e-12);
}

TEST(DynamicsVariant, ZeroMagnitudeKeepsTransitions) {
  const EnvPtr base = gridworld5();
  const DynamicsVariant v = sample_dynamics_variant(base, 0.0, 3);
  EXPECT_EQ(v.env->tabular()->transition_tensor(), base->tabular()->transition_tensor());
}

TEST(DynamicsVariant, SameSeedSameVariant) {
  const EnvPtr base = gridworld5();
  const DynamicsVariant a = sample_dynamics_variant(base, 0.3, 17);
  const DynamicsVariant b = sample_dynamics_variant(base, 0.3, 17);
  EXPECT_EQ(a.env->tabular()->transition_tensor(), b.env->tabular()->transition_tensor());
  EXPECT_EQ(a.perturbation, b.perturbation);
}

TEST(DynamicsVariant, TenVariantsAreDistinctValidMdps) {
  const EnvPtr base = gridworld5();
  std::vector<std::vector<double>> seen;
  for (std::uint64_t k = 0; k < 10; ++k) {
    const DynamicsVariant v = sample_dynamics_variant(base, 0.3, k);
    const TabularMdp* mdp = v.env->tabular();
    ASSERT_NE(mdp, nullptr);
    expect_rows_sum_to_one(*mdp);
    EXPECT_EQ(mdp->num_states(), 25);
    EXPECT_EQ(mdp->action_space(), base->action_space());
    for (double q : v.perturbation["slip_probability"]) {
      EXPECT_GE(q, 0.15);
      EXPECT_LE(q, 0.3);
    }
    for (const auto& other : seen) EXPECT_NE(other, mdp->transition_tensor());
    seen.push_back(mdp->transition_tensor());
  }
}

TEST(DynamicsVariant, PointMassScalesActionsWithinMagnitude) {
  const EnvPtr base = std::make_shared<const PointMassEnv>();
  for (std::uint64_t k = 0; k < 10; ++k) {
    const DynamicsVariant v = sample_dynamics_variant(base, 0.3, k);
    const double f = v.perturbation["action_scale_factor"];
    EXPECT_GE(f, 0.7);
    EXPECT_LE(f, 1.3);
    EXPECT_EQ(v.env->action_space(), base->action_space());
    EXPECT_EQ(v.env->feature_dim(), base->feature_dim());
  }
  EXPECT_THROW(sample_dynamics_variant(base, 1.5, 0), std::invalid_argument);
}

TEST(PointMass, StaysInBoundsUnderRandomActions) {
  const PointMassEnv env;
  Rng rng(21);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int episode = 0; episode < 50; ++episode) {
    State s = env.reset(rng);
    for (int h = 0; h < env.horizon(); ++h) {
      ASSERT_TRUE(env.in_bounds(s));
      Action a(2);
      a << u(rng), u(rng);
      const StepResult r = env.step(s, a, rng);
      EXPECT_TRUE(std::isfinite(env.reward(s, a)));
      s = r.next;
      if (r.done) break;
    }
  }
}

TEST(PointMass, ReachingGoalTerminatesEpisode) {
  PointMassOptions o;
  o.start_position = o.goal;
  o.start_noise = 0.0;
  const PointMassEnv env(o);
  Rng rng(0);
  const State s = env.reset(rng);
  EXPECT_TRUE(env.step(s, Eigen::Vector2d::Zero(), rng).done);
}

TEST(EnvConfig, RoundTripsThroughConfig) {
  Rng rng(2);
  const std::vector<EnvPtr> envs = {
      gridworld5(), std::make_shared<const TabularMdp>(testing::random_mdp(rng, 4, 2, 6)),
      std::make_shared<const PointMassEnv>(),
      std::make_shared<TrembleWrapper>(gridworld5(), 0.05),
      sample_dynamics_variant(gridworld5(), 0.3, 4).env};
  for (const EnvPtr& env : envs) {
    const EnvPtr copy = make_environment(env->config());
    EXPECT_EQ(copy->config(), env->config());
    if (env->tabular()) {
      EXPECT_EQ(copy->tabular()->transition_tensor(), env->tabular()->transition_tensor());
      EXPECT_EQ(copy->tabular()->reward_table(), env->tabular()->reward_table());
    }
  }
}

TEST(EnvConfig, ErrorsNameTheField) {
  try {
    make_environment({{"kind", "gridworld"}, {"width", "five"}});
    FAIL() << "expected a throw";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("width"), std::string::npos) << e.what();
  }
  EXPECT_THROW(make_environment({{"kind", "maze"}}), std::invalid_argument);
  EXPECT_THROW(make_environment(nlohmann::json::object()), std::invalid_argument);
}

TEST(Trajectory, CsvHasOneLineHeaderAndOneRowPerStep) {
  const EnvPtr env = gridworld5();
  const Trajectory t = rollout(*env, TabularSoftmaxPolicy(25, 4), GroundTruthReward{}, 1);
  std::ostringstream out;
  write_trajectory_csv(out, t);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "step,state,action,reward");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, static_cast<int>(t.size()));
}

}  // namespace
}  // namespace evil
