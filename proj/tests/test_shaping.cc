#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "evil/critic.h"
#include "evil/evaluate.h"
#include "evil/point_mass.h"
#include "evil/policy.h"
#include "evil/potential.h"
#include "evil/reward.h"
#include "evil/shaping.h"
#include "evil/solvers.h"
#include "evil/trajectory.h"
#include "evil/wrappers.h"
#include "test_util.h"

namespace evil {
namespace {

double sum(const std::vector<double>& xs) {
  double t = 0.0;
  for (double x : xs) t += x;
  return t;
}

TabularMdp grid() { return make_gridworld(GridworldOptions{}); }

TEST(PotentialDiff, ConstantPotentialAndSelfLoopsGiveZero) {
  const TabularMdp g = grid();
  const TabularPotential c = TabularPotential::constant(25, 3.7);
  EXPECT_EQ(potential_diff(c, g, from_index(4), from_index(9)), 0.0);
  const TabularPotential r(Eigen::VectorXd::Random(25));
  EXPECT_EQ(potential_diff(r, g, from_index(6), from_index(6)), 0.0);
}

TEST(PotentialDiff, NonNegativeAlongOptimalPathUnderVStar) {
  const TabularMdp g = grid();
  const auto vi = value_iteration(g);
  const TabularPotential phi(vi.potential());
  const Trajectory t = rollout(g, vi.stationary_policy(), GroundTruthReward{}, 0);
  for (std::size_t h = 0; h + 1 < t.size(); ++h) {
    EXPECT_GE(potential_diff(phi, g, t.states[h], t.states[h + 1]), 0.0);
  }
}

TEST(Shape, ZeroPotentialLeavesRewardsUntouched) {
  const TabularMdp g = grid();
  const Trajectory t = rollout(g, TabularSoftmaxPolicy(25, 4), GroundTruthReward{}, 3);
  EXPECT_EQ(shape(t.rewards, TabularPotential::zeros(25), g, t), t.rewards);
}

TEST(Shape, ConstantPotentialMatchesBase) {
  const TabularMdp g = grid();
  const Trajectory t = rollout(g, TabularSoftmaxPolicy(25, 4), GroundTruthReward{}, 4);
  const auto shaped = shape(t.rewards, TabularPotential::constant(25, -2.5), g, t);
  for (std::size_t h = 0; h < t.size(); ++h) EXPECT_EQ(shaped[h], t.rewards[h]);
}

TEST(Shape, InteriorStepsAddPotentialDifferenceAndLastStepWraps) {
  const TabularMdp g = grid();
  const TabularPotential phi(Eigen::VectorXd::LinSpaced(25, 0.0, 2.4));
  const Trajectory t = rollout(g, TabularSoftmaxPolicy(25, 4), GroundTruthReward{}, 5);
  const auto shaped = shape(t.rewards, phi, g, t);
  const std::size_t n = t.size();
  for (std::size_t h = 0; h + 1 < n; ++h) {
    EXPECT_NEAR(shaped[h], t.rewards[h] + phi.value(g, t.states[h + 1]) - phi.value(g, t.states[h]), 1e-12);
  }
  EXPECT_NEAR(shaped[n - 1], t.rewards[n - 1] + phi.value(g, t.states[0]) - phi.value(g, t.states[n - 1]), 1e-12);
}

TEST(Shape, RejectsLengthMismatch) {
  const TabularMdp g = grid();
  const Trajectory t = rollout(g, TabularSoftmaxPolicy(25, 4), GroundTruthReward{}, 6);
  const std::vector<double> short_rewards(t.size() - 1, 0.0);
  EXPECT_THROW(shape(short_rewards, TabularPotential::zeros(25), g, t), std::invalid_argument);
}

TEST(Shape, TelescopesOnRandomTriples) {
  Rng rng(31);
  const auto pm = std::make_shared<const PointMassEnv>();
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 3 + trial % 5;
    const auto mdp = std::make_shared<const TabularMdp>(testing::random_mdp(rng, n, 2, 5 + trial % 7));
    const TabularSoftmaxPolicy policy(Eigen::MatrixXd::Random(n, 2) * 2.0);
    const TabularPotential phi(Eigen::VectorXd::Random(n) * 10.0);
    const Trajectory t = rollout(*mdp, policy, GroundTruthReward{}, trial);
    EXPECT_NEAR(sum(shape(t.rewards, phi, *mdp, t)), sum(t.rewards), 1e-9);

    MlpPolicy pm_policy(pm->feature_dim(), pm->action_space(), {8}, rng);
    MlpPotential pm_phi(pm->feature_dim(), rng, {16, 16}, 5.0);
    const Trajectory u = rollout(*pm, pm_policy, GroundTruthReward{}, trial);
    EXPECT_NEAR(sum(shape(u.rewards, pm_phi, *pm, u)), sum(u.rewards), 1e-9);
  }
}

TEST(Shape, EarlyTerminationWrapsAtLastVisitedState) {
  PointMassOptions o;
  o.start_noise = 0.0;
  o.start_position = {0.45, 0.6};
  const PointMassEnv env(o);
  // push right towards the goal at (0.6, 0.6)
  class Push : public MlpPolicy {
   public:
    using MlpPolicy::MlpPolicy;
    Action sample(const Environment&, const State&, Rng&) const override { return Eigen::Vector2d(1.0, 0.0); }
  };
  Rng rng(1);
  const Push push(env.feature_dim(), env.action_space(), {2}, rng);
  const Trajectory t = rollout(env, push, GroundTruthReward{}, 0);
  ASSERT_LT(static_cast<int>(t.size()), env.horizon());
  ASSERT_EQ(t.done_mask.back(), 1);
  MlpPotential phi(env.feature_dim(), rng, {8}, 3.0);
  const auto shaped = shape(t.rewards, phi, env, t);
  EXPECT_NEAR(sum(shaped), sum(t.rewards), 1e-12);
  EXPECT_NEAR(shaped.back(), t.rewards.back() + phi.value(env, t.states.front()) - phi.value(env, t.states.back()),
              1e-12);
}

TEST(Shape, LinearInPotential) {
  const TabularMdp g = grid();
  const Trajectory t = rollout(g, TabularSoftmaxPolicy(25, 4), GroundTruthReward{}, 7);
  const Eigen::VectorXd a = Eigen::VectorXd::Random(25);
  const Eigen::VectorXd b = Eigen::VectorXd::Random(25);
  const std::vector<double> zero(t.size(), 0.0);
  const auto fa = shape(zero, TabularPotential(a), g, t);
  const auto fb = shape(zero, TabularPotential(b), g, t);
  const auto fab = shape(zero, TabularPotential(2.0 * a - b), g, t);
  for (std::size_t h = 0; h < t.size(); ++h) EXPECT_NEAR(fab[h], 2.0 * fa[h] - fb[h], 1e-12);
}

TEST(ShapedReward, LabelsWithBaseNameSuffix) {
  const TabularMdp g = grid();
  const auto phi = std::make_shared<const TabularPotential>(Eigen::VectorXd::Random(25));
  const ShapedReward shaped(std::make_shared<GroundTruthReward>(), phi);
  EXPECT_EQ(shaped.name(), "ground_truth+shaping");
  const Trajectory t = rollout(g, TabularSoftmaxPolicy(25, 4), shaped, 8);
  const auto base = GroundTruthReward{}.label(g, t);
  EXPECT_EQ(t.rewards, shape(base, *phi, g, t));
  EXPECT_THROW(ShapedReward(nullptr, phi), std::invalid_argument);
}

// With the time-indexed optimal values as potential, the shaped reward of
// every transition equals the optimal advantage.
TEST(Shape, TimeIndexedVStarShapingEqualsOptimalAdvantage) {
  const TabularMdp g = grid();
  const auto vi = value_iteration(g);
  for (int h = 0; h < g.horizon(); ++h) {
    for (int s = 0; s < 25; ++s) {
      for (int a = 0; a < 4; ++a) {
        const int next = g.successors(s, a).front().first;
        const double shaped = g.reward_table()(s, a) + vi.values[h + 1][next] - vi.values[h][s];
        EXPECT_NEAR(shaped, vi.q[h](s, a) - vi.values[h][s], 1e-9);
      }
    }
  }
}

TEST(GreedyUnderShaping, VStarPotentialAttainsOptimum) {
  const TabularMdp g = grid();
  const auto vi = value_iteration(g);
  const auto policy = greedy_under_shaping(g, TabularPotential(vi.potential()));
  EXPECT_NEAR(evaluate_exact(policy, g), vi.optimal_return(g), 1e-9);
}

TEST(GreedyUnderShaping, ZeroPotentialIsMyopic) {
  const TabularMdp g = grid();
  const auto vi = value_iteration(g);
  const auto policy = greedy_under_shaping(g, TabularPotential::zeros(25));
  EXPECT_LT(evaluate_exact(policy, g), vi.optimal_return(g) - 1.0);
}

TEST(GreedyUnderShaping, InvariantToConstantOffset) {
  const TabularMdp g = grid();
  const Eigen::VectorXd v = value_iteration(g).potential();
  const auto a = greedy_under_shaping(g, TabularPotential(v));
  const auto b = greedy_under_shaping(g, TabularPotential((v.array() + 7.0).matrix()));
  EXPECT_NEAR(evaluate_exact(a, g), evaluate_exact(b, g), 1e-9);
}

TEST(GreedyUnderShaping, RejectsStochasticDynamics) {
  const auto g = std::make_shared<const TabularMdp>(grid());
  const TrembleWrapper tremble(g, 0.1);
  EXPECT_THROW(greedy_under_shaping(*tremble.tabular(), TabularPotential::zeros(25)),
               std::invalid_argument);
}

TEST(Potential, JsonRoundTripAndParameters) {
  Rng rng(3);
  const MlpPotential mlp(4, rng, {5, 5});
  const auto copy = potential_from_json(mlp.to_json());
  EXPECT_EQ(copy->parameters(), mlp.parameters());
  const TabularPotential tab(Eigen::VectorXd::Random(6));
  EXPECT_EQ(potential_from_json(tab.to_json())->parameters(), tab.parameters());
  const Eigen::VectorXd theta = Eigen::VectorXd::Random(mlp.num_params());
  EXPECT_EQ(mlp.with_parameters(theta)->parameters(), theta);
  EXPECT_THROW(tab.with_parameters(Eigen::VectorXd::Zero(2)), std::invalid_argument);
}

TEST(Potential, CriticPotentialReadsCriticValues) {
  const TabularMdp g = grid();
  const Eigen::VectorXd v = Eigen::VectorXd::Random(25);
  const CriticPotential phi(std::make_shared<TabularCritic>(v));
  EXPECT_EQ(potential_table(phi, g), v);
}

TEST(Potential, DefaultIsZeroTableOnTabularEnvironments) {
  const TabularMdp g = grid();
  const auto phi = make_default_potential(g, 1);
  EXPECT_EQ(phi->type(), "tabular_potential");
  EXPECT_EQ(phi->parameters(), Eigen::VectorXd::Zero(25));
  EXPECT_EQ(make_default_potential(PointMassEnv{}, 1)->type(), "mlp_potential");
}

TEST(GridCsv, HeaderThenRowsFromTop) {
  Eigen::VectorXd v(6);
  v << 0, 1, 2, 3, 4, 5;
  std::ostringstream out;
  write_grid_csv(out, v, 3, 2);
  EXPECT_EQ(out.str(), "row,x0,x1,x2\n1,3,4,5\n0,0,1,2\n");
  EXPECT_THROW(write_grid_csv(out, v, 4, 2), std::invalid_argument);
}

}  // namespace
}  // namespace evil
