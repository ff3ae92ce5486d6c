#include "evil/evaluate.h"

#include <stdexcept>

#include "evil/solvers.h"
#include "evil/trajectory.h"

namespace evil {

double evaluate(const Policy& policy, const Environment& env, const RewardSource& reward,
                int n_episodes, std::uint64_t seed) {
  if (n_episodes < 1) throw std::invalid_argument("evaluate: n_episodes must be >= 1");
  double total = 0.0;
  for (int i = 0; i < n_episodes; ++i) {
    total += rollout(env, policy, reward, derive_seed(seed, {static_cast<std::uint64_t>(i)})).total_reward();
  }
  return total / n_episodes;
}

double evaluate_exact(const Policy& policy, const Environment& env) {
  const TabularMdp* mdp = env.tabular();
  if (!mdp) throw std::invalid_argument("evaluate_exact: environment has no tabular model");
  return expected_return(*mdp, policy_table(policy, env));
}

double evaluate_exact(const Policy& policy, const Environment& env,
                      const Eigen::VectorXd& state_reward) {
  const TabularMdp* mdp = env.tabular();
  if (!mdp) throw std::invalid_argument("evaluate_exact: environment has no tabular model");
  if (state_reward.size() != mdp->num_states()) throw std::invalid_argument("evaluate_exact: reward size mismatch");
  const Eigen::MatrixXd reward = state_reward.replicate(1, mdp->num_actions());
  return expected_return(*mdp, policy_table(policy, env), reward);
}

}  // namespace evil
