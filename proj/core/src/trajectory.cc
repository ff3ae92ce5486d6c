#include "evil/trajectory.h"

#include <numeric>
#include <ostream>
#include <stdexcept>

#include "evil/policy.h"
#include "evil/reward.h"

namespace evil {
namespace {

void write_vector(std::ostream& out, const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out << ' ';
    out << v[i];
  }
}

}  // namespace

double Trajectory::total_reward() const {
  return std::accumulate(rewards.begin(), rewards.end(), 0.0);
}

Trajectory rollout(const Environment& env, const Policy& policy,
                   const RewardSource& reward_source, std::uint64_t seed) {
  if (!(policy.action_space() == env.action_space())) {
    throw std::invalid_argument("rollout: policy action space does not match environment");
  }
  Rng policy_rng = make_rng(seed, {tag(Stream::kPolicy)});
  Rng env_rng = make_rng(seed, {tag(Stream::kEnvironment)});

  Trajectory traj;
  const int horizon = env.horizon();
  traj.states.reserve(horizon);
  traj.actions.reserve(horizon);
  traj.executed_actions.reserve(horizon);
  traj.done_mask.reserve(horizon);

  State s = env.reset(env_rng);
  for (int h = 0; h < horizon; ++h) {
    Action a = policy.sample(env, s, policy_rng);
    StepResult step = env.step(s, a, env_rng);
    traj.states.push_back(std::move(s));
    traj.actions.push_back(std::move(a));
    traj.executed_actions.push_back(std::move(step.executed));
    traj.done_mask.push_back(step.done ? 1 : 0);
    if (step.done) break;
    s = std::move(step.next);
  }
  traj.rewards = reward_source.label(env, traj);
  return traj;
}

std::vector<Trajectory> rollouts(const Environment& env, const Policy& policy,
                                 const RewardSource& reward_source, int count,
                                 std::uint64_t seed) {
  std::vector<Trajectory> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    out.push_back(rollout(env, policy, reward_source, derive_seed(seed, {static_cast<std::uint64_t>(i)})));
  }
  return out;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "step,state,action,reward\n";
  for (std::size_t h = 0; h < traj.size(); ++h) {
    out << h << ',';
    write_vector(out, traj.states[h]);
    out << ',';
    write_vector(out, traj.executed_actions.empty() ? traj.actions[h] : traj.executed_actions[h]);
    out << ',' << (h < traj.rewards.size() ? traj.rewards[h] : 0.0) << '\n';
  }
}

}  // namespace evil
