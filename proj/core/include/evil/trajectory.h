#ifndef EVIL_TRAJECTORY_H_
#define EVIL_TRAJECTORY_H_

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "evil/env.h"

namespace evil {

class Policy;
class RewardSource;

// xi = (s_1, a_1, r_1, ..., s_H, a_H, r_H). Shorter than H only when the
// environment terminated early, in which case done_mask.back() is set.
struct Trajectory {
  std::vector<State> states;
  std::vector<Action> actions;           // sampled by the policy
  std::vector<Action> executed_actions;  // what the environment executed
  std::vector<double> rewards;
  std::vector<std::uint8_t> done_mask;

  std::size_t size() const { return states.size(); }
  bool empty() const { return states.empty(); }
  double total_reward() const;
};

// Rolls out one episode. Rewards are labelled by reward_source. Identical
// (env, policy parameters, seed) give identical trajectories.
Trajectory rollout(const Environment& env, const Policy& policy,
                   const RewardSource& reward_source, std::uint64_t seed);

// Batch of episodes with per-episode seeds derived from seed.
std::vector<Trajectory> rollouts(const Environment& env, const Policy& policy,
                                 const RewardSource& reward_source, int count,
                                 std::uint64_t seed);

// CSV with header step,state,action,reward; vectors are space-separated.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

}  // namespace evil

#endif  // EVIL_TRAJECTORY_H_
