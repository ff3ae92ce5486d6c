#ifndef EVIL_EVALUATE_H_
#define EVIL_EVALUATE_H_

#include <cstdint>

#include "evil/env.h"
#include "evil/policy.h"
#include "evil/reward.h"

namespace evil {

// Monte Carlo estimate of J(pi, r) over n_episodes rollouts.
double evaluate(const Policy& policy, const Environment& env, const RewardSource& reward,
                int n_episodes, std::uint64_t seed);

// Exact ground-truth J(pi, r) through the occupancy recursion. Needs an
// environment with a tabular model (TabularMdp, or a tremble wrapper around
// one) and a discrete policy.
double evaluate_exact(const Policy& policy, const Environment& env);

// Exact J under a state-only reward table.
double evaluate_exact(const Policy& policy, const Environment& env,
                      const Eigen::VectorXd& state_reward);

}  // namespace evil

#endif  // EVIL_EVALUATE_H_
