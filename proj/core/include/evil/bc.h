#ifndef EVIL_BC_H_
#define EVIL_BC_H_

#include <vector>

#include "evil/policy.h"
#include "evil/trajectory.h"

namespace evil {

enum class PolicyClass { kAuto, kTabular, kMlp };

struct BcConfig {
  PolicyClass policy_class = PolicyClass::kAuto;
  int epochs = 300;
  double learning_rate = 0.05;
  std::vector<int> hidden{64, 64};
};

// Behavioural cloning: full-batch Adam on the demo action log-likelihood.
// Uses the sampled (not executed) demo actions.
PolicyPtr behavioural_cloning(const std::vector<Trajectory>& demos, const Environment& env,
                              const BcConfig& config, std::uint64_t seed);

}  // namespace evil

#endif  // EVIL_BC_H_
