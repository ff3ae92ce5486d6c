#ifndef EVIL_REWARD_H_
#define EVIL_REWARD_H_

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "evil/env.h"
#include "evil/trajectory.h"

namespace evil {

// A named per-step reward over realized trajectories. Labelling sees the whole
// trajectory so that shaped rewards can use the terminal wrap.
class RewardSource {
 public:
  virtual ~RewardSource() = default;
  virtual std::string name() const = 0;
  virtual std::vector<double> label(const Environment& env, const Trajectory& traj) const = 0;
};

using RewardPtr = std::shared_ptr<const RewardSource>;

// r(s_h, a_h) from the environment, evaluated on the executed action.
class GroundTruthReward : public RewardSource {
 public:
  std::string name() const override { return "ground_truth"; }
  std::vector<double> label(const Environment& env, const Trajectory& traj) const override;
};

// Reward depending on the state only, e.g. a recovered IRL reward.
class StateReward : public RewardSource {
 public:
  using Fn = std::function<double(const Environment&, const State&)>;
  StateReward(std::string name, Fn fn) : name_(std::move(name)), fn_(std::move(fn)) {}
  std::string name() const override { return name_; }
  std::vector<double> label(const Environment& env, const Trajectory& traj) const override;

 private:
  std::string name_;
  Fn fn_;
};

// Tabulated state reward for tabular environments.
RewardPtr make_table_reward(std::string name, Eigen::VectorXd table);

}  // namespace evil

#endif  // EVIL_REWARD_H_
