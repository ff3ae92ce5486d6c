#include "evil/reward.h"

#include <stdexcept>

namespace evil {

std::vector<double> GroundTruthReward::label(const Environment& env, const Trajectory& traj) const {
  std::vector<double> r(traj.size());
  for (std::size_t h = 0; h < traj.size(); ++h) {
    const Action& a = traj.executed_actions.empty() ? traj.actions[h] : traj.executed_actions[h];
    r[h] = env.reward(traj.states[h], a);
  }
  return r;
}

std::vector<double> StateReward::label(const Environment& env, const Trajectory& traj) const {
  std::vector<double> r(traj.size());
  for (std::size_t h = 0; h < traj.size(); ++h) r[h] = fn_(env, traj.states[h]);
  return r;
}

RewardPtr make_table_reward(std::string name, Eigen::VectorXd table) {
  return std::make_shared<StateReward>(
      std::move(name), [table = std::move(table)](const Environment&, const State& s) {
        const int i = as_index(s);
        if (i < 0 || i >= table.size()) throw std::out_of_range("table reward: state out of range");
        return table[i];
      });
}

}  // namespace evil
