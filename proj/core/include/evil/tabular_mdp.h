#ifndef EVIL_TABULAR_MDP_H_
#define EVIL_TABULAR_MDP_H_

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "evil/env.h"

namespace evil {

struct Cell {
  int x = 0;
  int y = 0;
};

// Finite-horizon MDP <S, A, T, H> with reward table r(s, a).
class TabularMdp : public Environment {
 public:
  // transition is indexed [(s * A + a) * S + s'].
  TabularMdp(int num_states, int num_actions, std::vector<double> transition,
             Eigen::MatrixXd reward, int horizon, Eigen::VectorXd initial_dist);

  std::string kind() const override { return kind_; }
  int horizon() const override { return horizon_; }
  int num_states() const override { return num_states_; }
  int num_actions() const { return num_actions_; }
  int feature_dim() const override { return static_cast<int>(features_.cols()); }
  ActionSpace action_space() const override { return {true, num_actions_}; }

  State reset(Rng& rng) const override;
  StepResult step(const State& s, const Action& a, Rng& rng) const override;
  double reward(const State& s, const Action& a) const override {
    return reward_(as_index(s), as_index(a));
  }
  Eigen::VectorXd features(const State& s) const override {
    return features_.row(as_index(s)).transpose();
  }
  nlohmann::json config() const override;
  const TabularMdp* tabular() const override { return this; }

  double transition(int s, int a, int next) const {
    return transition_[(static_cast<std::size_t>(s) * num_actions_ + a) * num_states_ + next];
  }
  const std::vector<double>& transition_tensor() const { return transition_; }
  const Eigen::MatrixXd& reward_table() const { return reward_; }
  const Eigen::VectorXd& initial_dist() const { return initial_dist_; }
  const Eigen::MatrixXd& feature_matrix() const { return features_; }
  // Successors of (s, a) with non-zero probability.
  const std::vector<std::pair<int, double>>& successors(int s, int a) const {
    return successors_[static_cast<std::size_t>(s) * num_actions_ + a];
  }
  bool deterministic() const;

  // Optional metadata carried by constructed variants.
  void set_features(Eigen::MatrixXd features);
  void set_kind(std::string kind, nlohmann::json extra);
  const nlohmann::json& extra_config() const { return extra_; }

  // Copy with a different transition tensor (same spaces, reward, features).
  TabularMdp with_transition(std::vector<double> transition) const;

 private:
  void build_successors();

  int num_states_;
  int num_actions_;
  std::vector<double> transition_;
  Eigen::MatrixXd reward_;
  int horizon_;
  Eigen::VectorXd initial_dist_;
  Eigen::MatrixXd features_;
  std::vector<std::vector<std::pair<int, double>>> successors_;
  std::string kind_ = "tabular";
  nlohmann::json extra_ = nlohmann::json::object();
};

struct GridworldOptions {
  int width = 5;
  int height = 5;
  Cell goal{0, 0};
  Cell start{4, 4};
  double step_penalty = -0.01;
  double goal_reward = 1.0;
  int horizon = 20;
};

enum GridAction : int { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };

// Deterministic 4-action gridworld. State index is y * width + x with y = 0
// the bottom row. Off-grid moves self-loop; the goal is absorbing and pays
// goal_reward per step spent there, every other state pays step_penalty.
TabularMdp make_gridworld(const GridworldOptions& options);

inline TabularMdp make_gridworld(int width, int height, Cell goal,
                                 double step_penalty, double goal_reward) {
  GridworldOptions o;
  o.width = width;
  o.height = height;
  o.goal = goal;
  o.start = {width - 1, height - 1};
  o.step_penalty = step_penalty;
  o.goal_reward = goal_reward;
  return make_gridworld(o);
}

}  // namespace evil

#endif  // EVIL_TABULAR_MDP_H_
