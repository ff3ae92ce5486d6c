#ifndef EVIL_WRAPPERS_H_
#define EVIL_WRAPPERS_H_

#include <cstdint>
#include <optional>

#include "evil/env.h"
#include "evil/tabular_mdp.h"

namespace evil {

// With probability p_tremble the requested action is replaced by one drawn
// uniformly from the action space. Draws come from the rollout's environment
// generator; p_tremble == 0 consumes nothing, making the wrapper an exact
// identity.
class TrembleWrapper : public Environment {
 public:
  TrembleWrapper(EnvPtr inner, double p_tremble);

  std::string kind() const override { return inner_->kind(); }
  int horizon() const override { return inner_->horizon(); }
  int num_states() const override { return inner_->num_states(); }
  int feature_dim() const override { return inner_->feature_dim(); }
  ActionSpace action_space() const override { return inner_->action_space(); }

  State reset(Rng& rng) const override { return inner_->reset(rng); }
  StepResult step(const State& s, const Action& a, Rng& rng) const override;
  double reward(const State& s, const Action& a) const override { return inner_->reward(s, a); }
  Eigen::VectorXd features(const State& s) const override { return inner_->features(s); }
  nlohmann::json config() const override;

  // For a tabular inner model: the MDP whose transitions and rewards are the
  // tremble-mixed ones, which makes exact evaluation possible.
  const TabularMdp* tabular() const override {
    return equivalent_ ? &*equivalent_ : nullptr;
  }

  const Environment& inner() const { return *inner_; }
  double p_tremble() const { return p_tremble_; }

 private:
  EnvPtr inner_;
  double p_tremble_;
  std::optional<TabularMdp> equivalent_;
};

// An environment whose dynamics were perturbed from a base environment.
// State and action spaces are unchanged.
struct DynamicsVariant {
  EnvPtr base;
  EnvPtr env;
  nlohmann::json perturbation;  // named parameter overrides that were applied
  std::uint64_t sample_seed = 0;
};

// Tabular base: each action a slips to a uniformly random action with
// probability magnitude * u_a, u_a ~ U[0.5, 1]. Point-mass base: action_scale
// is multiplied by a factor drawn from U[1 - magnitude, 1 + magnitude].
DynamicsVariant sample_dynamics_variant(const EnvPtr& base, double magnitude,
                                        std::uint64_t seed);

}  // namespace evil

#endif  // EVIL_WRAPPERS_H_
