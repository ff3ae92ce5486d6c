#include "evil/bc.h"

#include <stdexcept>

#include "evil/adam.h"

namespace evil {

PolicyPtr behavioural_cloning(const std::vector<Trajectory>& demos, const Environment& env,
                              const BcConfig& config, std::uint64_t seed) {
  std::size_t count = 0;
  for (const auto& d : demos) {
    if (d.actions.size() != d.states.size()) throw std::invalid_argument("behavioural_cloning: demo without actions");
    count += d.size();
  }
  if (demos.empty() || count == 0) throw std::invalid_argument("behavioural_cloning: empty demo set");

  const bool tabular = config.policy_class == PolicyClass::kTabular ||
                       (config.policy_class == PolicyClass::kAuto && env.num_states() > 0);
  PolicyPtr policy;
  if (tabular) {
    if (env.num_states() <= 0) throw std::invalid_argument("behavioural_cloning: tabular policy needs a tabular environment");
    policy = std::make_unique<TabularSoftmaxPolicy>(env.num_states(), env.action_space().size);
  } else {
    Rng rng = make_rng(seed, {tag(Stream::kInit), 3});
    policy = std::make_unique<MlpPolicy>(env.feature_dim(), env.action_space(), config.hidden, rng);
  }

  Adam opt(policy->num_params());
  Eigen::VectorXd grad(policy->num_params());
  const double inv = 1.0 / static_cast<double>(count);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    grad.setZero();
    for (const auto& d : demos) {
      for (std::size_t h = 0; h < d.size(); ++h) {
        policy->add_log_prob_gradient(env, d.states[h], d.actions[h], inv, grad);
      }
    }
    Eigen::VectorXd p = policy->parameters();
    opt.step(p, -grad, config.learning_rate);
    policy->set_parameters(p);
  }
  return policy;
}

}  // namespace evil
