#ifndef EVIL_ENV_H_
#define EVIL_ENV_H_

#include <memory>
#include <string>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "evil/rng.h"

namespace evil {

// States and actions share one representation across environments. Discrete
// spaces store the index in element 0.
using State = Eigen::VectorXd;
using Action = Eigen::VectorXd;

inline int as_index(const Eigen::VectorXd& v) { return static_cast<int>(v[0]); }
inline Eigen::VectorXd from_index(int i) {
  return Eigen::VectorXd::Constant(1, static_cast<double>(i));
}

struct ActionSpace {
  bool discrete = true;
  int size = 0;  // number of actions, or dimension when continuous

  bool operator==(const ActionSpace&) const = default;
};

struct StepResult {
  State next;
  Action executed;  // differs from the requested action under wrappers
  bool done = false;
  bool perturbed = false;  // set when a wrapper replaced the action
};

class TabularMdp;

// Immutable environment model. All randomness is drawn from the generator
// passed in, so concurrent rollouts only need distinct generators.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string kind() const = 0;
  virtual int horizon() const = 0;
  // Number of discrete states, or 0 for continuous state spaces.
  virtual int num_states() const { return 0; }
  virtual int feature_dim() const = 0;
  virtual ActionSpace action_space() const = 0;

  virtual State reset(Rng& rng) const = 0;
  virtual StepResult step(const State& s, const Action& a, Rng& rng) const = 0;
  // Ground-truth reward r(s, a).
  virtual double reward(const State& s, const Action& a) const = 0;
  virtual Eigen::VectorXd features(const State& s) const = 0;

  // Structured config that rebuilds an equivalent environment.
  virtual nlohmann::json config() const = 0;

  // Non-null when the environment is an explicit tabular model.
  virtual const TabularMdp* tabular() const { return nullptr; }
};

using EnvPtr = std::shared_ptr<const Environment>;

}  // namespace evil

#endif  // EVIL_ENV_H_
