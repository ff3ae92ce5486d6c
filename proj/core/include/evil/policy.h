#ifndef EVIL_POLICY_H_
#define EVIL_POLICY_H_

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "evil/env.h"
#include "evil/mlp.h"

namespace evil {

// Stochastic policy pi: S -> Delta(A) with a flat parameter vector.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::string type() const = 0;
  virtual ActionSpace action_space() const = 0;

  virtual Action sample(const Environment& env, const State& s, Rng& rng) const = 0;
  virtual Action greedy(const Environment& env, const State& s) const = 0;
  virtual double log_prob(const Environment& env, const State& s, const Action& a) const = 0;
  virtual double entropy(const Environment& env, const State& s) const = 0;
  // grad += scale * d log pi(a|s) / d theta
  virtual void add_log_prob_gradient(const Environment& env, const State& s, const Action& a,
                                     double scale, Eigen::Ref<Eigen::VectorXd> grad) const = 0;
  // grad += scale * d H(pi(.|s)) / d theta
  virtual void add_entropy_gradient(const Environment& env, const State& s, double scale,
                                    Eigen::Ref<Eigen::VectorXd> grad) const = 0;
  // Action distribution at s; discrete policies only.
  virtual Eigen::VectorXd probabilities(const Environment& env, const State& s) const;

  virtual int num_params() const = 0;
  virtual Eigen::VectorXd parameters() const = 0;
  virtual void set_parameters(const Eigen::VectorXd& params) = 0;
  virtual std::unique_ptr<Policy> clone() const = 0;
  virtual nlohmann::json to_json() const = 0;
};

using PolicyPtr = std::unique_ptr<Policy>;

// Softmax over a logit table indexed (state, action).
class TabularSoftmaxPolicy : public Policy {
 public:
  TabularSoftmaxPolicy(int num_states, int num_actions);
  explicit TabularSoftmaxPolicy(Eigen::MatrixXd logits);

  std::string type() const override { return "tabular_softmax"; }
  ActionSpace action_space() const override { return {true, static_cast<int>(logits_.cols())}; }
  Action sample(const Environment& env, const State& s, Rng& rng) const override;
  Action greedy(const Environment& env, const State& s) const override;
  double log_prob(const Environment& env, const State& s, const Action& a) const override;
  double entropy(const Environment& env, const State& s) const override;
  void add_log_prob_gradient(const Environment& env, const State& s, const Action& a,
                             double scale, Eigen::Ref<Eigen::VectorXd> grad) const override;
  void add_entropy_gradient(const Environment& env, const State& s, double scale,
                            Eigen::Ref<Eigen::VectorXd> grad) const override;
  Eigen::VectorXd probabilities(const Environment& env, const State& s) const override;

  int num_params() const override { return static_cast<int>(logits_.size()); }
  Eigen::VectorXd parameters() const override;
  void set_parameters(const Eigen::VectorXd& params) override;
  std::unique_ptr<Policy> clone() const override {
    return std::make_unique<TabularSoftmaxPolicy>(*this);
  }
  nlohmann::json to_json() const override;

  const Eigen::MatrixXd& logits() const { return logits_; }
  Eigen::VectorXd probabilities(int state) const;

 private:
  Eigen::MatrixXd logits_;  // |S| x |A|
};

// Deterministic action table, e.g. the greedy policy of value iteration.
class DeterministicTablePolicy : public Policy {
 public:
  DeterministicTablePolicy(std::vector<int> actions, int num_actions);

  std::string type() const override { return "deterministic_table"; }
  ActionSpace action_space() const override { return {true, num_actions_}; }
  Action sample(const Environment& env, const State& s, Rng& rng) const override;
  Action greedy(const Environment& env, const State& s) const override;
  double log_prob(const Environment& env, const State& s, const Action& a) const override;
  double entropy(const Environment&, const State&) const override { return 0.0; }
  void add_log_prob_gradient(const Environment&, const State&, const Action&, double,
                             Eigen::Ref<Eigen::VectorXd>) const override {}
  void add_entropy_gradient(const Environment&, const State&, double,
                            Eigen::Ref<Eigen::VectorXd>) const override {}
  Eigen::VectorXd probabilities(const Environment& env, const State& s) const override;

  int num_params() const override { return 0; }
  Eigen::VectorXd parameters() const override { return {}; }
  void set_parameters(const Eigen::VectorXd&) override {}
  std::unique_ptr<Policy> clone() const override {
    return std::make_unique<DeterministicTablePolicy>(*this);
  }
  nlohmann::json to_json() const override;

  const std::vector<int>& actions() const { return actions_; }

 private:
  std::vector<int> actions_;
  int num_actions_;
};

// Small tanh network over state features. Discrete spaces: the network emits
// logits. Continuous spaces: the network emits the Gaussian mean and a
// state-independent log-std vector is appended to the parameters.
class MlpPolicy : public Policy {
 public:
  static constexpr double kMinLogStd = -5.0;
  static constexpr double kMaxLogStd = 2.0;

  MlpPolicy(int feature_dim, ActionSpace space, std::vector<int> hidden, Rng& rng,
            double init_log_std = -0.5);

  std::string type() const override { return "mlp"; }
  ActionSpace action_space() const override { return space_; }
  Action sample(const Environment& env, const State& s, Rng& rng) const override;
  Action greedy(const Environment& env, const State& s) const override;
  double log_prob(const Environment& env, const State& s, const Action& a) const override;
  double entropy(const Environment& env, const State& s) const override;
  void add_log_prob_gradient(const Environment& env, const State& s, const Action& a,
                             double scale, Eigen::Ref<Eigen::VectorXd> grad) const override;
  void add_entropy_gradient(const Environment& env, const State& s, double scale,
                            Eigen::Ref<Eigen::VectorXd> grad) const override;
  Eigen::VectorXd probabilities(const Environment& env, const State& s) const override;

  int num_params() const override;
  Eigen::VectorXd parameters() const override;
  void set_parameters(const Eigen::VectorXd& params) override;
  std::unique_ptr<Policy> clone() const override { return std::make_unique<MlpPolicy>(*this); }
  nlohmann::json to_json() const override;

  const Mlp& network() const { return net_; }
  const Eigen::VectorXd& log_std() const { return log_std_; }

 private:
  friend PolicyPtr policy_from_json(const nlohmann::json&);
  MlpPolicy(Mlp net, ActionSpace space, Eigen::VectorXd log_std);

  Mlp net_;
  ActionSpace space_;
  Eigen::VectorXd log_std_;  // continuous only, kept inside [kMinLogStd, kMaxLogStd]
};

// Fresh policy for env: zero logits (uniform) for tabular environments, a
// 2x64 tanh network otherwise.
PolicyPtr make_default_policy(const Environment& env, std::uint64_t seed);

PolicyPtr policy_from_json(const nlohmann::json& j);

}  // namespace evil

#endif  // EVIL_POLICY_H_
