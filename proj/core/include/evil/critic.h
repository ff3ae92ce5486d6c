#ifndef EVIL_CRITIC_H_
#define EVIL_CRITIC_H_

#include <memory>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "evil/env.h"
#include "evil/mlp.h"

namespace evil {

// State-value approximator V(s).
class Critic {
 public:
  virtual ~Critic() = default;
  virtual std::string type() const = 0;
  virtual double value(const Environment& env, const State& s) const = 0;
  // grad += scale * dV(s)/dtheta
  virtual void add_gradient(const Environment& env, const State& s, double scale,
                            Eigen::Ref<Eigen::VectorXd> grad) const = 0;
  virtual int num_params() const = 0;
  virtual Eigen::VectorXd parameters() const = 0;
  virtual void set_parameters(const Eigen::VectorXd& params) = 0;
  virtual std::unique_ptr<Critic> clone() const = 0;
  virtual nlohmann::json to_json() const = 0;
};

using CriticPtr = std::unique_ptr<Critic>;

class TabularCritic : public Critic {
 public:
  explicit TabularCritic(int num_states) : values_(Eigen::VectorXd::Zero(num_states)) {}
  explicit TabularCritic(Eigen::VectorXd values) : values_(std::move(values)) {}

  std::string type() const override { return "tabular_critic"; }
  double value(const Environment&, const State& s) const override { return values_[as_index(s)]; }
  void add_gradient(const Environment&, const State& s, double scale,
                    Eigen::Ref<Eigen::VectorXd> grad) const override {
    grad[as_index(s)] += scale;
  }
  int num_params() const override { return static_cast<int>(values_.size()); }
  Eigen::VectorXd parameters() const override { return values_; }
  void set_parameters(const Eigen::VectorXd& params) override;
  std::unique_ptr<Critic> clone() const override { return std::make_unique<TabularCritic>(*this); }
  nlohmann::json to_json() const override;

  const Eigen::VectorXd& values() const { return values_; }

 private:
  Eigen::VectorXd values_;
};

class MlpCritic : public Critic {
 public:
  MlpCritic(int feature_dim, std::vector<int> hidden, Rng& rng);
  explicit MlpCritic(Mlp net) : net_(std::move(net)) {}

  std::string type() const override { return "mlp_critic"; }
  double value(const Environment& env, const State& s) const override {
    return net_.forward(env.features(s))[0];
  }
  void add_gradient(const Environment& env, const State& s, double scale,
                    Eigen::Ref<Eigen::VectorXd> grad) const override;
  int num_params() const override { return net_.num_params(); }
  Eigen::VectorXd parameters() const override { return net_.params(); }
  void set_parameters(const Eigen::VectorXd& params) override { net_.set_params(params); }
  std::unique_ptr<Critic> clone() const override { return std::make_unique<MlpCritic>(*this); }
  nlohmann::json to_json() const override;

 private:
  Mlp net_;
};

CriticPtr make_default_critic(const Environment& env, std::uint64_t seed);
CriticPtr critic_from_json(const nlohmann::json& j);

}  // namespace evil

#endif  // EVIL_CRITIC_H_
