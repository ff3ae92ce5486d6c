#ifndef EVIL_POTENTIAL_H_
#define EVIL_POTENTIAL_H_

#include <memory>
#include <string>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "evil/critic.h"
#include "evil/env.h"
#include "evil/mlp.h"

namespace evil {

// State-only potential Phi: S -> R with a flat parameter vector theta.
// Potentials are immutable; evolution builds new ones via with_parameters.
class Potential {
 public:
  virtual ~Potential() = default;
  virtual std::string type() const = 0;
  virtual double value(const Environment& env, const State& s) const = 0;
  virtual int num_params() const = 0;
  virtual Eigen::VectorXd parameters() const = 0;
  virtual std::unique_ptr<Potential> with_parameters(const Eigen::VectorXd& theta) const = 0;
  virtual std::unique_ptr<Potential> clone() const = 0;
  virtual nlohmann::json to_json() const = 0;
};

using PotentialPtr = std::shared_ptr<const Potential>;

class TabularPotential : public Potential {
 public:
  explicit TabularPotential(Eigen::VectorXd table) : table_(std::move(table)) {}
  static TabularPotential zeros(int num_states) { return TabularPotential(Eigen::VectorXd::Zero(num_states)); }
  static TabularPotential constant(int num_states, double c) {
    return TabularPotential(Eigen::VectorXd::Constant(num_states, c));
  }

  std::string type() const override { return "tabular_potential"; }
  double value(const Environment&, const State& s) const override { return table_[as_index(s)]; }
  int num_params() const override { return static_cast<int>(table_.size()); }
  Eigen::VectorXd parameters() const override { return table_; }
  std::unique_ptr<Potential> with_parameters(const Eigen::VectorXd& theta) const override;
  std::unique_ptr<Potential> clone() const override { return std::make_unique<TabularPotential>(*this); }
  nlohmann::json to_json() const override;

  const Eigen::VectorXd& table() const { return table_; }

 private:
  Eigen::VectorXd table_;
};

// Scalar tanh network over the environment's state features (no action
// input). Default shape: 2 hidden layers of 128.
class MlpPotential : public Potential {
 public:
  MlpPotential(int feature_dim, Rng& rng, std::vector<int> hidden = {128, 128},
               double output_gain = 0.1);
  explicit MlpPotential(Mlp net) : net_(std::move(net)) {}

  std::string type() const override { return "mlp_potential"; }
  double value(const Environment& env, const State& s) const override {
    return net_.forward(env.features(s))[0];
  }
  int num_params() const override { return net_.num_params(); }
  Eigen::VectorXd parameters() const override { return net_.params(); }
  std::unique_ptr<Potential> with_parameters(const Eigen::VectorXd& theta) const override;
  std::unique_ptr<Potential> clone() const override { return std::make_unique<MlpPotential>(*this); }
  nlohmann::json to_json() const override;

 private:
  Mlp net_;
};

// Phi = V from a trained critic (the expert-critic shaping baseline).
class CriticPotential : public Potential {
 public:
  explicit CriticPotential(std::shared_ptr<const Critic> critic) : critic_(std::move(critic)) {}

  std::string type() const override { return "critic_potential"; }
  double value(const Environment& env, const State& s) const override { return critic_->value(env, s); }
  int num_params() const override { return critic_->num_params(); }
  Eigen::VectorXd parameters() const override { return critic_->parameters(); }
  std::unique_ptr<Potential> with_parameters(const Eigen::VectorXd& theta) const override;
  std::unique_ptr<Potential> clone() const override { return std::make_unique<CriticPotential>(*this); }
  nlohmann::json to_json() const override;

 private:
  std::shared_ptr<const Critic> critic_;
};

// Tabular potential for tabular environments, MlpPotential otherwise; zero
// table or fan-in initialized network.
std::unique_ptr<Potential> make_default_potential(const Environment& env, std::uint64_t seed);

std::unique_ptr<Potential> potential_from_json(const nlohmann::json& j);

// Phi evaluated on every state of a tabular environment.
Eigen::VectorXd potential_table(const Potential& potential, const Environment& env);

}  // namespace evil

#endif  // EVIL_POTENTIAL_H_
