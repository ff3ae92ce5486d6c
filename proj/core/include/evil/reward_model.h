#ifndef EVIL_REWARD_MODEL_H_
#define EVIL_REWARD_MODEL_H_

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "evil/mlp.h"
#include "evil/reward.h"
#include "evil/trajectory.h"

namespace evil {

// States-only scalar reward f(s): a per-state table or a tanh network over
// the environment's state features.
class RewardModel {
 public:
  static RewardModel table(int num_states);
  static RewardModel table(Eigen::VectorXd values);
  static RewardModel network(int feature_dim, std::vector<int> hidden, Rng& rng, double output_gain = 1.0);
  // Table for tabular environments, 2x128 network otherwise.
  static RewardModel make_default(const Environment& env, std::uint64_t seed);

  bool is_table() const { return is_table_; }
  double value(const Environment& env, const State& s) const;
  // grad += scale * df(s)/dtheta
  void add_gradient(const Environment& env, const State& s, double scale,
                    Eigen::Ref<Eigen::VectorXd> grad) const;
  // Network models only: (||df/dx|| - 1)^2 at feature vector x, adding
  // scale * its parameter gradient into grad.
  double gradient_penalty(const Eigen::VectorXd& x, double scale, Eigen::Ref<Eigen::VectorXd> grad) const;

  int num_params() const { return static_cast<int>(params().size()); }
  const Eigen::VectorXd& params() const { return is_table_ ? table_ : net_.params(); }
  void set_params(const Eigen::VectorXd& p);

  nlohmann::json to_json() const;
  static RewardModel from_json(const nlohmann::json& j);

 private:
  bool is_table_ = true;
  Eigen::VectorXd table_;
  Mlp net_;
};

// r_hat(s) = sign * (1/K) sum_k f_k(s), sign = +1 unless the literal
// negated orientation is requested.
class DiscriminatorEnsemble {
 public:
  explicit DiscriminatorEnsemble(std::vector<RewardModel> members) : members_(std::move(members)) {}

  int size() const { return static_cast<int>(members_.size()); }
  const RewardModel& member(int k) const { return members_.at(k); }
  RewardModel& member(int k) { return members_.at(k); }
  double mean(const Environment& env, const State& s) const;

 private:
  std::vector<RewardModel> members_;
};

class EnsembleReward : public RewardSource {
 public:
  EnsembleReward(std::shared_ptr<const DiscriminatorEnsemble> ensemble, bool literal_sign = false,
                 std::string name = "irl_reward");
  std::string name() const override { return name_; }
  std::vector<double> label(const Environment& env, const Trajectory& traj) const override;
  double value(const Environment& env, const State& s) const;
  const DiscriminatorEnsemble& ensemble() const { return *ensemble_; }

 private:
  std::shared_ptr<const DiscriminatorEnsemble> ensemble_;
  double sign_;
  std::string name_;
};

struct DiscriminatorLoss {
  double loss = 0.0;
  double moment = 0.0;   // mean learner sum f - mean expert sum f
  double l2 = 0.0;       // ||theta||_2
  double penalty = 0.0;  // mean (||grad_x f|| - 1)^2 on interpolated states
  Eigen::VectorXd gradient;
};

struct LossOptions {
  double l2_coeff = 0.0;
  double gp_coeff = 0.0;
  int gp_samples = 64;
};

// l(f) = E_learner[sum_h f(s_h)] - E_expert[sum_h f(s_h)] + l2 ||theta||_2
//        + gp E_x[(||grad_x f(x)|| - 1)^2]
// with x uniform interpolations between random learner and expert state
// features. The penalty is skipped for table models (no continuous input).
// rng is needed only when the penalty is active.
DiscriminatorLoss discriminator_loss(const RewardModel& f, const Environment& env,
                                     const std::vector<const Trajectory*>& learner,
                                     const std::vector<const Trajectory*>& expert,
                                     const LossOptions& options, Rng* rng = nullptr);

double discriminator_loss(const RewardModel& f, const Environment& env,
                          const std::vector<Trajectory>& learner, const std::vector<Trajectory>& expert,
                          double l2_coeff, double gp_coeff, Rng* rng = nullptr);

// Pearson correlation; throws std::invalid_argument on fewer than two points
// or a zero-variance input.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

// Pearson correlation of learned vs true rewards over the steps of the given
// (learner-visited) trajectories. Requires at least two distinct states.
double reward_correlation(const RewardSource& learned, const RewardSource& truth,
                          const Environment& env, const std::vector<Trajectory>& visits);

}  // namespace evil

#endif  // EVIL_REWARD_MODEL_H_
