#ifndef EVIL_PG_H_
#define EVIL_PG_H_

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "evil/adam.h"
#include "evil/critic.h"
#include "evil/curve.h"
#include "evil/policy.h"
#include "evil/reward.h"
#include "evil/trajectory.h"

namespace evil {

// Clipped-surrogate policy gradient with GAE. Defaults follow the IRL inner
// loop (learning rate 4e-3, one gradient update per batch of 10 episodes);
// minibatch and epoch counts beyond that are our own.
struct PgConfig {
  LinearSchedule actor_lr{4e-3, 4e-3};
  LinearSchedule critic_lr{4e-3, 4e-3};
  double clip_epsilon = 0.2;
  double gae_lambda = 0.95;
  double discount = 1.0;
  int updates = 100;             // M
  int batch_trajectories = 10;   // episodes collected per update
  int epochs = 1;
  int minibatches = 1;
  double entropy_coef = 0.0;
  bool normalize_advantages = true;
  // Without a critic the baseline is zero and the critic is never updated.
  bool use_critic = true;

  void validate() const;
  nlohmann::json to_json() const;
  static PgConfig from_json(const nlohmann::json& j);
};

struct UpdateStats {
  double mean_return = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  std::int64_t samples = 0;
};

// Owns one learner (policy, critic, optimizer state). Collection and update
// are split so outer loops (IRL) can relabel rewards in between.
class PgTrainer {
 public:
  PgTrainer(const Environment& env, PgConfig config, PolicyPtr policy, CriticPtr critic);
  PgTrainer(const PgTrainer& other);
  PgTrainer& operator=(const PgTrainer&) = delete;
  PgTrainer(PgTrainer&&) = default;

  std::vector<Trajectory> collect(const RewardSource& reward, std::uint64_t seed) const;
  // One update on batch (whose rewards are already labelled). step/total
  // drive the learning-rate schedules. Throws std::runtime_error on a
  // non-finite loss.
  UpdateStats update(const std::vector<Trajectory>& batch, long step, long total);

  // Fresh parameters and optimizer state.
  void reset(PolicyPtr policy, CriticPtr critic);

  const Policy& policy() const { return *policy_; }
  const Critic& critic() const { return *critic_; }
  PolicyPtr release_policy() { return std::move(policy_); }
  CriticPtr release_critic() { return std::move(critic_); }
  const PgConfig& config() const { return config_; }
  std::int64_t interactions() const { return interactions_; }

 private:
  const Environment* env_;
  PgConfig config_;
  PolicyPtr policy_;
  CriticPtr critic_;
  Adam actor_opt_;
  Adam critic_opt_;
  std::int64_t interactions_ = 0;
};

// GAE(lambda) advantages and value targets for one trajectory.
void compute_gae(const std::vector<double>& rewards, const std::vector<double>& values,
                 double discount, double lambda, std::vector<double>& advantages,
                 std::vector<double>& targets);

struct PgResult {
  PolicyPtr policy;
  CriticPtr critic;
  TrainingCurve curve;
};

// Runs config.updates updates on reward, appending after each one the
// cumulative interaction count and the batch's mean return under tracked
// (defaults to reward). Deterministic given seed.
PgResult pg_train(const Environment& env, const RewardSource& reward, const PgConfig& config,
                  std::uint64_t seed, const Policy* init = nullptr,
                  const RewardSource* tracked = nullptr);

}  // namespace evil

#endif  // EVIL_PG_H_
