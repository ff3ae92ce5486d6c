#include "evil/pg.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace evil {
namespace {

LinearSchedule schedule_from_json(const nlohmann::json& j, LinearSchedule fallback) {
  if (j.is_number()) return {j.get<double>(), j.get<double>()};
  return {j.value("start", fallback.start), j.value("end", fallback.end)};
}

double mean_total(const std::vector<Trajectory>& batch) {
  double sum = 0.0;
  for (const auto& t : batch) sum += t.total_reward();
  return batch.empty() ? 0.0 : sum / static_cast<double>(batch.size());
}

}  // namespace

void PgConfig::validate() const {
  if (!(clip_epsilon > 0.0 && clip_epsilon < 1.0)) throw std::invalid_argument("PgConfig: clip_epsilon must lie in (0, 1)");
  if (!(actor_lr.start > 0.0 && actor_lr.end > 0.0 && critic_lr.start > 0.0 && critic_lr.end > 0.0)) {
    throw std::invalid_argument("PgConfig: learning-rate schedule endpoints must be positive");
  }
  if (updates < 0) throw std::invalid_argument("PgConfig: updates must be >= 0");
  if (batch_trajectories < 1) throw std::invalid_argument("PgConfig: batch_trajectories must be >= 1");
  if (epochs < 1 || minibatches < 1) throw std::invalid_argument("PgConfig: epochs and minibatches must be >= 1");
  if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0)) throw std::invalid_argument("PgConfig: gae_lambda must lie in [0, 1]");
  if (!(discount > 0.0 && discount <= 1.0)) throw std::invalid_argument("PgConfig: discount must lie in (0, 1]");
}

nlohmann::json PgConfig::to_json() const {
  return {{"actor_lr", {{"start", actor_lr.start}, {"end", actor_lr.end}}},
          {"critic_lr", {{"start", critic_lr.start}, {"end", critic_lr.end}}},
          {"clip_epsilon", clip_epsilon},
          {"gae_lambda", gae_lambda},
          {"discount", discount},
          {"updates", updates},
          {"batch_trajectories", batch_trajectories},
          {"epochs", epochs},
          {"minibatches", minibatches},
          {"entropy_coef", entropy_coef},
          {"normalize_advantages", normalize_advantages},
          {"use_critic", use_critic}};
}

PgConfig PgConfig::from_json(const nlohmann::json& j) {
  PgConfig c;
  if (j.contains("actor_lr")) c.actor_lr = schedule_from_json(j.at("actor_lr"), c.actor_lr);
  if (j.contains("critic_lr")) c.critic_lr = schedule_from_json(j.at("critic_lr"), c.critic_lr);
  c.clip_epsilon = j.value("clip_epsilon", c.clip_epsilon);
  c.gae_lambda = j.value("gae_lambda", c.gae_lambda);
  c.discount = j.value("discount", c.discount);
  c.updates = j.value("updates", c.updates);
  c.batch_trajectories = j.value("batch_trajectories", c.batch_trajectories);
  c.epochs = j.value("epochs", c.epochs);
  c.minibatches = j.value("minibatches", c.minibatches);
  c.entropy_coef = j.value("entropy_coef", c.entropy_coef);
  c.normalize_advantages = j.value("normalize_advantages", c.normalize_advantages);
  c.use_critic = j.value("use_critic", c.use_critic);
  c.validate();
  return c;
}

void compute_gae(const std::vector<double>& rewards, const std::vector<double>& values,
                 double discount, double lambda, std::vector<double>& advantages,
                 std::vector<double>& targets) {
  const std::size_t n = rewards.size();
  advantages.assign(n, 0.0);
  targets.assign(n, 0.0);
  double running = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    // The episode ends after the last step (horizon or termination).
    const double next_value = (k + 1 < n) ? values[k + 1] : 0.0;
    const double delta = rewards[k] + discount * next_value - values[k];
    running = delta + discount * lambda * running;
    advantages[k] = running;
    targets[k] = running + values[k];
  }
}

PgTrainer::PgTrainer(const Environment& env, PgConfig config, PolicyPtr policy, CriticPtr critic)
    : env_(&env),
      config_(config),
      policy_(std::move(policy)),
      critic_(std::move(critic)),
      actor_opt_(policy_ ? policy_->num_params() : 0),
      critic_opt_(critic_ ? critic_->num_params() : 0) {
  config_.validate();
  if (!policy_ || !critic_) throw std::invalid_argument("PgTrainer: policy and critic are required");
  if (!(policy_->action_space() == env.action_space())) {
    throw std::invalid_argument("PgTrainer: policy action space does not match environment");
  }
}

PgTrainer::PgTrainer(const PgTrainer& other)
    : env_(other.env_),
      config_(other.config_),
      policy_(other.policy_->clone()),
      critic_(other.critic_->clone()),
      actor_opt_(other.actor_opt_),
      critic_opt_(other.critic_opt_),
      interactions_(other.interactions_) {}

std::vector<Trajectory> PgTrainer::collect(const RewardSource& reward, std::uint64_t seed) const {
  return rollouts(*env_, *policy_, reward, config_.batch_trajectories, seed);
}

void PgTrainer::reset(PolicyPtr policy, CriticPtr critic) {
  policy_ = std::move(policy);
  critic_ = std::move(critic);
  actor_opt_ = Adam(policy_->num_params());
  critic_opt_ = Adam(critic_->num_params());
}

UpdateStats PgTrainer::update(const std::vector<Trajectory>& batch, long step, long total) {
  struct Sample {
    const State* state;
    const Action* action;
    double old_log_prob;
    double advantage;
    double target;
  };
  std::vector<Sample> samples;
  UpdateStats stats;
  stats.mean_return = mean_total(batch);

  std::vector<double> values, adv, targets;
  for (const auto& traj : batch) {
    if (traj.rewards.size() != traj.size()) throw std::invalid_argument("PgTrainer::update: unlabelled trajectory");
    values.resize(traj.size());
    for (std::size_t h = 0; h < traj.size(); ++h) {
      values[h] = config_.use_critic ? critic_->value(*env_, traj.states[h]) : 0.0;
    }
    compute_gae(traj.rewards, values, config_.discount, config_.gae_lambda, adv, targets);
    for (std::size_t h = 0; h < traj.size(); ++h) {
      samples.push_back({&traj.states[h], &traj.actions[h],
                         policy_->log_prob(*env_, traj.states[h], traj.actions[h]), adv[h], targets[h]});
    }
  }
  stats.samples = static_cast<std::int64_t>(samples.size());
  interactions_ += stats.samples;
  if (samples.empty()) return stats;

  if (config_.normalize_advantages && samples.size() > 1) {
    double mean = 0.0;
    for (const auto& s : samples) mean += s.advantage;
    mean /= static_cast<double>(samples.size());
    double var = 0.0;
    for (const auto& s : samples) var += (s.advantage - mean) * (s.advantage - mean);
    const double sd = std::sqrt(var / static_cast<double>(samples.size()));
    for (auto& s : samples) s.advantage = (s.advantage - mean) / (sd + 1e-8);
  }

  const double actor_lr = config_.actor_lr.at(step, total);
  const double critic_lr = config_.critic_lr.at(step, total);
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  Rng shuffle_rng = make_rng(static_cast<std::uint64_t>(step), {tag(Stream::kBatch)});
  const double eps = config_.clip_epsilon;

  Eigen::VectorXd pgrad(policy_->num_params());
  Eigen::VectorXd vgrad(critic_->num_params());
  for (int epoch = 0; epoch < config_.epochs; ++epoch) {
    if (config_.minibatches > 1) std::shuffle(order.begin(), order.end(), shuffle_rng);
    const std::size_t mb = (samples.size() + config_.minibatches - 1) / config_.minibatches;
    for (std::size_t begin = 0; begin < samples.size(); begin += mb) {
      const std::size_t end = std::min(samples.size(), begin + mb);
      const double inv = 1.0 / static_cast<double>(end - begin);
      pgrad.setZero();
      vgrad.setZero();
      double policy_loss = 0.0, value_loss = 0.0, entropy = 0.0;
      for (std::size_t k = begin; k < end; ++k) {
        const Sample& s = samples[order[k]];
        const double ratio = std::exp(policy_->log_prob(*env_, *s.state, *s.action) - s.old_log_prob);
        const double clipped = std::clamp(ratio, 1.0 - eps, 1.0 + eps);
        policy_loss -= std::min(ratio * s.advantage, clipped * s.advantage) * inv;
        const bool active = !((s.advantage >= 0.0 && ratio > 1.0 + eps) ||
                              (s.advantage < 0.0 && ratio < 1.0 - eps));
        // Ascent direction; Adam descends on its negation below.
        if (active) policy_->add_log_prob_gradient(*env_, *s.state, *s.action, ratio * s.advantage * inv, pgrad);
        if (config_.entropy_coef != 0.0) {
          entropy += policy_->entropy(*env_, *s.state) * inv;
          policy_->add_entropy_gradient(*env_, *s.state, config_.entropy_coef * inv, pgrad);
        }
        if (config_.use_critic) {
          const double v = critic_->value(*env_, *s.state);
          value_loss += 0.5 * (v - s.target) * (v - s.target) * inv;
          critic_->add_gradient(*env_, *s.state, (v - s.target) * inv, vgrad);
        }
      }
      if (!std::isfinite(policy_loss) || !std::isfinite(value_loss) || !pgrad.allFinite() || !vgrad.allFinite()) {
        throw std::runtime_error("pg update " + std::to_string(step) + ": non-finite loss (policy " +
                                 std::to_string(policy_loss) + ", value " + std::to_string(value_loss) + ")");
      }
      Eigen::VectorXd p = policy_->parameters();
      actor_opt_.step(p, -pgrad, actor_lr);
      policy_->set_parameters(p);
      if (config_.use_critic) {
        Eigen::VectorXd c = critic_->parameters();
        critic_opt_.step(c, vgrad, critic_lr);
        critic_->set_parameters(c);
      }
      stats.policy_loss = policy_loss;
      stats.value_loss = value_loss;
      stats.entropy = entropy;
    }
  }
  return stats;
}

PgResult pg_train(const Environment& env, const RewardSource& reward, const PgConfig& config,
                  std::uint64_t seed, const Policy* init, const RewardSource* tracked) {
  config.validate();
  PolicyPtr policy = init ? init->clone() : make_default_policy(env, seed);
  PgTrainer trainer(env, config, std::move(policy), make_default_critic(env, seed));
  const RewardSource& track = tracked ? *tracked : reward;
  TrainingCurve curve(track.name());
  for (int j = 0; j < config.updates; ++j) {
    const auto batch = trainer.collect(reward, derive_seed(seed, {tag(Stream::kBatch), static_cast<std::uint64_t>(j)}));
    double performance = 0.0;
    if (tracked && tracked != &reward) {
      for (const auto& t : batch) {
        const auto r = tracked->label(env, t);
        for (double x : r) performance += x;
      }
      performance /= static_cast<double>(batch.size());
    } else {
      performance = mean_total(batch);
    }
    trainer.update(batch, j, config.updates);
    curve.append(trainer.interactions(), performance);
  }
  PgResult out;
  out.critic = trainer.release_critic();
  out.policy = trainer.release_policy();
  out.curve = std::move(curve);
  return out;
}

}  // namespace evil
