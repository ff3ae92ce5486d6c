#include "evil/irl.h"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

#include "evil/parallel.h"

namespace evil {

void TrajectoryBuffer::add(const Trajectory& traj, int iteration) {
  items_.push_back({traj, iteration});
  if (capacity_ > 0 && items_.size() > capacity_) {
    items_.erase(items_.begin(), items_.begin() + static_cast<std::ptrdiff_t>(items_.size() - capacity_));
  }
}

std::vector<const Trajectory*> TrajectoryBuffer::sample(std::size_t n, Rng& rng) const {
  std::vector<const Trajectory*> out;
  if (n >= items_.size()) {
    for (const auto& item : items_) out.push_back(&item.traj);
    return out;
  }
  std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
  for (std::size_t i = 0; i < n; ++i) out.push_back(&items_[pick(rng)].traj);
  return out;
}

double ResetSchedule::at(long iteration, long total) const {
  if (total <= 0) return std::clamp(p0, 0.0, 1.0);
  const double frac = static_cast<double>(iteration) / static_cast<double>(total);
  return std::clamp(p0 * (1.0 - frac), 0.0, 1.0);
}

void IrlConfig::validate() const {
  if (outer_iterations < 0) throw std::invalid_argument("IrlConfig: outer_iterations must be >= 0");
  if (ensemble_size < 1) throw std::invalid_argument("IrlConfig: ensemble_size must be >= 1");
  if (!(disc_lr.start > 0.0 && disc_lr.end > 0.0)) throw std::invalid_argument("IrlConfig: disc_lr must be positive");
  if (gp_coeff < 0.0 || l2_coeff < 0.0) throw std::invalid_argument("IrlConfig: regularizer coefficients must be >= 0");
  if (gp_samples < 1) throw std::invalid_argument("IrlConfig: gp_samples must be >= 1");
  if (disc_batch_trajectories < 1) throw std::invalid_argument("IrlConfig: disc_batch_trajectories must be >= 1");
  if (reward_model != "auto" && reward_model != "table" && reward_model != "network") {
    throw std::invalid_argument("IrlConfig: reward_model must be auto, table or network");
  }
  if (!(reset.p0 >= 0.0 && reset.p0 <= 1.0)) throw std::invalid_argument("IrlConfig: reset p0 must lie in [0, 1]");
  inner.validate();
}

nlohmann::json IrlConfig::to_json() const {
  return {{"outer_iterations", outer_iterations},
          {"ensemble_size", ensemble_size},
          {"disc_lr", {{"start", disc_lr.start}, {"end", disc_lr.end}}},
          {"gp_coeff", gp_coeff},
          {"l2_coeff", l2_coeff},
          {"gp_samples", gp_samples},
          {"disc_batch_trajectories", disc_batch_trajectories},
          {"buffer_capacity", buffer_capacity},
          {"reset_p0", reset.p0},
          {"literal_sign", literal_sign},
          {"reward_model", reward_model},
          {"reward_hidden", reward_hidden},
          {"inner", inner.to_json()}};
}

IrlConfig IrlConfig::from_json(const nlohmann::json& j) {
  IrlConfig c;
  c.outer_iterations = j.value("outer_iterations", c.outer_iterations);
  c.ensemble_size = j.value("ensemble_size", c.ensemble_size);
  if (j.contains("disc_lr")) {
    const auto& d = j.at("disc_lr");
    if (d.is_number()) {
      c.disc_lr = {d.get<double>(), d.get<double>()};
    } else {
      c.disc_lr = {d.value("start", c.disc_lr.start), d.value("end", c.disc_lr.end)};
    }
  }
  c.gp_coeff = j.value("gp_coeff", c.gp_coeff);
  c.l2_coeff = j.value("l2_coeff", c.l2_coeff);
  c.gp_samples = j.value("gp_samples", c.gp_samples);
  c.disc_batch_trajectories = j.value("disc_batch_trajectories", c.disc_batch_trajectories);
  c.buffer_capacity = j.value("buffer_capacity", c.buffer_capacity);
  c.reset.p0 = j.value("reset_p0", c.reset.p0);
  c.literal_sign = j.value("literal_sign", c.literal_sign);
  c.reward_model = j.value("reward_model", c.reward_model);
  if (j.contains("reward_hidden")) c.reward_hidden = j.at("reward_hidden").get<std::vector<int>>();
  if (j.contains("inner")) c.inner = PgConfig::from_json(j.at("inner"));
  c.validate();
  return c;
}

IrlConfig IrlConfig::vanilla() const {
  IrlConfig c = *this;
  c.ensemble_size = 1;
  c.buffer_capacity = static_cast<std::size_t>(inner.batch_trajectories);
  c.reset.p0 = 0.0;
  return c;
}

std::shared_ptr<DiscriminatorEnsemble> IrlState::ensemble() const {
  std::vector<RewardModel> fs;
  fs.reserve(members.size());
  for (const auto& m : members) fs.push_back(m.f);
  return std::make_shared<DiscriminatorEnsemble>(std::move(fs));
}

IrlState make_irl_state(const Environment& env, const IrlConfig& config, std::uint64_t seed) {
  config.validate();
  IrlState state;
  state.members.reserve(config.ensemble_size);
  for (int k = 0; k < config.ensemble_size; ++k) {
    const auto key = static_cast<std::uint64_t>(k);
    const std::uint64_t f_seed = derive_seed(seed, {tag(Stream::kDiscriminator), key});
    const bool table = config.reward_model == "table" || (config.reward_model == "auto" && env.num_states() > 0);
    if (table && env.num_states() <= 0) throw std::invalid_argument("IrlConfig: table reward needs a tabular environment");
    Rng f_rng = make_rng(f_seed);
    RewardModel f = table ? RewardModel::table(env.num_states())
                          : RewardModel::network(env.feature_dim(), config.reward_hidden, f_rng);
    const std::uint64_t learner_seed = derive_seed(seed, {tag(Stream::kPolicy), key});
    PgTrainer learner(env, config.inner, make_default_policy(env, learner_seed),
                      make_default_critic(env, learner_seed));
    Adam opt(f.num_params());
    state.members.push_back({std::move(f), std::move(opt), std::move(learner),
                             TrajectoryBuffer(config.buffer_capacity)});
  }
  return state;
}

void irl_step(IrlState& state, const Environment& env, const std::vector<Trajectory>& expert_demos,
              const IrlConfig& config, std::uint64_t seed, int threads) {
  if (expert_demos.empty()) throw std::invalid_argument("irl_step: no expert demonstrations");
  const int n = static_cast<int>(state.members.size());
  const long i = state.iteration;
  const long total = config.outer_iterations;
  const auto iter = static_cast<std::uint64_t>(i);
  const GroundTruthReward truth;
  LossOptions loss_options;
  loss_options.l2_coeff = config.l2_coeff;
  loss_options.gp_coeff = config.gp_coeff;
  loss_options.gp_samples = config.gp_samples;
  const double disc_lr = config.disc_lr.at(i, total);

  std::vector<std::vector<Trajectory>> batches(n);
  std::vector<IrlDiagnostic> diag(n);
  parallel_for(n, threads, [&](int k) {
    IrlMember& m = state.members[k];
    const auto key = static_cast<std::uint64_t>(k);
    batches[k] = m.learner.collect(truth, derive_seed(seed, {tag(Stream::kBatch), iter, key}));
    double j_true = 0.0;
    for (const auto& t : batches[k]) {
      j_true += t.total_reward();
      m.buffer.add(t, static_cast<int>(i));
    }
    diag[k].iteration = static_cast<int>(i);
    diag[k].member = k;
    diag[k].learner_j_true = j_true / static_cast<double>(batches[k].size());

    Rng rng = make_rng(seed, {tag(Stream::kDiscriminator), iter, key});
    const auto learner = m.buffer.sample(config.disc_batch_trajectories, rng);
    std::vector<const Trajectory*> expert;
    std::uniform_int_distribution<std::size_t> pick(0, expert_demos.size() - 1);
    if (static_cast<std::size_t>(config.disc_batch_trajectories) >= expert_demos.size()) {
      for (const auto& t : expert_demos) expert.push_back(&t);
    } else {
      for (int b = 0; b < config.disc_batch_trajectories; ++b) expert.push_back(&expert_demos[pick(rng)]);
    }
    const DiscriminatorLoss loss = discriminator_loss(m.f, env, learner, expert, loss_options, &rng);
    if (!std::isfinite(loss.loss) || !loss.gradient.allFinite()) {
      throw std::runtime_error("irl_step: non-finite discriminator loss at iteration " + std::to_string(i) +
                               ", member " + std::to_string(k));
    }
    Eigen::VectorXd p = m.f.params();
    m.f_opt.step(p, loss.gradient, disc_lr);
    m.f.set_params(p);
    diag[k].disc_loss = loss.loss;
  });

  const EnsembleReward reward(state.ensemble(), config.literal_sign);
  const double p_reset = config.reset.at(i, total);
  parallel_for(n, threads, [&](int k) {
    IrlMember& m = state.members[k];
    const auto key = static_cast<std::uint64_t>(k);
    for (auto& t : batches[k]) t.rewards = reward.label(env, t);
    m.learner.update(batches[k], i, total);
    if (p_reset > 0.0) {
      Rng rng = make_rng(seed, {tag(Stream::kReset), iter, key});
      if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p_reset) {
        const std::uint64_t fresh = derive_seed(seed, {tag(Stream::kReset), iter, key, 1});
        m.learner.reset(make_default_policy(env, fresh), make_default_critic(env, fresh));
        diag[k].reset = true;
      }
    }
  });
  state.diagnostics.insert(state.diagnostics.end(), diag.begin(), diag.end());
  ++state.iteration;
}

IrlResult run_irl(const Environment& env, const std::vector<Trajectory>& expert_demos, const IrlConfig& config,
                  std::uint64_t seed, int threads) {
  if (expert_demos.empty()) throw std::invalid_argument("run_irl: no expert demonstrations");
  IrlState state = make_irl_state(env, config, seed);
  for (int i = 0; i < config.outer_iterations; ++i) irl_step(state, env, expert_demos, config, seed, threads);
  IrlResult out;
  out.ensemble = state.ensemble();
  out.reward = std::make_shared<EnsembleReward>(out.ensemble, config.literal_sign);
  for (auto& m : state.members) out.policies.push_back(m.learner.policy().clone());
  out.diagnostics = std::move(state.diagnostics);
  return out;
}

void write_diagnostics_csv(std::ostream& out, const std::vector<IrlDiagnostic>& diagnostics) {
  const auto old = out.precision(17);
  out << "iteration,member,disc_loss,learner_J_true,reset_flag\n";
  for (const auto& d : diagnostics) {
    out << d.iteration << ',' << d.member << ',' << d.disc_loss << ',' << d.learner_j_true << ','
        << (d.reset ? 1 : 0) << '\n';
  }
  out.precision(old);
}

RewardPtr freeze_reward(std::shared_ptr<const EnsembleReward> reward, const Environment& env) {
  if (env.num_states() <= 0) return reward;
  Eigen::VectorXd table(env.num_states());
  for (int s = 0; s < env.num_states(); ++s) table[s] = reward->value(env, from_index(s));
  return make_table_reward(reward->name(), std::move(table));
}

EvilResult run_evil(const Environment& env, const std::vector<Trajectory>& expert_demos,
                    const IrlConfig& irl_config, const EsConfig& es_config, std::uint64_t seed, int threads) {
  EvilResult out;
  out.irl = run_irl(env, expert_demos, irl_config, seed, threads);
  EvolveOptions options;
  options.threads = threads;
  out.shaping = evolve_shaping(freeze_reward(out.irl.reward, env), env, es_config, derive_seed(seed, {tag(Stream::kInner)}), options);
  return out;
}

}  // namespace evil
