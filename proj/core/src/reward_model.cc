#include "evil/reward_model.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

#include "evil/serialize.h"

namespace evil {

RewardModel RewardModel::table(int num_states) { return table(Eigen::VectorXd::Zero(num_states)); }

RewardModel RewardModel::table(Eigen::VectorXd values) {
  RewardModel m;
  m.is_table_ = true;
  m.table_ = std::move(values);
  return m;
}

RewardModel RewardModel::network(int feature_dim, std::vector<int> hidden, Rng& rng, double output_gain) {
  std::vector<int> widths{feature_dim};
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(1);
  RewardModel m;
  m.is_table_ = false;
  m.net_ = Mlp(widths);
  m.net_.init(rng, output_gain);
  return m;
}

RewardModel RewardModel::make_default(const Environment& env, std::uint64_t seed) {
  if (env.num_states() > 0) return table(env.num_states());
  Rng rng = make_rng(seed, {tag(Stream::kDiscriminator), 0});
  return network(env.feature_dim(), {128, 128}, rng);
}

double RewardModel::value(const Environment& env, const State& s) const {
  if (is_table_) return table_[as_index(s)];
  return net_.forward(env.features(s))[0];
}

void RewardModel::add_gradient(const Environment& env, const State& s, double scale,
                               Eigen::Ref<Eigen::VectorXd> grad) const {
  if (is_table_) {
    grad[as_index(s)] += scale;
    return;
  }
  Mlp::Tape tape;
  net_.forward(env.features(s), tape);
  net_.backward(tape, Eigen::VectorXd::Constant(1, scale), grad);
}

double RewardModel::gradient_penalty(const Eigen::VectorXd& x, double scale,
                                     Eigen::Ref<Eigen::VectorXd> grad) const {
  if (is_table_) throw std::logic_error("RewardModel: gradient penalty needs a network model");
  return net_.gradient_penalty(x, 1.0, scale, grad);
}

void RewardModel::set_params(const Eigen::VectorXd& p) {
  if (p.size() != num_params()) throw std::invalid_argument("RewardModel: parameter size mismatch");
  if (is_table_) {
    table_ = p;
  } else {
    net_.set_params(p);
  }
}

nlohmann::json RewardModel::to_json() const {
  auto j = param_header("reward_model");
  j["model"] = is_table_ ? "table" : "network";
  if (!is_table_) j["widths"] = net_.widths();
  j["params"] = to_vector(params());
  return j;
}

RewardModel RewardModel::from_json(const nlohmann::json& j) {
  check_param_header(j, "reward_model");
  const auto params = to_eigen(j.at("params").get<std::vector<double>>());
  if (j.at("model") == "table") return table(params);
  RewardModel m;
  m.is_table_ = false;
  m.net_ = Mlp(j.at("widths").get<std::vector<int>>());
  m.net_.set_params(params);
  return m;
}

double DiscriminatorEnsemble::mean(const Environment& env, const State& s) const {
  if (members_.empty()) throw std::logic_error("DiscriminatorEnsemble: no members");
  double sum = 0.0;
  for (const auto& m : members_) sum += m.value(env, s);
  return sum / static_cast<double>(members_.size());
}

EnsembleReward::EnsembleReward(std::shared_ptr<const DiscriminatorEnsemble> ensemble, bool literal_sign,
                               std::string name)
    : ensemble_(std::move(ensemble)), sign_(literal_sign ? -1.0 : 1.0), name_(std::move(name)) {
  if (!ensemble_ || ensemble_->size() < 1) throw std::invalid_argument("EnsembleReward: needs K >= 1 members");
}

double EnsembleReward::value(const Environment& env, const State& s) const {
  return sign_ * ensemble_->mean(env, s);
}

std::vector<double> EnsembleReward::label(const Environment& env, const Trajectory& traj) const {
  std::vector<double> out(traj.size());
  for (std::size_t h = 0; h < traj.size(); ++h) out[h] = value(env, traj.states[h]);
  return out;
}

namespace {

double mean_sum(const RewardModel& f, const Environment& env, const std::vector<const Trajectory*>& batch,
                double grad_scale, Eigen::VectorXd& grad) {
  const double inv = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  for (const Trajectory* t : batch) {
    for (const auto& s : t->states) {
      total += f.value(env, s);
      f.add_gradient(env, s, grad_scale * inv, grad);
    }
  }
  return total * inv;
}

const State& random_state(const std::vector<const Trajectory*>& batch, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick_traj(0, batch.size() - 1);
  const Trajectory& t = *batch[pick_traj(rng)];
  std::uniform_int_distribution<std::size_t> pick_step(0, t.size() - 1);
  return t.states[pick_step(rng)];
}

}  // namespace

DiscriminatorLoss discriminator_loss(const RewardModel& f, const Environment& env,
                                     const std::vector<const Trajectory*>& learner,
                                     const std::vector<const Trajectory*>& expert,
                                     const LossOptions& options, Rng* rng) {
  if (learner.empty() || expert.empty()) throw std::invalid_argument("discriminator_loss: empty batch");
  DiscriminatorLoss out;
  out.gradient = Eigen::VectorXd::Zero(f.num_params());
  out.moment = mean_sum(f, env, learner, 1.0, out.gradient) - mean_sum(f, env, expert, -1.0, out.gradient);
  out.loss = out.moment;

  if (options.l2_coeff != 0.0) {
    out.l2 = f.params().norm();
    out.loss += options.l2_coeff * out.l2;
    if (out.l2 > 0.0) out.gradient += options.l2_coeff * f.params() / out.l2;
  }
  if (options.gp_coeff != 0.0 && !f.is_table()) {
    if (rng == nullptr) throw std::invalid_argument("discriminator_loss: gradient penalty needs an rng");
    if (options.gp_samples < 1) throw std::invalid_argument("discriminator_loss: gp_samples must be >= 1");
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double scale = options.gp_coeff / options.gp_samples;
    double penalty = 0.0;
    for (int i = 0; i < options.gp_samples; ++i) {
      const Eigen::VectorXd xl = env.features(random_state(learner, *rng));
      const Eigen::VectorXd xe = env.features(random_state(expert, *rng));
      const double u = unit(*rng);
      penalty += f.gradient_penalty(u * xl + (1.0 - u) * xe, scale, out.gradient);
    }
    out.penalty = penalty / options.gp_samples;
    out.loss += options.gp_coeff * out.penalty;
  }
  return out;
}

double discriminator_loss(const RewardModel& f, const Environment& env, const std::vector<Trajectory>& learner,
                          const std::vector<Trajectory>& expert, double l2_coeff, double gp_coeff, Rng* rng) {
  std::vector<const Trajectory*> l, e;
  for (const auto& t : learner) l.push_back(&t);
  for (const auto& t : expert) e.push_back(&t);
  LossOptions options;
  options.l2_coeff = l2_coeff;
  options.gp_coeff = gp_coeff;
  return discriminator_loss(f, env, l, e, options, rng).loss;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
  if (x.size() < 2) throw std::invalid_argument("pearson: needs at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) throw std::invalid_argument("pearson: zero-variance input");
  return sxy / std::sqrt(sxx * syy);
}

double reward_correlation(const RewardSource& learned, const RewardSource& truth, const Environment& env,
                          const std::vector<Trajectory>& visits) {
  std::vector<double> x, y;
  std::set<std::vector<double>> distinct;
  for (const auto& t : visits) {
    const auto a = learned.label(env, t);
    const auto b = truth.label(env, t);
    x.insert(x.end(), a.begin(), a.end());
    y.insert(y.end(), b.begin(), b.end());
    for (const auto& s : t.states) distinct.insert(std::vector<double>(s.data(), s.data() + s.size()));
  }
  if (distinct.size() < 2) throw std::invalid_argument("reward_correlation: needs at least two distinct states");
  return pearson(x, y);
}

}  // namespace evil
