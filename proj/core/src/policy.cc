#include "evil/policy.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "evil/serialize.h"

namespace evil {
namespace {

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  Eigen::VectorXd p = (logits.array() - logits.maxCoeff()).exp();
  return p / p.sum();
}

int sample_categorical(const Eigen::VectorXd& p, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  double acc = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return i;
  }
  return static_cast<int>(p.size()) - 1;
}

int argmax(const Eigen::VectorXd& v) {
  Eigen::Index i;
  v.maxCoeff(&i);
  return static_cast<int>(i);
}

double categorical_entropy(const Eigen::VectorXd& p) {
  double h = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) h -= p[i] * std::log(p[i]);
  }
  return h;
}

// d H / d logits for a softmax distribution: -p_b (log p_b + H).
Eigen::VectorXd categorical_entropy_grad(const Eigen::VectorXd& p) {
  const double h = categorical_entropy(p);
  Eigen::VectorXd g(p.size());
  for (int i = 0; i < p.size(); ++i) g[i] = p[i] > 0.0 ? -p[i] * (std::log(p[i]) + h) : 0.0;
  return g;
}

void check_discrete(const Action& a, int n) {
  const int i = as_index(a);
  if (i < 0 || i >= n) throw std::out_of_range("action index out of range");
}

}  // namespace

Eigen::VectorXd Policy::probabilities(const Environment&, const State&) const {
  throw std::logic_error(type() + ": action probabilities need a discrete action space");
}

// ---- TabularSoftmaxPolicy ----

TabularSoftmaxPolicy::TabularSoftmaxPolicy(int num_states, int num_actions)
    : logits_(Eigen::MatrixXd::Zero(num_states, num_actions)) {}

TabularSoftmaxPolicy::TabularSoftmaxPolicy(Eigen::MatrixXd logits) : logits_(std::move(logits)) {}

Eigen::VectorXd TabularSoftmaxPolicy::probabilities(int state) const {
  return softmax(logits_.row(state).transpose());
}

Eigen::VectorXd TabularSoftmaxPolicy::probabilities(const Environment&, const State& s) const {
  return probabilities(as_index(s));
}

Action TabularSoftmaxPolicy::sample(const Environment&, const State& s, Rng& rng) const {
  return from_index(sample_categorical(probabilities(as_index(s)), rng));
}

Action TabularSoftmaxPolicy::greedy(const Environment&, const State& s) const {
  return from_index(argmax(logits_.row(as_index(s)).transpose()));
}

double TabularSoftmaxPolicy::log_prob(const Environment&, const State& s, const Action& a) const {
  check_discrete(a, static_cast<int>(logits_.cols()));
  const Eigen::VectorXd row = logits_.row(as_index(s)).transpose();
  const double m = row.maxCoeff();
  return row[as_index(a)] - m - std::log((row.array() - m).exp().sum());
}

double TabularSoftmaxPolicy::entropy(const Environment&, const State& s) const {
  return categorical_entropy(probabilities(as_index(s)));
}

void TabularSoftmaxPolicy::add_log_prob_gradient(const Environment&, const State& s,
                                                 const Action& a, double scale,
                                                 Eigen::Ref<Eigen::VectorXd> grad) const {
  const int si = as_index(s);
  const Eigen::VectorXd p = probabilities(si);
  const Eigen::Index rows = logits_.rows();
  for (int b = 0; b < p.size(); ++b) {
    grad[b * rows + si] += scale * ((b == as_index(a) ? 1.0 : 0.0) - p[b]);
  }
}

void TabularSoftmaxPolicy::add_entropy_gradient(const Environment&, const State& s, double scale,
                                                Eigen::Ref<Eigen::VectorXd> grad) const {
  const int si = as_index(s);
  const Eigen::VectorXd g = categorical_entropy_grad(probabilities(si));
  const Eigen::Index rows = logits_.rows();
  for (int b = 0; b < g.size(); ++b) grad[b * rows + si] += scale * g[b];
}

Eigen::VectorXd TabularSoftmaxPolicy::parameters() const {
  return Eigen::Map<const Eigen::VectorXd>(logits_.data(), logits_.size());
}

void TabularSoftmaxPolicy::set_parameters(const Eigen::VectorXd& params) {
  if (params.size() != logits_.size()) throw std::invalid_argument("TabularSoftmaxPolicy: size mismatch");
  logits_ = Eigen::Map<const Eigen::MatrixXd>(params.data(), logits_.rows(), logits_.cols());
}

nlohmann::json TabularSoftmaxPolicy::to_json() const {
  auto j = param_header(type());
  j["num_states"] = logits_.rows();
  j["num_actions"] = logits_.cols();
  j["params"] = to_vector(parameters());
  return j;
}

// ---- DeterministicTablePolicy ----

DeterministicTablePolicy::DeterministicTablePolicy(std::vector<int> actions, int num_actions)
    : actions_(std::move(actions)), num_actions_(num_actions) {
  for (int a : actions_) {
    if (a < 0 || a >= num_actions_) throw std::invalid_argument("DeterministicTablePolicy: bad action");
  }
}

Action DeterministicTablePolicy::sample(const Environment&, const State& s, Rng&) const {
  return from_index(actions_.at(as_index(s)));
}

Action DeterministicTablePolicy::greedy(const Environment& env, const State& s) const {
  Rng unused;
  return sample(env, s, unused);
}

double DeterministicTablePolicy::log_prob(const Environment&, const State& s, const Action& a) const {
  return actions_.at(as_index(s)) == as_index(a) ? 0.0 : -std::numeric_limits<double>::infinity();
}

Eigen::VectorXd DeterministicTablePolicy::probabilities(const Environment&, const State& s) const {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(num_actions_);
  p[actions_.at(as_index(s))] = 1.0;
  return p;
}

nlohmann::json DeterministicTablePolicy::to_json() const {
  auto j = param_header(type());
  j["num_actions"] = num_actions_;
  j["actions"] = actions_;
  return j;
}

// ---- MlpPolicy ----

MlpPolicy::MlpPolicy(int feature_dim, ActionSpace space, std::vector<int> hidden, Rng& rng,
                     double init_log_std)
    : space_(space) {
  std::vector<int> widths{feature_dim};
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(space.size);
  net_ = Mlp(widths);
  net_.init(rng, 0.01);
  if (!space.discrete) {
    log_std_ = Eigen::VectorXd::Constant(space.size, std::clamp(init_log_std, kMinLogStd, kMaxLogStd));
  }
}

MlpPolicy::MlpPolicy(Mlp net, ActionSpace space, Eigen::VectorXd log_std)
    : net_(std::move(net)), space_(space), log_std_(std::move(log_std)) {}

Eigen::VectorXd MlpPolicy::probabilities(const Environment& env, const State& s) const {
  if (!space_.discrete) return Policy::probabilities(env, s);
  return softmax(net_.forward(env.features(s)));
}

Action MlpPolicy::sample(const Environment& env, const State& s, Rng& rng) const {
  const Eigen::VectorXd out = net_.forward(env.features(s));
  if (space_.discrete) return from_index(sample_categorical(softmax(out), rng));
  std::normal_distribution<double> normal(0.0, 1.0);
  Action a(space_.size);
  for (int i = 0; i < space_.size; ++i) a[i] = out[i] + std::exp(log_std_[i]) * normal(rng);
  return a;
}

Action MlpPolicy::greedy(const Environment& env, const State& s) const {
  const Eigen::VectorXd out = net_.forward(env.features(s));
  if (space_.discrete) return from_index(argmax(out));
  return out;
}

double MlpPolicy::log_prob(const Environment& env, const State& s, const Action& a) const {
  const Eigen::VectorXd out = net_.forward(env.features(s));
  if (space_.discrete) {
    check_discrete(a, space_.size);
    const double m = out.maxCoeff();
    return out[as_index(a)] - m - std::log((out.array() - m).exp().sum());
  }
  double lp = 0.0;
  for (int i = 0; i < space_.size; ++i) {
    const double z = (a[i] - out[i]) * std::exp(-log_std_[i]);
    lp += -0.5 * z * z - log_std_[i] - 0.5 * std::log(2.0 * std::numbers::pi);
  }
  return lp;
}

double MlpPolicy::entropy(const Environment& env, const State& s) const {
  if (space_.discrete) return categorical_entropy(probabilities(env, s));
  return log_std_.sum() + 0.5 * space_.size * std::log(2.0 * std::numbers::pi * std::numbers::e);
}

void MlpPolicy::add_log_prob_gradient(const Environment& env, const State& s, const Action& a,
                                      double scale, Eigen::Ref<Eigen::VectorXd> grad) const {
  Mlp::Tape tape;
  const Eigen::VectorXd out = net_.forward(env.features(s), tape);
  Eigen::VectorXd dout(out.size());
  if (space_.discrete) {
    dout = -softmax(out);
    dout[as_index(a)] += 1.0;
  } else {
    for (int i = 0; i < space_.size; ++i) {
      const double inv_var = std::exp(-2.0 * log_std_[i]);
      const double diff = a[i] - out[i];
      dout[i] = diff * inv_var;
      grad[net_.num_params() + i] += scale * (diff * diff * inv_var - 1.0);
    }
  }
  net_.backward(tape, scale * dout, grad.head(net_.num_params()));
}

void MlpPolicy::add_entropy_gradient(const Environment& env, const State& s, double scale,
                                     Eigen::Ref<Eigen::VectorXd> grad) const {
  if (!space_.discrete) {
    grad.tail(space_.size).array() += scale;
    return;
  }
  Mlp::Tape tape;
  const Eigen::VectorXd out = net_.forward(env.features(s), tape);
  net_.backward(tape, scale * categorical_entropy_grad(softmax(out)), grad.head(net_.num_params()));
}

int MlpPolicy::num_params() const {
  return net_.num_params() + static_cast<int>(log_std_.size());
}

Eigen::VectorXd MlpPolicy::parameters() const {
  Eigen::VectorXd p(num_params());
  p << net_.params(), log_std_;
  return p;
}

void MlpPolicy::set_parameters(const Eigen::VectorXd& params) {
  if (params.size() != num_params()) throw std::invalid_argument("MlpPolicy: size mismatch");
  net_.set_params(params.head(net_.num_params()));
  log_std_ = params.tail(log_std_.size()).cwiseMax(kMinLogStd).cwiseMin(kMaxLogStd);
}

nlohmann::json MlpPolicy::to_json() const {
  auto j = param_header(type());
  j["widths"] = net_.widths();
  j["discrete"] = space_.discrete;
  j["params"] = to_vector(parameters());
  return j;
}

PolicyPtr make_default_policy(const Environment& env, std::uint64_t seed) {
  if (env.num_states() > 0 && env.action_space().discrete) {
    return std::make_unique<TabularSoftmaxPolicy>(env.num_states(), env.action_space().size);
  }
  Rng rng = make_rng(seed, {tag(Stream::kInit), 1});
  return std::make_unique<MlpPolicy>(env.feature_dim(), env.action_space(), std::vector<int>{64, 64},
                                     rng);
}

PolicyPtr policy_from_json(const nlohmann::json& j) {
  const std::string type = j.value("type", "");
  if (type == "tabular_softmax") {
    check_param_header(j, type);
    auto p = std::make_unique<TabularSoftmaxPolicy>(j.at("num_states").get<int>(),
                                                    j.at("num_actions").get<int>());
    p->set_parameters(to_eigen(j.at("params").get<std::vector<double>>()));
    return p;
  }
  if (type == "deterministic_table") {
    check_param_header(j, type);
    return std::make_unique<DeterministicTablePolicy>(j.at("actions").get<std::vector<int>>(),
                                                      j.at("num_actions").get<int>());
  }
  if (type == "mlp") {
    check_param_header(j, type);
    const auto widths = j.at("widths").get<std::vector<int>>();
    const bool discrete = j.at("discrete").get<bool>();
    Mlp net(widths);
    const Eigen::VectorXd params = to_eigen(j.at("params").get<std::vector<double>>());
    const int extra = discrete ? 0 : widths.back();
    if (params.size() != net.num_params() + extra) throw std::runtime_error("mlp policy: bad parameter count");
    net.set_params(params.head(net.num_params()));
    return PolicyPtr(new MlpPolicy(std::move(net), {discrete, widths.back()}, params.tail(extra)));
  }
  throw std::runtime_error("unknown policy type '" + type + "'");
}

}  // namespace evil
