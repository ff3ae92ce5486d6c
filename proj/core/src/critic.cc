#include "evil/critic.h"

#include <stdexcept>

#include "evil/serialize.h"

namespace evil {

void TabularCritic::set_parameters(const Eigen::VectorXd& params) {
  if (params.size() != values_.size()) throw std::invalid_argument("TabularCritic: size mismatch");
  values_ = params;
}

nlohmann::json TabularCritic::to_json() const {
  auto j = param_header(type());
  j["params"] = to_vector(values_);
  return j;
}

MlpCritic::MlpCritic(int feature_dim, std::vector<int> hidden, Rng& rng) {
  std::vector<int> widths{feature_dim};
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(1);
  net_ = Mlp(widths);
  net_.init(rng, 1.0);
}

void MlpCritic::add_gradient(const Environment& env, const State& s, double scale,
                             Eigen::Ref<Eigen::VectorXd> grad) const {
  Mlp::Tape tape;
  net_.forward(env.features(s), tape);
  net_.backward(tape, Eigen::VectorXd::Constant(1, scale), grad);
}

nlohmann::json MlpCritic::to_json() const {
  auto j = param_header(type());
  j["widths"] = net_.widths();
  j["params"] = to_vector(net_.params());
  return j;
}

CriticPtr make_default_critic(const Environment& env, std::uint64_t seed) {
  if (env.num_states() > 0) return std::make_unique<TabularCritic>(env.num_states());
  Rng rng = make_rng(seed, {tag(Stream::kInit), 2});
  return std::make_unique<MlpCritic>(env.feature_dim(), std::vector<int>{64, 64}, rng);
}

CriticPtr critic_from_json(const nlohmann::json& j) {
  const std::string type = j.value("type", "");
  check_param_header(j, type);
  if (type == "tabular_critic") {
    return std::make_unique<TabularCritic>(to_eigen(j.at("params").get<std::vector<double>>()));
  }
  if (type == "mlp_critic") {
    Mlp net(j.at("widths").get<std::vector<int>>());
    net.set_params(to_eigen(j.at("params").get<std::vector<double>>()));
    return std::make_unique<MlpCritic>(std::move(net));
  }
  throw std::runtime_error("unknown critic type '" + type + "'");
}

}  // namespace evil
