#include "evil/potential.h"

#include <stdexcept>

#include "evil/serialize.h"

namespace evil {

std::unique_ptr<Potential> TabularPotential::with_parameters(const Eigen::VectorXd& theta) const {
  if (theta.size() != table_.size()) throw std::invalid_argument("TabularPotential: size mismatch");
  return std::make_unique<TabularPotential>(theta);
}

nlohmann::json TabularPotential::to_json() const {
  auto j = param_header(type());
  j["params"] = to_vector(table_);
  return j;
}

MlpPotential::MlpPotential(int feature_dim, Rng& rng, std::vector<int> hidden, double output_gain) {
  std::vector<int> widths{feature_dim};
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(1);
  net_ = Mlp(widths);
  net_.init(rng, output_gain);
}

std::unique_ptr<Potential> MlpPotential::with_parameters(const Eigen::VectorXd& theta) const {
  Mlp net = net_;
  net.set_params(theta);
  return std::make_unique<MlpPotential>(std::move(net));
}

nlohmann::json MlpPotential::to_json() const {
  auto j = param_header(type());
  j["widths"] = net_.widths();
  j["params"] = to_vector(net_.params());
  return j;
}

std::unique_ptr<Potential> CriticPotential::with_parameters(const Eigen::VectorXd& theta) const {
  std::shared_ptr<Critic> c = critic_->clone();
  c->set_parameters(theta);
  return std::make_unique<CriticPotential>(std::move(c));
}

nlohmann::json CriticPotential::to_json() const {
  auto j = param_header(type());
  j["critic"] = critic_->to_json();
  return j;
}

std::unique_ptr<Potential> make_default_potential(const Environment& env, std::uint64_t seed) {
  if (env.num_states() > 0) {
    return std::make_unique<TabularPotential>(TabularPotential::zeros(env.num_states()));
  }
  Rng rng = make_rng(seed, {tag(Stream::kInit), 4});
  return std::make_unique<MlpPotential>(env.feature_dim(), rng);
}

std::unique_ptr<Potential> potential_from_json(const nlohmann::json& j) {
  const std::string type = j.value("type", "");
  check_param_header(j, type);
  if (type == "tabular_potential") {
    return std::make_unique<TabularPotential>(to_eigen(j.at("params").get<std::vector<double>>()));
  }
  if (type == "mlp_potential") {
    Mlp net(j.at("widths").get<std::vector<int>>());
    net.set_params(to_eigen(j.at("params").get<std::vector<double>>()));
    return std::make_unique<MlpPotential>(std::move(net));
  }
  if (type == "critic_potential") {
    return std::make_unique<CriticPotential>(critic_from_json(j.at("critic")));
  }
  throw std::runtime_error("unknown potential type '" + type + "'");
}

Eigen::VectorXd potential_table(const Potential& potential, const Environment& env) {
  if (env.num_states() <= 0) throw std::invalid_argument("potential_table: needs a tabular environment");
  Eigen::VectorXd out(env.num_states());
  for (int s = 0; s < env.num_states(); ++s) out[s] = potential.value(env, from_index(s));
  return out;
}

}  // namespace evil
