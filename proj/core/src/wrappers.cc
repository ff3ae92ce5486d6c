#include "evil/wrappers.h"

#include <stdexcept>

#include "evil/point_mass.h"

namespace evil {
namespace {

TabularMdp tremble_equivalent(const TabularMdp& mdp, double p) {
  const int n = mdp.num_states();
  const int na = mdp.num_actions();
  std::vector<double> t(mdp.transition_tensor().size(), 0.0);
  Eigen::MatrixXd r(n, na);
  for (int s = 0; s < n; ++s) {
    const double mean_r = mdp.reward_table().row(s).mean();
    for (int a = 0; a < na; ++a) {
      for (int next = 0; next < n; ++next) {
        double mean_t = 0.0;
        for (int b = 0; b < na; ++b) mean_t += mdp.transition(s, b, next);
        mean_t /= na;
        t[(static_cast<std::size_t>(s) * na + a) * n + next] =
            (1.0 - p) * mdp.transition(s, a, next) + p * mean_t;
      }
      r(s, a) = (1.0 - p) * mdp.reward_table()(s, a) + p * mean_r;
    }
  }
  TabularMdp out(n, na, std::move(t), std::move(r), mdp.horizon(), mdp.initial_dist());
  out.set_features(mdp.feature_matrix());
  return out;
}

nlohmann::json with_wrapper(nlohmann::json base, nlohmann::json wrapper) {
  if (!base.contains("wrappers")) base["wrappers"] = nlohmann::json::array();
  base["wrappers"].push_back(std::move(wrapper));
  return base;
}

}  // namespace

TrembleWrapper::TrembleWrapper(EnvPtr inner, double p_tremble)
    : inner_(std::move(inner)), p_tremble_(p_tremble) {
  if (!inner_) throw std::invalid_argument("TrembleWrapper: null inner environment");
  if (!(p_tremble_ >= 0.0 && p_tremble_ <= 1.0)) {
    throw std::invalid_argument("TrembleWrapper: p_tremble must lie in [0, 1]");
  }
  if (const TabularMdp* mdp = inner_->tabular()) equivalent_ = tremble_equivalent(*mdp, p_tremble_);
}

StepResult TrembleWrapper::step(const State& s, const Action& a, Rng& rng) const {
  if (p_tremble_ == 0.0) return inner_->step(s, a, rng);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  if (unif(rng) >= p_tremble_) return inner_->step(s, a, rng);

  const ActionSpace space = inner_->action_space();
  Action random_action;
  if (space.discrete) {
    std::uniform_int_distribution<int> pick(0, space.size - 1);
    random_action = from_index(pick(rng));
  } else {
    std::uniform_real_distribution<double> coord(-1.0, 1.0);
    random_action.resize(space.size);
    for (int i = 0; i < space.size; ++i) random_action[i] = coord(rng);
  }
  StepResult out = inner_->step(s, random_action, rng);
  out.executed = random_action;
  out.perturbed = true;
  return out;
}

nlohmann::json TrembleWrapper::config() const {
  return with_wrapper(inner_->config(), {{"type", "tremble"}, {"p", p_tremble_}});
}

DynamicsVariant sample_dynamics_variant(const EnvPtr& base, double magnitude,
                                        std::uint64_t seed) {
  if (!base) throw std::invalid_argument("sample_dynamics_variant: null base");
  if (!(magnitude >= 0.0 && magnitude <= 1.0)) {
    throw std::invalid_argument("sample_dynamics_variant: magnitude must lie in [0, 1]");
  }
  Rng rng = make_rng(seed, {tag(Stream::kVariant)});
  const nlohmann::json wrapper = {{"type", "dynamics"}, {"magnitude", magnitude}, {"seed", seed}};

  if (const auto* mdp = dynamic_cast<const TabularMdp*>(base.get())) {
    const int n = mdp->num_states();
    const int na = mdp->num_actions();
    std::uniform_real_distribution<double> u(0.5, 1.0);
    std::vector<double> slip(na);
    for (double& q : slip) q = magnitude * u(rng);
    std::vector<double> t(mdp->transition_tensor().size());
    for (int s = 0; s < n; ++s) {
      for (int a = 0; a < na; ++a) {
        for (int next = 0; next < n; ++next) {
          double mean_t = 0.0;
          for (int b = 0; b < na; ++b) mean_t += mdp->transition(s, b, next);
          mean_t /= na;
          t[(static_cast<std::size_t>(s) * na + a) * n + next] =
              (1.0 - slip[a]) * mdp->transition(s, a, next) + slip[a] * mean_t;
        }
      }
    }
    TabularMdp variant = mdp->with_transition(std::move(t));
    variant.set_kind(mdp->kind(), with_wrapper(mdp->config(), wrapper));
    return {base, std::make_shared<const TabularMdp>(std::move(variant)),
            {{"slip_probability", slip}}, seed};
  }
  if (const auto* pm = dynamic_cast<const PointMassEnv*>(base.get())) {
    std::uniform_real_distribution<double> u(1.0 - magnitude, 1.0 + magnitude);
    const double factor = magnitude > 0.0 ? u(rng) : 1.0;
    PointMassOptions o = pm->options();
    o.action_scale *= factor;
    return {base, std::make_shared<const PointMassEnv>(o),
            {{"action_scale_factor", factor}, {"action_scale", o.action_scale}}, seed};
  }
  throw std::invalid_argument("sample_dynamics_variant: unsupported base environment " +
                              base->kind());
}

}  // namespace evil
