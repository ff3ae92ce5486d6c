#include "evil/env_config.h"

#include <fstream>
#include <stdexcept>

#include "evil/point_mass.h"
#include "evil/tabular_mdp.h"
#include "evil/wrappers.h"

namespace evil {
namespace {

template <typename T>
T field(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("environment config: bad field '") + key +
                                "': " + e.what());
  }
}

Eigen::Vector2d vec2(const nlohmann::json& j, const char* key, Eigen::Vector2d fallback) {
  if (!j.contains(key)) return fallback;
  const auto v = field<std::vector<double>>(j, key, {});
  if (v.size() != 2) {
    throw std::invalid_argument(std::string("environment config: field '") + key +
                                "' must have 2 entries");
  }
  return {v[0], v[1]};
}

Cell cell(const nlohmann::json& j, const char* key, Cell fallback) {
  if (!j.contains(key)) return fallback;
  const auto v = field<std::vector<int>>(j, key, {});
  if (v.size() != 2) {
    throw std::invalid_argument(std::string("environment config: field '") + key +
                                "' must be [x, y]");
  }
  return {v[0], v[1]};
}

EnvPtr make_base(const nlohmann::json& j) {
  if (!j.contains("kind")) throw std::invalid_argument("environment config: missing field 'kind'");
  const std::string kind = field<std::string>(j, "kind", "");
  if (kind == "gridworld") {
    GridworldOptions o;
    o.width = field(j, "width", o.width);
    o.height = field(j, "height", o.height);
    o.goal = cell(j, "goal", o.goal);
    o.start = cell(j, "start", {o.width - 1, o.height - 1});
    o.step_penalty = field(j, "step_penalty", o.step_penalty);
    o.goal_reward = field(j, "goal_reward", o.goal_reward);
    o.horizon = field(j, "horizon", o.horizon);
    return std::make_shared<const TabularMdp>(make_gridworld(o));
  }
  if (kind == "tabular") {
    const int n = field(j, "num_states", 0);
    const int na = field(j, "num_actions", 0);
    auto r = field<std::vector<double>>(j, "reward", {});
    auto init = field<std::vector<double>>(j, "initial_dist", {});
    if (static_cast<int>(r.size()) != n * na) {
      throw std::invalid_argument("environment config: field 'reward' must have |S|*|A| entries");
    }
    Eigen::MatrixXd reward = Eigen::Map<Eigen::MatrixXd>(r.data(), n, na);
    Eigen::VectorXd d = Eigen::Map<Eigen::VectorXd>(init.data(), static_cast<Eigen::Index>(init.size()));
    return std::make_shared<const TabularMdp>(n, na, field<std::vector<double>>(j, "transition", {}),
                                              reward, field(j, "horizon", 1), d);
  }
  if (kind == "point_mass") {
    PointMassOptions o;
    o.start_position = vec2(j, "start_position", o.start_position);
    o.start_velocity = vec2(j, "start_velocity", o.start_velocity);
    o.start_noise = field(j, "start_noise", o.start_noise);
    o.goal = vec2(j, "goal", o.goal);
    o.goal_radius = field(j, "goal_radius", o.goal_radius);
    o.action_scale = field(j, "action_scale", o.action_scale);
    o.dt = field(j, "dt", o.dt);
    o.control_cost = field(j, "control_cost", o.control_cost);
    o.horizon = field(j, "horizon", o.horizon);
    if (j.contains("bounds")) {
      const auto b = field<std::vector<std::vector<double>>>(j, "bounds", {});
      if (b.size() != 2 || b[0].size() != 2 || b[1].size() != 2) {
        throw std::invalid_argument("environment config: field 'bounds' must be [[lx, ly], [ux, uy]]");
      }
      o.lower = {b[0][0], b[0][1]};
      o.upper = {b[1][0], b[1][1]};
    }
    return std::make_shared<const PointMassEnv>(o);
  }
  throw std::invalid_argument("environment config: unknown kind '" + kind + "'");
}

}  // namespace

EnvPtr make_environment(const nlohmann::json& config) {
  if (!config.is_object()) throw std::invalid_argument("environment config: expected an object");
  nlohmann::json base = config;
  base.erase("wrappers");
  base.erase("seed");
  EnvPtr env = make_base(base);
  if (!config.contains("wrappers")) return env;
  if (!config.at("wrappers").is_array()) {
    throw std::invalid_argument("environment config: field 'wrappers' must be an array");
  }
  for (const auto& w : config.at("wrappers")) {
    const std::string type = field<std::string>(w, "type", "");
    if (type == "tremble") {
      env = std::make_shared<const TrembleWrapper>(env, field(w, "p", 0.05));
    } else if (type == "dynamics") {
      env = sample_dynamics_variant(env, field(w, "magnitude", 0.3),
                                    field<std::uint64_t>(w, "seed", 0))
                .env;
    } else {
      throw std::invalid_argument("environment config: unknown wrapper type '" + type + "'");
    }
  }
  return env;
}

EnvPtr load_environment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open environment config " + path);
  return make_environment(nlohmann::json::parse(in));
}

}  // namespace evil
