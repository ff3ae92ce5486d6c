#include "evil/point_mass.h"

#include <algorithm>
#include <stdexcept>

namespace evil {

PointMassEnv::PointMassEnv(PointMassOptions options) : options_(std::move(options)) {
  if (options_.horizon < 1) throw std::invalid_argument("PointMassEnv: horizon must be >= 1");
  if (options_.dt <= 0.0) throw std::invalid_argument("PointMassEnv: dt must be positive");
  if ((options_.upper.array() <= options_.lower.array()).any()) {
    throw std::invalid_argument("PointMassEnv: empty bounds");
  }
}

State PointMassEnv::reset(Rng& rng) const {
  std::uniform_real_distribution<double> jitter(-options_.start_noise, options_.start_noise);
  State s(4);
  for (int i = 0; i < 2; ++i) {
    const double p = options_.start_position[i] + (options_.start_noise > 0.0 ? jitter(rng) : 0.0);
    s[i] = std::clamp(p, options_.lower[i], options_.upper[i]);
    s[2 + i] = options_.start_velocity[i];
  }
  return s;
}

StepResult PointMassEnv::step(const State& s, const Action& a, Rng& /*rng*/) const {
  if (s.size() != 4 || a.size() != 2) {
    throw std::invalid_argument("PointMassEnv::step: expected 4-d state and 2-d action");
  }
  State next = s;
  for (int i = 0; i < 2; ++i) {
    const double force = options_.action_scale * std::clamp(a[i], -1.0, 1.0);
    double v = s[2 + i] + force * options_.dt;
    double p = s[i] + v * options_.dt;
    if (p < options_.lower[i]) {
      p = options_.lower[i];
      v = 0.0;
    } else if (p > options_.upper[i]) {
      p = options_.upper[i];
      v = 0.0;
    }
    next[i] = p;
    next[2 + i] = v;
  }
  const bool done = (next.head<2>() - options_.goal).norm() < options_.goal_radius;
  return {next, a, done};
}

double PointMassEnv::reward(const State& s, const Action& a) const {
  const double dist = (s.head<2>() - options_.goal).norm();
  const Eigen::Vector2d u = a.head<2>().cwiseMax(-1.0).cwiseMin(1.0);
  return -dist - options_.control_cost * u.squaredNorm();
}

Eigen::VectorXd PointMassEnv::features(const State& s) const {
  Eigen::VectorXd f(4);
  const Eigen::Vector2d center = 0.5 * (options_.lower + options_.upper);
  const Eigen::Vector2d half = 0.5 * (options_.upper - options_.lower);
  f.head<2>() = (s.head<2>() - center).cwiseQuotient(half);
  f.tail<2>() = s.tail<2>();
  return f;
}

bool PointMassEnv::in_bounds(const State& s) const {
  return (s.head<2>().array() >= options_.lower.array()).all() &&
         (s.head<2>().array() <= options_.upper.array()).all();
}

nlohmann::json PointMassEnv::config() const {
  const auto& o = options_;
  return {{"kind", "point_mass"},
          {"start_position", {o.start_position[0], o.start_position[1]}},
          {"start_velocity", {o.start_velocity[0], o.start_velocity[1]}},
          {"start_noise", o.start_noise},
          {"goal", {o.goal[0], o.goal[1]}},
          {"goal_radius", o.goal_radius},
          {"action_scale", o.action_scale},
          {"dt", o.dt},
          {"control_cost", o.control_cost},
          {"horizon", o.horizon},
          {"bounds", {{o.lower[0], o.lower[1]}, {o.upper[0], o.upper[1]}}}};
}

}  // namespace evil
