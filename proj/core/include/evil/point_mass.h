#ifndef EVIL_POINT_MASS_H_
#define EVIL_POINT_MASS_H_

#include <Eigen/Core>

#include "evil/env.h"

namespace evil {

struct PointMassOptions {
  Eigen::Vector2d start_position{-0.8, -0.8};
  Eigen::Vector2d start_velocity{0.0, 0.0};
  double start_noise = 0.1;  // uniform jitter on the start position
  Eigen::Vector2d goal{0.6, 0.6};
  double goal_radius = 0.1;
  double action_scale = 1.0;
  double dt = 0.1;
  double control_cost = 0.01;
  int horizon = 50;
  Eigen::Vector2d lower{-1.0, -1.0};
  Eigen::Vector2d upper{1.0, 1.0};
};

// 2-D double integrator in an axis-aligned box. State is (px, py, vx, vy);
// actions are 2-D forces clipped to [-1, 1] and multiplied by action_scale.
// Positions are clipped to the box (the velocity component into the wall is
// zeroed). Episodes end early on goal contact.
class PointMassEnv : public Environment {
 public:
  explicit PointMassEnv(PointMassOptions options = {});

  std::string kind() const override { return "point_mass"; }
  int horizon() const override { return options_.horizon; }
  int feature_dim() const override { return 4; }
  ActionSpace action_space() const override { return {false, 2}; }

  State reset(Rng& rng) const override;
  StepResult step(const State& s, const Action& a, Rng& rng) const override;
  double reward(const State& s, const Action& a) const override;
  Eigen::VectorXd features(const State& s) const override;
  nlohmann::json config() const override;

  const PointMassOptions& options() const { return options_; }
  bool in_bounds(const State& s) const;

 private:
  PointMassOptions options_;
};

}  // namespace evil

#endif  // EVIL_POINT_MASS_H_
