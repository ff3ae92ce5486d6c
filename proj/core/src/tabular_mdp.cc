#include "evil/tabular_mdp.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace evil {
namespace {

constexpr double kRowTolerance = 1e-9;

}  // namespace

TabularMdp::TabularMdp(int num_states, int num_actions,
                       std::vector<double> transition, Eigen::MatrixXd reward,
                       int horizon, Eigen::VectorXd initial_dist)
    : num_states_(num_states),
      num_actions_(num_actions),
      transition_(std::move(transition)),
      reward_(std::move(reward)),
      horizon_(horizon),
      initial_dist_(std::move(initial_dist)) {
  if (num_states_ < 1 || num_actions_ < 1) {
    throw std::invalid_argument("TabularMdp: num_states and num_actions must be positive");
  }
  if (horizon_ < 1) throw std::invalid_argument("TabularMdp: horizon must be >= 1");
  const auto expected = static_cast<std::size_t>(num_states_) * num_actions_ * num_states_;
  if (transition_.size() != expected) {
    throw std::invalid_argument("TabularMdp: transition tensor has wrong size");
  }
  if (reward_.rows() != num_states_ || reward_.cols() != num_actions_) {
    throw std::invalid_argument("TabularMdp: reward table must be |S| x |A|");
  }
  if (initial_dist_.size() != num_states_) {
    throw std::invalid_argument("TabularMdp: initial_dist must have |S| entries");
  }
  for (int s = 0; s < num_states_; ++s) {
    for (int a = 0; a < num_actions_; ++a) {
      double row = 0.0;
      for (int n = 0; n < num_states_; ++n) {
        const double p = this->transition(s, a, n);
        if (p < 0.0 || !std::isfinite(p)) {
          throw std::invalid_argument("TabularMdp: negative or non-finite probability");
        }
        row += p;
      }
      if (std::abs(row - 1.0) > kRowTolerance) {
        throw std::invalid_argument("TabularMdp: transition row (" + std::to_string(s) +
                                    ", " + std::to_string(a) + ") sums to " +
                                    std::to_string(row));
      }
    }
  }
  if (std::abs(initial_dist_.sum() - 1.0) > kRowTolerance || initial_dist_.minCoeff() < 0.0) {
    throw std::invalid_argument("TabularMdp: initial_dist is not a distribution");
  }
  features_ = Eigen::MatrixXd::Identity(num_states_, num_states_);
  build_successors();
}

void TabularMdp::build_successors() {
  successors_.assign(static_cast<std::size_t>(num_states_) * num_actions_, {});
  for (int s = 0; s < num_states_; ++s) {
    for (int a = 0; a < num_actions_; ++a) {
      auto& row = successors_[static_cast<std::size_t>(s) * num_actions_ + a];
      for (int n = 0; n < num_states_; ++n) {
        const double p = transition(s, a, n);
        if (p > 0.0) row.emplace_back(n, p);
      }
    }
  }
}

State TabularMdp::reset(Rng& rng) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  double acc = 0.0;
  int last = 0;
  for (int s = 0; s < num_states_; ++s) {
    if (initial_dist_[s] <= 0.0) continue;
    acc += initial_dist_[s];
    last = s;
    if (u < acc) return from_index(s);
  }
  return from_index(last);
}

StepResult TabularMdp::step(const State& s, const Action& a, Rng& rng) const {
  const int si = as_index(s);
  const int ai = as_index(a);
  if (si < 0 || si >= num_states_ || ai < 0 || ai >= num_actions_) {
    throw std::out_of_range("TabularMdp::step: state or action out of range");
  }
  const auto& row = successors(si, ai);
  if (row.size() == 1) return {from_index(row.front().first), a, false};
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  double acc = 0.0;
  for (const auto& [next, p] : row) {
    acc += p;
    if (u < acc) return {from_index(next), a, false};
  }
  return {from_index(row.back().first), a, false};
}

bool TabularMdp::deterministic() const {
  for (const auto& row : successors_) {
    if (row.size() != 1) return false;
  }
  return true;
}

void TabularMdp::set_features(Eigen::MatrixXd features) {
  if (features.rows() != num_states_) {
    throw std::invalid_argument("TabularMdp::set_features: need one row per state");
  }
  features_ = std::move(features);
}

void TabularMdp::set_kind(std::string kind, nlohmann::json extra) {
  kind_ = std::move(kind);
  extra_ = std::move(extra);
}

TabularMdp TabularMdp::with_transition(std::vector<double> transition) const {
  TabularMdp out(num_states_, num_actions_, std::move(transition), reward_, horizon_,
                 initial_dist_);
  out.features_ = features_;
  out.kind_ = kind_;
  out.extra_ = extra_;
  return out;
}

nlohmann::json TabularMdp::config() const {
  if (!extra_.empty()) return extra_;
  nlohmann::json j;
  j["kind"] = "tabular";
  j["num_states"] = num_states_;
  j["num_actions"] = num_actions_;
  j["horizon"] = horizon_;
  j["transition"] = transition_;
  std::vector<double> r(reward_.data(), reward_.data() + reward_.size());
  j["reward"] = r;  // column-major |S| x |A|
  j["initial_dist"] = std::vector<double>(initial_dist_.data(),
                                          initial_dist_.data() + initial_dist_.size());
  return j;
}

TabularMdp make_gridworld(const GridworldOptions& o) {
  if (o.width < 2 || o.height < 2) {
    throw std::invalid_argument("make_gridworld: width and height must be >= 2");
  }
  auto inside = [&](Cell c) { return c.x >= 0 && c.x < o.width && c.y >= 0 && c.y < o.height; };
  if (!inside(o.goal)) throw std::invalid_argument("make_gridworld: goal outside grid");
  if (!inside(o.start)) throw std::invalid_argument("make_gridworld: start outside grid");

  const int n = o.width * o.height;
  const int num_actions = 4;
  auto index = [&](int x, int y) { return y * o.width + x; };
  const int goal = index(o.goal.x, o.goal.y);

  std::vector<double> transition(static_cast<std::size_t>(n) * num_actions * n, 0.0);
  Eigen::MatrixXd reward(n, num_actions);
  static constexpr int kDx[4] = {0, 0, -1, 1};
  static constexpr int kDy[4] = {1, -1, 0, 0};
  for (int y = 0; y < o.height; ++y) {
    for (int x = 0; x < o.width; ++x) {
      const int s = index(x, y);
      for (int a = 0; a < num_actions; ++a) {
        int next = s;
        if (s != goal) {
          const int nx = x + kDx[a];
          const int ny = y + kDy[a];
          if (nx >= 0 && nx < o.width && ny >= 0 && ny < o.height) next = index(nx, ny);
        }
        transition[(static_cast<std::size_t>(s) * num_actions + a) * n + next] = 1.0;
        reward(s, a) = (s == goal) ? o.goal_reward : o.step_penalty;
      }
    }
  }
  Eigen::VectorXd init = Eigen::VectorXd::Zero(n);
  init[index(o.start.x, o.start.y)] = 1.0;

  TabularMdp mdp(n, num_actions, std::move(transition), std::move(reward), o.horizon,
                 std::move(init));
  Eigen::MatrixXd features(n, 2);
  for (int y = 0; y < o.height; ++y) {
    for (int x = 0; x < o.width; ++x) {
      features(index(x, y), 0) = 2.0 * x / (o.width - 1) - 1.0;
      features(index(x, y), 1) = 2.0 * y / (o.height - 1) - 1.0;
    }
  }
  mdp.set_features(std::move(features));
  mdp.set_kind("gridworld", {{"kind", "gridworld"},
                             {"width", o.width},
                             {"height", o.height},
                             {"goal", {o.goal.x, o.goal.y}},
                             {"start", {o.start.x, o.start.y}},
                             {"step_penalty", o.step_penalty},
                             {"goal_reward", o.goal_reward},
                             {"horizon", o.horizon}});
  return mdp;
}

}  // namespace evil
