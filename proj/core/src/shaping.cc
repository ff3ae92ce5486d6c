#include "evil/shaping.h"

#include <ostream>
#include <stdexcept>

namespace evil {

double potential_diff(const Potential& potential, const Environment& env, const State& s,
                      const State& s_next) {
  return potential.value(env, s_next) - potential.value(env, s);
}

std::vector<double> shape(std::span<const double> base, const Potential& potential,
                          const Environment& env, const Trajectory& traj) {
  const std::size_t n = traj.size();
  if (n == 0) throw std::invalid_argument("shape: empty trajectory");
  if (base.size() != n) throw std::invalid_argument("shape: reward/trajectory length mismatch");
  std::vector<double> phi(n);
  for (std::size_t h = 0; h < n; ++h) phi[h] = potential.value(env, traj.states[h]);
  std::vector<double> out(n);
  for (std::size_t h = 0; h + 1 < n; ++h) out[h] = base[h] + (phi[h + 1] - phi[h]);
  out[n - 1] = base[n - 1] + (phi[0] - phi[n - 1]);
  return out;
}

ShapedReward::ShapedReward(RewardPtr base, PotentialPtr potential, std::string name)
    : base_(std::move(base)), potential_(std::move(potential)), name_(std::move(name)) {
  if (!base_ || !potential_) throw std::invalid_argument("ShapedReward: null base or potential");
  if (name_.empty()) name_ = base_->name() + "+shaping";
}

std::vector<double> ShapedReward::label(const Environment& env, const Trajectory& traj) const {
  const std::vector<double> base = base_->label(env, traj);
  return shape(base, *potential_, env, traj);
}

DeterministicTablePolicy greedy_under_shaping(const TabularMdp& mdp, const Potential& potential) {
  if (!mdp.deterministic()) {
    throw std::invalid_argument("greedy_under_shaping: one-step planning needs deterministic dynamics");
  }
  const int n = mdp.num_states();
  std::vector<double> phi(n);
  for (int s = 0; s < n; ++s) phi[s] = potential.value(mdp, from_index(s));
  std::vector<int> actions(n, 0);
  for (int s = 0; s < n; ++s) {
    double best = 0.0;
    for (int a = 0; a < mdp.num_actions(); ++a) {
      const int next = mdp.successors(s, a).front().first;
      const double score = mdp.reward_table()(s, a) + (phi[next] - phi[s]);
      if (a == 0 || score > best) {
        best = score;
        actions[s] = a;
      }
    }
  }
  return DeterministicTablePolicy(std::move(actions), mdp.num_actions());
}

void write_grid_csv(std::ostream& out, const Eigen::VectorXd& values, int width, int height) {
  if (values.size() != static_cast<Eigen::Index>(width) * height) {
    throw std::invalid_argument("write_grid_csv: value count does not match grid");
  }
  out << "row";
  for (int x = 0; x < width; ++x) out << ",x" << x;
  out << '\n';
  const auto old = out.precision(17);
  for (int y = height - 1; y >= 0; --y) {
    out << y;
    for (int x = 0; x < width; ++x) out << ',' << values[y * width + x];
    out << '\n';
  }
  out.precision(old);
}

}  // namespace evil
