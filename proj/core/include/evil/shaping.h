#ifndef EVIL_SHAPING_H_
#define EVIL_SHAPING_H_

#include <iosfwd>
#include <span>
#include <vector>

#include "evil/policy.h"
#include "evil/potential.h"
#include "evil/reward.h"
#include "evil/tabular_mdp.h"

namespace evil {

// F_Phi(s, s') = Phi(s') - Phi(s)
double potential_diff(const Potential& potential, const Environment& env, const State& s,
                      const State& s_next);

// r'_h = r_h + Phi(s_{h+1}) - Phi(s_h) for every step but the last, and
// r'_last = r_last + Phi(s_1) - Phi(s_last), where s_1 is the episode's own
// first state and s_last its last visited state (early termination included).
// The shaping terms telescope to zero over each trajectory.
std::vector<double> shape(std::span<const double> base, const Potential& potential,
                          const Environment& env, const Trajectory& traj);

// base reward plus potential-based shaping.
class ShapedReward : public RewardSource {
 public:
  ShapedReward(RewardPtr base, PotentialPtr potential, std::string name = "");

  std::string name() const override { return name_; }
  std::vector<double> label(const Environment& env, const Trajectory& traj) const override;

  const RewardSource& base() const { return *base_; }
  const Potential& potential() const { return *potential_; }

 private:
  RewardPtr base_;
  PotentialPtr potential_;
  std::string name_;
};

// One-step lookahead policy: argmax_a r(s, a) + Phi(T(s, a)) - Phi(s).
// Requires deterministic dynamics.
DeterministicTablePolicy greedy_under_shaping(const TabularMdp& mdp, const Potential& potential);

// Grid CSV of per-cell values (state index y * width + x, y = 0 bottom row).
// Header "row,x0,...,x{w-1}", then rows from the top (y = height - 1) down.
void write_grid_csv(std::ostream& out, const Eigen::VectorXd& values, int width, int height);

}  // namespace evil

#endif  // EVIL_SHAPING_H_
