#ifndef EVIL_SOLVERS_H_
#define EVIL_SOLVERS_H_

#include <vector>

#include <Eigen/Core>

#include "evil/policy.h"
#include "evil/tabular_mdp.h"

namespace evil {

// Finite-horizon backward induction. values[h] for h = 0..H with
// values[H] == 0; q[h] and greedy[h] for h = 0..H-1. Ties break to the
// lowest action index.
struct ValueIterationResult {
  std::vector<Eigen::VectorXd> values;
  std::vector<Eigen::MatrixXd> q;
  std::vector<std::vector<int>> greedy;

  // Timestep-0 value table; the state-only potential baseline Phi = V*.
  const Eigen::VectorXd& potential() const { return values.front(); }
  // Greedy policy of the timestep-0 Q table.
  DeterministicTablePolicy stationary_policy() const;
  // E_{s ~ initial_dist}[V*_0(s)]
  double optimal_return(const TabularMdp& mdp) const;
};

ValueIterationResult value_iteration(const TabularMdp& mdp);

// Log-sum-exp backups: V_h(s) = tau * log sum_a exp(Q_h(s, a) / tau), and
// policy[h] = softmax(Q_h / tau) row-wise.
struct SoftValueIterationResult {
  std::vector<Eigen::VectorXd> values;
  std::vector<Eigen::MatrixXd> q;
  std::vector<Eigen::MatrixXd> policy;  // |S| x |A| per timestep
};

SoftValueIterationResult soft_value_iteration(const TabularMdp& mdp, double temperature);

// |S| x |A| action-probability table of a discrete policy.
Eigen::MatrixXd policy_table(const Policy& policy, const Environment& env);

// Exact J(pi, r) via the state-occupancy recursion. policy_by_step holds one
// table per timestep, or a single table for a stationary policy. reward
// defaults to the MDP's own reward table.
double expected_return(const TabularMdp& mdp, const std::vector<Eigen::MatrixXd>& policy_by_step);
double expected_return(const TabularMdp& mdp, const Eigen::MatrixXd& policy,
                       const Eigen::MatrixXd& reward);
double expected_return(const TabularMdp& mdp, const Eigen::MatrixXd& policy);

// State occupancy d_h(s) for h = 0..H-1 under a stationary policy.
std::vector<Eigen::VectorXd> state_occupancy(const TabularMdp& mdp, const Eigen::MatrixXd& policy);

}  // namespace evil

#endif  // EVIL_SOLVERS_H_
