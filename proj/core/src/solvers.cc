#include "evil/solvers.h"

#include <cmath>
#include <stdexcept>

namespace evil {
namespace {

// Q(s, a) = r(s, a) + sum_s' T(s, a, s') next(s')
Eigen::MatrixXd backup(const TabularMdp& mdp, const Eigen::VectorXd& next) {
  const int n = mdp.num_states();
  const int na = mdp.num_actions();
  Eigen::MatrixXd q(n, na);
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < na; ++a) {
      double v = mdp.reward_table()(s, a);
      for (const auto& [sn, p] : mdp.successors(s, a)) v += p * next[sn];
      q(s, a) = v;
    }
  }
  return q;
}

}  // namespace

DeterministicTablePolicy ValueIterationResult::stationary_policy() const {
  return DeterministicTablePolicy(greedy.front(), static_cast<int>(q.front().cols()));
}

double ValueIterationResult::optimal_return(const TabularMdp& mdp) const {
  return mdp.initial_dist().dot(values.front());
}

ValueIterationResult value_iteration(const TabularMdp& mdp) {
  const int horizon = mdp.horizon();
  const int n = mdp.num_states();
  ValueIterationResult out;
  out.values.assign(horizon + 1, Eigen::VectorXd::Zero(n));
  out.q.resize(horizon);
  out.greedy.assign(horizon, std::vector<int>(n, 0));
  for (int h = horizon - 1; h >= 0; --h) {
    out.q[h] = backup(mdp, out.values[h + 1]);
    for (int s = 0; s < n; ++s) {
      int best = 0;
      for (int a = 1; a < mdp.num_actions(); ++a) {
        if (out.q[h](s, a) > out.q[h](s, best)) best = a;
      }
      out.greedy[h][s] = best;
      out.values[h][s] = out.q[h](s, best);
    }
  }
  return out;
}

SoftValueIterationResult soft_value_iteration(const TabularMdp& mdp, double temperature) {
  if (!(temperature > 0.0)) throw std::invalid_argument("soft_value_iteration: temperature must be > 0");
  const int horizon = mdp.horizon();
  const int n = mdp.num_states();
  SoftValueIterationResult out;
  out.values.assign(horizon + 1, Eigen::VectorXd::Zero(n));
  out.q.resize(horizon);
  out.policy.resize(horizon);
  for (int h = horizon - 1; h >= 0; --h) {
    out.q[h] = backup(mdp, out.values[h + 1]);
    out.policy[h].resize(n, mdp.num_actions());
    for (int s = 0; s < n; ++s) {
      const Eigen::VectorXd row = out.q[h].row(s).transpose();
      const double m = row.maxCoeff();
      const Eigen::ArrayXd w = ((row.array() - m) / temperature).exp();
      const double z = w.sum();
      out.values[h][s] = m + temperature * std::log(z);
      out.policy[h].row(s) = (w / z).matrix().transpose();
    }
  }
  return out;
}

Eigen::MatrixXd policy_table(const Policy& policy, const Environment& env) {
  const int n = env.num_states();
  if (n <= 0 || !env.action_space().discrete) {
    throw std::invalid_argument("policy_table: needs a tabular environment");
  }
  Eigen::MatrixXd table(n, env.action_space().size);
  for (int s = 0; s < n; ++s) table.row(s) = policy.probabilities(env, from_index(s)).transpose();
  return table;
}

double expected_return(const TabularMdp& mdp, const std::vector<Eigen::MatrixXd>& policy_by_step) {
  if (policy_by_step.empty()) throw std::invalid_argument("expected_return: empty policy");
  const int n = mdp.num_states();
  Eigen::VectorXd d = mdp.initial_dist();
  double total = 0.0;
  for (int h = 0; h < mdp.horizon(); ++h) {
    const Eigen::MatrixXd& pi = policy_by_step.size() == 1 ? policy_by_step.front() : policy_by_step.at(h);
    Eigen::VectorXd next = Eigen::VectorXd::Zero(n);
    for (int s = 0; s < n; ++s) {
      if (d[s] == 0.0) continue;
      for (int a = 0; a < mdp.num_actions(); ++a) {
        const double w = d[s] * pi(s, a);
        if (w == 0.0) continue;
        total += w * mdp.reward_table()(s, a);
        for (const auto& [sn, p] : mdp.successors(s, a)) next[sn] += w * p;
      }
    }
    d = std::move(next);
  }
  return total;
}

double expected_return(const TabularMdp& mdp, const Eigen::MatrixXd& policy,
                       const Eigen::MatrixXd& reward) {
  const auto occupancy = state_occupancy(mdp, policy);
  double total = 0.0;
  for (const auto& d : occupancy) {
    total += d.dot(policy.cwiseProduct(reward).rowwise().sum());
  }
  return total;
}

double expected_return(const TabularMdp& mdp, const Eigen::MatrixXd& policy) {
  return expected_return(mdp, std::vector<Eigen::MatrixXd>{policy});
}

std::vector<Eigen::VectorXd> state_occupancy(const TabularMdp& mdp, const Eigen::MatrixXd& policy) {
  const int n = mdp.num_states();
  std::vector<Eigen::VectorXd> out;
  out.reserve(mdp.horizon());
  Eigen::VectorXd d = mdp.initial_dist();
  for (int h = 0; h < mdp.horizon(); ++h) {
    out.push_back(d);
    Eigen::VectorXd next = Eigen::VectorXd::Zero(n);
    for (int s = 0; s < n; ++s) {
      if (d[s] == 0.0) continue;
      for (int a = 0; a < mdp.num_actions(); ++a) {
        const double w = d[s] * policy(s, a);
        if (w == 0.0) continue;
        for (const auto& [sn, p] : mdp.successors(s, a)) next[sn] += w * p;
      }
    }
    d = std::move(next);
  }
  return out;
}

}  // namespace evil
