#ifndef EVIL_TESTS_TEST_UTIL_H_
#define EVIL_TESTS_TEST_UTIL_H_

#include <functional>
#include <memory>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "evil/rng.h"
#include "evil/tabular_mdp.h"

namespace evil::testing {

// Random tabular MDP; deterministic successors when branching == 1.
inline TabularMdp random_mdp(Rng& rng, int num_states, int num_actions, int horizon,
                             int branching = 2) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, num_states - 1);
  std::vector<double> t(static_cast<std::size_t>(num_states) * num_actions * num_states, 0.0);
  for (int s = 0; s < num_states; ++s) {
    for (int a = 0; a < num_actions; ++a) {
      std::vector<double> w(num_states, 0.0);
      double total = 0.0;
      for (int b = 0; b < branching; ++b) {
        const double x = 0.1 + u(rng);
        w[pick(rng)] += x;
        total += x;
      }
      for (int n = 0; n < num_states; ++n) {
        t[(static_cast<std::size_t>(s) * num_actions + a) * num_states + n] = w[n] / total;
      }
    }
  }
  Eigen::MatrixXd r(num_states, num_actions);
  for (int i = 0; i < r.size(); ++i) r.data()[i] = 2.0 * u(rng) - 1.0;
  Eigen::VectorXd init = Eigen::VectorXd::Zero(num_states);
  for (int s = 0; s < num_states; ++s) init[s] = u(rng);
  init /= init.sum();
  return TabularMdp(num_states, num_actions, std::move(t), std::move(r), horizon, std::move(init));
}

// Central finite differences of f at x.
inline Eigen::VectorXd numeric_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                        Eigen::VectorXd x, double h = 1e-6) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = f(x);
    x[i] = keep - h;
    const double down = f(x);
    x[i] = keep;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

inline double relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double scale = std::max({a.norm(), b.norm(), 1e-12});
  return (a - b).norm() / scale;
}

}  // namespace evil::testing

#endif  // EVIL_TESTS_TEST_UTIL_H_
