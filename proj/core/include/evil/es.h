#ifndef EVIL_ES_H_
#define EVIL_ES_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "evil/pg.h"

namespace evil {

struct EsConfig {
  int population_size = 64;
  double sigma_init = 0.03;
  double sigma_decay = 1.0;
  double learning_rate = 1e-3;
  int generations = 600;
  bool antithetic = true;
  bool rank_shaping = true;
  PgConfig inner;  // inner.updates is M
  // Fraction of the M inner updates that a fitness evaluation trains for.
  // fraction_schedule entries {first_generation, fraction} override it from
  // that generation on.
  double fitness_fraction = 1.0;
  std::vector<std::pair<int, double>> fraction_schedule;
  // Every member of a generation trains with the same inner seed instead of
  // its own (variance reduction; off follows the per-member derivation).
  bool common_inner_seeds = false;

  void validate() const;
  double fraction_at(int generation) const;
  int inner_updates_at(int generation) const;
  nlohmann::json to_json() const;
  static EsConfig from_json(const nlohmann::json& j);
};

struct GenerationStats {
  int generation = 0;
  double mean_fitness = 0.0;
  double best_fitness = 0.0;
  double sigma = 0.0;
};

struct EsState {
  Eigen::VectorXd theta;
  double sigma = 0.0;
  int generation = 0;
  std::vector<GenerationStats> fitness_history;
};

EsState make_es_state(Eigen::VectorXd theta, const EsConfig& config);

struct FitnessRecord {
  int member = 0;
  std::uint64_t noise_seed = 0;
  double loss = 0.0;  // L_i = -AUC_i
  double auc = 0.0;
};

FitnessRecord make_record(int member, std::uint64_t noise_seed, double auc);

struct Population {
  std::vector<Eigen::VectorXd> members;  // theta + sigma * eps_i
  std::vector<Eigen::VectorXd> noises;   // eps_i
  std::vector<std::uint64_t> noise_seeds;
};

// With antithetic sampling member 2j+1 mirrors member 2j. Reproducible from
// (seed, state.generation).
Population sample_population(const EsState& state, const EsConfig& config, std::uint64_t seed);

// Centered ranks in [-0.5, 0.5]; tied values share their average rank.
Eigen::VectorXd centered_ranks(const Eigen::VectorXd& values);

// (1 / (N sigma)) sum_i w_i eps_i with w the (optionally rank-transformed)
// losses: the search-gradient estimate of the expected loss.
Eigen::VectorXd es_gradient(const std::vector<FitnessRecord>& records,
                            const std::vector<Eigen::VectorXd>& noises, double sigma,
                            bool rank_shaping);

// theta <- theta - alpha * es_gradient; sigma <- sigma * sigma_decay. Records
// may arrive in any order; they are keyed by member index. Throws
// std::invalid_argument naming the member on a non-finite loss.
EsState es_update(const EsState& state, const std::vector<FitnessRecord>& records,
                  const std::vector<Eigen::VectorXd>& noises, const EsConfig& config);

// Minimizes loss(theta) with the same machinery, for direct use on
// closed-form objectives.
EsState es_minimize(const std::function<double(const Eigen::VectorXd&)>& loss,
                    Eigen::VectorXd theta0, const EsConfig& config, std::uint64_t seed);

// CSV: generation,mean_fitness,best_fitness,sigma
void write_fitness_csv(std::ostream& out, const std::vector<GenerationStats>& history);

}  // namespace evil

#endif  // EVIL_ES_H_
