#include "evil/es.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

namespace evil {

void EsConfig::validate() const {
  if (population_size < 1) throw std::invalid_argument("EsConfig: population_size must be >= 1");
  if (antithetic && population_size % 2 != 0) {
    throw std::invalid_argument("EsConfig: population_size must be even with antithetic sampling");
  }
  if (!(sigma_init > 0.0)) throw std::invalid_argument("EsConfig: sigma_init must be > 0");
  if (!(sigma_decay > 0.0)) throw std::invalid_argument("EsConfig: sigma_decay must be > 0");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("EsConfig: learning_rate must be > 0");
  if (generations < 0) throw std::invalid_argument("EsConfig: generations must be >= 0");
  if (!(fitness_fraction > 0.0 && fitness_fraction <= 1.0)) {
    throw std::invalid_argument("EsConfig: fitness_fraction must lie in (0, 1]");
  }
  for (const auto& [g, f] : fraction_schedule) {
    if (g < 0 || !(f > 0.0 && f <= 1.0)) throw std::invalid_argument("EsConfig: bad fraction_schedule entry");
  }
  inner.validate();
}

double EsConfig::fraction_at(int generation) const {
  double f = fitness_fraction;
  int from = -1;
  for (const auto& [g, frac] : fraction_schedule) {
    if (g <= generation && g >= from) {
      from = g;
      f = frac;
    }
  }
  return f;
}

int EsConfig::inner_updates_at(int generation) const {
  if (inner.updates == 0) return 0;
  return std::max(1, static_cast<int>(std::ceil(fraction_at(generation) * inner.updates - 1e-9)));
}

nlohmann::json EsConfig::to_json() const {
  nlohmann::json sched = nlohmann::json::array();
  for (const auto& [g, f] : fraction_schedule) sched.push_back({{"generation", g}, {"fraction", f}});
  return {{"population_size", population_size},
          {"sigma_init", sigma_init},
          {"sigma_decay", sigma_decay},
          {"learning_rate", learning_rate},
          {"generations", generations},
          {"antithetic", antithetic},
          {"rank_shaping", rank_shaping},
          {"fitness_fraction", fitness_fraction},
          {"fraction_schedule", sched},
          {"common_inner_seeds", common_inner_seeds},
          {"inner", inner.to_json()}};
}

EsConfig EsConfig::from_json(const nlohmann::json& j) {
  EsConfig c;
  c.population_size = j.value("population_size", c.population_size);
  c.sigma_init = j.value("sigma_init", c.sigma_init);
  c.sigma_decay = j.value("sigma_decay", c.sigma_decay);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.generations = j.value("generations", c.generations);
  c.antithetic = j.value("antithetic", c.antithetic);
  c.rank_shaping = j.value("rank_shaping", c.rank_shaping);
  c.fitness_fraction = j.value("fitness_fraction", c.fitness_fraction);
  c.common_inner_seeds = j.value("common_inner_seeds", c.common_inner_seeds);
  if (j.contains("fraction_schedule")) {
    for (const auto& e : j.at("fraction_schedule")) {
      c.fraction_schedule.emplace_back(e.at("generation").get<int>(), e.at("fraction").get<double>());
    }
  }
  if (j.contains("inner")) c.inner = PgConfig::from_json(j.at("inner"));
  c.validate();
  return c;
}

EsState make_es_state(Eigen::VectorXd theta, const EsConfig& config) {
  config.validate();
  EsState s;
  s.theta = std::move(theta);
  s.sigma = config.sigma_init;
  return s;
}

FitnessRecord make_record(int member, std::uint64_t noise_seed, double auc_value) {
  return {member, noise_seed, -auc_value, auc_value};
}

Population sample_population(const EsState& state, const EsConfig& config, std::uint64_t seed) {
  const int n = config.population_size;
  const auto dim = state.theta.size();
  Population pop;
  pop.members.resize(n);
  pop.noises.resize(n);
  pop.noise_seeds.resize(n);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto gen = static_cast<std::uint64_t>(state.generation);
  for (int i = 0; i < n; ++i) {
    const bool mirror = config.antithetic && (i % 2 == 1);
    const int source = mirror ? i - 1 : i;
    pop.noise_seeds[i] = derive_seed(seed, {tag(Stream::kNoise), gen, static_cast<std::uint64_t>(source)});
    if (mirror) {
      pop.noises[i] = -pop.noises[i - 1];
    } else {
      Rng rng(pop.noise_seeds[i]);
      pop.noises[i].resize(dim);
      for (Eigen::Index d = 0; d < dim; ++d) pop.noises[i][d] = normal(rng);
    }
    pop.members[i] = state.theta + state.sigma * pop.noises[i];
  }
  return pop;
}

Eigen::VectorXd centered_ranks(const Eigen::VectorXd& values) {
  const auto n = values.size();
  Eigen::VectorXd out(n);
  if (n == 0) return out;
  if (n == 1) {
    out[0] = 0.0;
    return out;
  }
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
  for (Eigen::Index i = 0; i < n;) {
    Eigen::Index j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j);
    for (Eigen::Index k = i; k <= j; ++k) out[order[k]] = rank / static_cast<double>(n - 1) - 0.5;
    i = j + 1;
  }
  return out;
}

namespace {

// Losses in member order, validated.
Eigen::VectorXd ordered_losses(const std::vector<FitnessRecord>& records, std::size_t n) {
  if (records.size() != n) throw std::invalid_argument("es_update: expected one record per member");
  Eigen::VectorXd losses(static_cast<Eigen::Index>(n));
  std::vector<bool> seen(n, false);
  for (const auto& r : records) {
    if (r.member < 0 || static_cast<std::size_t>(r.member) >= n || seen[r.member]) {
      throw std::invalid_argument("es_update: bad or duplicate member index " + std::to_string(r.member));
    }
    if (!std::isfinite(r.loss)) {
      throw std::invalid_argument("es_update: non-finite loss from member " + std::to_string(r.member));
    }
    seen[r.member] = true;
    losses[r.member] = r.loss;
  }
  return losses;
}

}  // namespace

Eigen::VectorXd es_gradient(const std::vector<FitnessRecord>& records,
                            const std::vector<Eigen::VectorXd>& noises, double sigma,
                            bool rank_shaping) {
  const std::size_t n = noises.size();
  if (n == 0) throw std::invalid_argument("es_gradient: empty population");
  Eigen::VectorXd w = ordered_losses(records, n);
  if (rank_shaping) w = centered_ranks(w);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(noises.front().size());
  for (std::size_t i = 0; i < n; ++i) g += w[static_cast<Eigen::Index>(i)] * noises[i];
  return g / (static_cast<double>(n) * sigma);
}

EsState es_update(const EsState& state, const std::vector<FitnessRecord>& records,
                  const std::vector<Eigen::VectorXd>& noises, const EsConfig& config) {
  const Eigen::VectorXd losses = ordered_losses(records, noises.size());
  EsState next = state;
  next.theta = state.theta - config.learning_rate * es_gradient(records, noises, state.sigma, config.rank_shaping);
  next.sigma = state.sigma * config.sigma_decay;
  GenerationStats stats;
  stats.generation = state.generation;
  stats.mean_fitness = -losses.mean();
  stats.best_fitness = -losses.minCoeff();
  stats.sigma = state.sigma;
  next.fitness_history.push_back(stats);
  next.generation = state.generation + 1;
  return next;
}

EsState es_minimize(const std::function<double(const Eigen::VectorXd&)>& loss,
                    Eigen::VectorXd theta0, const EsConfig& config, std::uint64_t seed) {
  EsState state = make_es_state(std::move(theta0), config);
  for (int g = 0; g < config.generations; ++g) {
    const Population pop = sample_population(state, config, seed);
    std::vector<FitnessRecord> records;
    records.reserve(pop.members.size());
    for (std::size_t i = 0; i < pop.members.size(); ++i) {
      records.push_back(make_record(static_cast<int>(i), pop.noise_seeds[i], -loss(pop.members[i])));
    }
    state = es_update(state, records, pop.noises, config);
  }
  return state;
}

void write_fitness_csv(std::ostream& out, const std::vector<GenerationStats>& history) {
  const auto old = out.precision(17);
  out << "generation,mean_fitness,best_fitness,sigma\n";
  for (const auto& s : history) {
    out << s.generation << ',' << s.mean_fitness << ',' << s.best_fitness << ',' << s.sigma << '\n';
  }
  out.precision(old);
}

}  // namespace evil
