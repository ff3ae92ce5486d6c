#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "evil/es.h"
#include "evil/evolve.h"
#include "evil/potential.h"
#include "evil/reward.h"
#include "evil/tabular_mdp.h"

namespace evil {
namespace {

std::vector<FitnessRecord> records_from_losses(const std::vector<double>& losses) {
  std::vector<FitnessRecord> out;
  for (std::size_t i = 0; i < losses.size(); ++i) {
    out.push_back(make_record(static_cast<int>(i), 0, -losses[i]));
  }
  return out;
}

EsConfig small_config(int n = 8) {
  EsConfig c;
  c.population_size = n;
  return c;
}

TEST(Population, ZeroSigmaGivesCopiesOfTheMean) {
  const EsConfig c = small_config();
  EsState s = make_es_state(Eigen::VectorXd::LinSpaced(5, -1, 1), c);
  s.sigma = 0.0;
  const Population p = sample_population(s, c, 3);
  for (const auto& m : p.members) EXPECT_EQ(m, s.theta);
}

TEST(Population, AntitheticNoisesCancelExactly) {
  const EsConfig c = small_config(16);
  const EsState s = make_es_state(Eigen::VectorXd::Zero(7), c);
  const Population p = sample_population(s, c, 4);
  Eigen::VectorXd total = Eigen::VectorXd::Zero(7);
  for (const auto& e : p.noises) total += e;
  EXPECT_EQ(total, Eigen::VectorXd::Zero(7));
  for (int i = 0; i < 16; i += 2) EXPECT_EQ(p.noises[i], -p.noises[i + 1]);
}

TEST(Population, SampleSpreadMatchesSigma) {
  EsConfig c;
  c.antithetic = false;
  const EsState s = make_es_state(Eigen::VectorXd::Zero(50), c);
  const Population p = sample_population(s, c, 5);
  double sq = 0.0;
  int count = 0;
  for (const auto& m : p.members) {
    sq += m.squaredNorm();
    count += static_cast<int>(m.size());
  }
  const double sd = std::sqrt(sq / count);
  EXPECT_NEAR(sd, 0.03, 0.25 * 0.03);
}

TEST(Population, ReproducibleFromSeedAndGeneration) {
  const EsConfig c = small_config();
  EsState s = make_es_state(Eigen::VectorXd::Zero(3), c);
  const Population a = sample_population(s, c, 9);
  const Population b = sample_population(s, c, 9);
  EXPECT_EQ(a.noise_seeds, b.noise_seeds);
  for (std::size_t i = 0; i < a.noises.size(); ++i) EXPECT_EQ(a.noises[i], b.noises[i]);
  s.generation = 1;
  const Population d = sample_population(s, c, 9);
  EXPECT_NE(a.noises[0], d.noises[0]);
}

TEST(CenteredRanks, RangeAndTies) {
  Eigen::VectorXd v(5);
  v << 3.0, 1.0, 2.0, 2.0, 9.0;
  const Eigen::VectorXd r = centered_ranks(v);
  EXPECT_DOUBLE_EQ(r[1], -0.5);
  EXPECT_DOUBLE_EQ(r[4], 0.5);
  EXPECT_DOUBLE_EQ(r[2], r[3]);
  EXPECT_DOUBLE_EQ(r[2], 1.5 / 4.0 - 0.5);
  EXPECT_NEAR(r.sum(), 0.0, 1e-15);
}

TEST(EsUpdate, LiteralUpdateMatchesHandComputation) {
  EsConfig c = small_config(2);
  c.antithetic = false;
  c.rank_shaping = false;
  c.learning_rate = 0.5;
  EsState s = make_es_state(Eigen::Vector2d(1.0, -1.0), c);
  s.sigma = 0.1;
  const std::vector<Eigen::VectorXd> noises = {Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.0, 2.0)};
  const auto records = records_from_losses({3.0, -1.0});
  const EsState next = es_update(s, records, noises, c);
  // grad = (3 * [1, 0] + (-1) * [0, 2]) / (2 * 0.1) = [15, -10]
  EXPECT_NEAR(next.theta[0], 1.0 - 0.5 * 15.0, 1e-12);
  EXPECT_NEAR(next.theta[1], -1.0 + 0.5 * 10.0, 1e-12);
  EXPECT_EQ(next.generation, 1);
  ASSERT_EQ(next.fitness_history.size(), 1u);
  EXPECT_DOUBLE_EQ(next.fitness_history[0].mean_fitness, -1.0);
  EXPECT_DOUBLE_EQ(next.fitness_history[0].best_fitness, 1.0);
}

TEST(EsUpdate, EqualLossesLeaveThetaUnchanged) {
  for (bool rank : {true, false}) {
    EsConfig c = small_config(8);
    c.rank_shaping = rank;
    const EsState s = make_es_state(Eigen::VectorXd::LinSpaced(4, 0, 1), c);
    const Population p = sample_population(s, c, 1);
    const EsState next = es_update(s, records_from_losses(std::vector<double>(8, 2.5)), p.noises, c);
    EXPECT_LT((next.theta - s.theta).norm(), 1e-15) << "rank_shaping=" << rank;
  }
}

TEST(EsUpdate, InvariantToConstantAddedToLosses) {
  for (bool rank : {true, false}) {
    EsConfig c = small_config(8);
    c.rank_shaping = rank;
    const EsState s = make_es_state(Eigen::VectorXd::Zero(4), c);
    const Population p = sample_population(s, c, 2);
    std::vector<double> losses = {0.5, -1.0, 2.0, 0.25, 3.0, -2.0, 1.0, 0.0};
    std::vector<double> shifted = losses;
    for (double& l : shifted) l += 100.0;
    const EsState a = es_update(s, records_from_losses(losses), p.noises, c);
    const EsState b = es_update(s, records_from_losses(shifted), p.noises, c);
    EXPECT_LT((a.theta - b.theta).norm(), 1e-12) << "rank_shaping=" << rank;
  }
}

TEST(EsUpdate, RecordOrderDoesNotMatter) {
  const EsConfig c = small_config(8);
  const EsState s = make_es_state(Eigen::VectorXd::Zero(3), c);
  const Population p = sample_population(s, c, 3);
  auto records = records_from_losses({1, 5, 2, 8, 3, 7, 4, 6});
  const EsState a = es_update(s, records, p.noises, c);
  std::mt19937 shuffler(4);
  std::shuffle(records.begin(), records.end(), shuffler);
  const EsState b = es_update(s, records, p.noises, c);
  EXPECT_EQ(a.theta, b.theta);
}

TEST(EsUpdate, RejectsNonFiniteLossNamingTheMember) {
  const EsConfig c = small_config(4);
  const EsState s = make_es_state(Eigen::VectorXd::Zero(2), c);
  const Population p = sample_population(s, c, 3);
  auto records = records_from_losses({1, 2, 3, 4});
  records[2].loss = std::nan("");
  try {
    es_update(s, records, p.noises, c);
    FAIL() << "expected a throw";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("member 2"), std::string::npos) << e.what();
  }
  records[2].loss = 0.0;
  records[3].member = 0;
  EXPECT_THROW(es_update(s, records, p.noises, c), std::invalid_argument);
}

TEST(EsConfig, ValidationAndFractions) {
  EsConfig c;
  c.population_size = 7;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.population_size = 8;
  c.inner.updates = 10;
  c.fitness_fraction = 0.25;
  c.fraction_schedule = {{5, 0.5}, {10, 1.0}};
  EXPECT_EQ(c.inner_updates_at(0), 3);
  EXPECT_EQ(c.inner_updates_at(5), 5);
  EXPECT_EQ(c.inner_updates_at(12), 10);
  EXPECT_EQ(EsConfig::from_json(c.to_json()).to_json(), c.to_json());
  c.fitness_fraction = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(EsEstimator, LinearFitnessGradientAtLargePopulation) {
  Rng rng(41);
  std::normal_distribution<double> normal;
  Eigen::VectorXd g(20);
  for (auto& x : g) x = normal(rng);
  EsConfig c;
  c.population_size = 4096;
  c.antithetic = false;
  c.rank_shaping = false;
  const EsState s = make_es_state(Eigen::VectorXd::Zero(20), c);
  const Population p = sample_population(s, c, 7);
  std::vector<FitnessRecord> records;
  for (int i = 0; i < 4096; ++i) records.push_back(make_record(i, p.noise_seeds[i], g.dot(p.members[i])));
  const Eigen::VectorXd estimate = -es_gradient(records, p.noises, s.sigma, false);
  EXPECT_LT((estimate - g).norm() / g.norm(), 0.10);
}

TEST(EsEstimator, QuadraticConvergesAtDefaults) {
  Rng rng(42);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  Eigen::VectorXd target(10);
  for (auto& x : target) x = u(rng);
  EsConfig c;
  c.generations = 300;
  const EsState s = es_minimize([&](const Eigen::VectorXd& t) { return (t - target).squaredNorm(); },
                                Eigen::VectorXd::Zero(10), c, 3);
  EXPECT_LT((s.theta - target).norm(), 0.05);
}

TEST(FitnessCsv, Header) {
  std::ostringstream out;
  write_fitness_csv(out, {{0, 1.0, 2.0, 0.03}});
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "generation,mean_fitness,best_fitness,sigma");
}

EsConfig tiny_evolve_config() {
  EsConfig c;
  c.population_size = 4;
  c.generations = 2;
  c.sigma_init = 1.0;
  c.learning_rate = 1.0;
  c.inner.updates = 3;
  c.inner.batch_trajectories = 2;
  c.inner.actor_lr = {0.05, 0.05};
  c.inner.critic_lr = {0.05, 0.05};
  c.inner.gae_lambda = 0.5;
  return c;
}

TEST(EvolveShaping, ZeroGenerationsReturnsInitialPotential) {
  const TabularMdp g = make_gridworld(GridworldOptions{});
  EsConfig c = tiny_evolve_config();
  c.generations = 0;
  const TabularPotential init(Eigen::VectorXd::LinSpaced(25, 0, 1));
  EvolveOptions o;
  o.init = &init;
  const EvolveResult r = evolve_shaping(std::make_shared<GroundTruthReward>(), g, c, 1, o);
  EXPECT_EQ(r.potential->parameters(), init.parameters());
  EXPECT_TRUE(r.state.fitness_history.empty());
}

TEST(EvolveShaping, DeterministicAndThreadCountInvariant) {
  const TabularMdp g = make_gridworld(GridworldOptions{});
  const EsConfig c = tiny_evolve_config();
  const auto base = std::make_shared<GroundTruthReward>();
  int generations_seen = 0;
  EvolveOptions one;
  one.on_generation = [&](const EsState&) { ++generations_seen; };
  const EvolveResult a = evolve_shaping(base, g, c, 5, one);
  const EvolveResult b = evolve_shaping(base, g, c, 5);
  EvolveOptions three;
  three.threads = 3;
  const EvolveResult d = evolve_shaping(base, g, c, 5, three);
  EXPECT_EQ(generations_seen, 2);
  EXPECT_EQ(a.state.theta, b.state.theta);
  EXPECT_EQ(a.state.theta, d.state.theta);
  ASSERT_EQ(a.state.fitness_history.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(a.state.fitness_history[i].mean_fitness, d.state.fitness_history[i].mean_fitness);
  }
  EXPECT_NE(a.state.theta, Eigen::VectorXd::Zero(25));
}

TEST(EvolveShaping, FitnessIsAucOfShapedTraining) {
  const TabularMdp g = make_gridworld(GridworldOptions{});
  const auto base = std::make_shared<GroundTruthReward>();
  PgConfig inner = tiny_evolve_config().inner;
  const TabularPotential zero = TabularPotential::zeros(25);
  const double f = shaping_fitness(g, base, zero, inner, 3);
  const PgResult r = pg_train(g, *base, inner, 3);
  EXPECT_DOUBLE_EQ(f, auc(r.curve));
}

}  // namespace
}  // namespace evil
