#include <benchmark/benchmark.h>

#include "evil/es.h"
#include "evil/pg.h"
#include "evil/policy.h"
#include "evil/potential.h"
#include "evil/reward.h"
#include "evil/reward_model.h"
#include "evil/shaping.h"
#include "evil/solvers.h"
#include "evil/tabular_mdp.h"
#include "evil/trajectory.h"

namespace evil {
namespace {

TabularMdp grid(int side) {
  GridworldOptions o;
  o.width = side;
  o.height = side;
  o.start = {side - 1, side - 1};
  o.horizon = 4 * side;
  return make_gridworld(o);
}

void BM_Rollout(benchmark::State& state) {
  const TabularMdp g = grid(5);
  const TabularSoftmaxPolicy policy(25, 4);
  const GroundTruthReward truth;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(rollout(g, policy, truth, seed++));
  state.SetItemsProcessed(state.iterations() * g.horizon());
}
BENCHMARK(BM_Rollout);

void BM_ShapedRollout(benchmark::State& state) {
  const TabularMdp g = grid(5);
  const TabularSoftmaxPolicy policy(25, 4);
  const ShapedReward shaped(std::make_shared<GroundTruthReward>(),
                            std::make_shared<TabularPotential>(Eigen::VectorXd::Random(25)));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(rollout(g, policy, shaped, seed++));
}
BENCHMARK(BM_ShapedRollout);

void BM_ValueIteration(benchmark::State& state) {
  const TabularMdp g = grid(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(value_iteration(g));
}
BENCHMARK(BM_ValueIteration)->Arg(5)->Arg(10)->Arg(20);

void BM_PgUpdate(benchmark::State& state) {
  const TabularMdp g = grid(5);
  PgConfig c;
  PgTrainer trainer(g, c, make_default_policy(g, 0), make_default_critic(g, 0));
  const auto batch = trainer.collect(GroundTruthReward{}, 1);
  long step = 0;
  for (auto _ : state) benchmark::DoNotOptimize(trainer.update(batch, step++, 1000000));
}
BENCHMARK(BM_PgUpdate);

void BM_EsStep(benchmark::State& state) {
  EsConfig c;
  const auto dim = static_cast<int>(state.range(0));
  EsState s = make_es_state(Eigen::VectorXd::Zero(dim), c);
  for (auto _ : state) {
    const Population p = sample_population(s, c, 3);
    std::vector<FitnessRecord> records;
    for (int i = 0; i < c.population_size; ++i) {
      records.push_back(make_record(i, p.noise_seeds[i], -p.members[i].squaredNorm()));
    }
    s = es_update(s, records, p.noises, c);
  }
}
BENCHMARK(BM_EsStep)->Arg(25)->Arg(17000);

void BM_DiscriminatorLoss(benchmark::State& state) {
  const TabularMdp g = grid(5);
  Rng rng(1);
  const RewardModel f = RewardModel::network(g.feature_dim(), {128, 128}, rng);
  const auto learner = rollouts(g, TabularSoftmaxPolicy(25, 4), GroundTruthReward{}, 10, 2);
  const auto expert = rollouts(g, value_iteration(g).stationary_policy(), GroundTruthReward{}, 10, 3);
  std::vector<const Trajectory*> l, e;
  for (const auto& t : learner) l.push_back(&t);
  for (const auto& t : expert) e.push_back(&t);
  LossOptions options;
  options.gp_coeff = 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(discriminator_loss(f, g, l, e, options, &rng));
}
BENCHMARK(BM_DiscriminatorLoss);

}  // namespace
}  // namespace evil

BENCHMARK_MAIN();
