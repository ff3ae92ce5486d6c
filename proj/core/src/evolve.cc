#include "evil/evolve.h"

#include <stdexcept>
#include <string>

#include "evil/parallel.h"
#include "evil/shaping.h"

namespace evil {

double shaping_fitness(const Environment& env, RewardPtr base, const Potential& potential,
                       const PgConfig& inner, std::uint64_t seed) {
  ShapedReward shaped(std::move(base), potential.clone());
  return auc(pg_train(env, shaped, inner, seed).curve);
}

EvolveResult evolve_shaping(RewardPtr base_reward, const Environment& env, const EsConfig& config,
                            std::uint64_t seed, const EvolveOptions& options) {
  config.validate();
  if (!base_reward) throw std::invalid_argument("evolve_shaping: null base reward");
  std::unique_ptr<Potential> current =
      options.init ? options.init->clone() : make_default_potential(env, seed);
  EsState state = make_es_state(current->parameters(), config);

  for (int g = 0; g < config.generations; ++g) {
    const Population pop = sample_population(state, config, seed);
    PgConfig inner = config.inner;
    inner.updates = config.inner_updates_at(g);
    const auto gen = static_cast<std::uint64_t>(g);
    std::vector<FitnessRecord> records(pop.members.size());
    parallel_for(static_cast<int>(pop.members.size()), options.threads, [&](int i) {
      const std::uint64_t inner_seed =
          config.common_inner_seeds ? derive_seed(seed, {tag(Stream::kInner), gen})
                                    : derive_seed(seed, {tag(Stream::kInner), gen, static_cast<std::uint64_t>(i)});
      try {
        const auto member = current->with_parameters(pop.members[i]);
        records[i] = make_record(i, pop.noise_seeds[i],
                                 shaping_fitness(env, base_reward, *member, inner, inner_seed));
      } catch (const std::exception& e) {
        throw std::runtime_error("evolve_shaping: generation " + std::to_string(g) + ", member " +
                                 std::to_string(i) + ": " + e.what());
      }
    });
    state = es_update(state, records, pop.noises, config);
    current = current->with_parameters(state.theta);
    if (options.on_generation) options.on_generation(state);
  }
  return {std::move(current), std::move(state)};
}

}  // namespace evil
