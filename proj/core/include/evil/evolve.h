#ifndef EVIL_EVOLVE_H_
#define EVIL_EVOLVE_H_

#include <functional>
#include <memory>
#include <vector>

#include "evil/es.h"
#include "evil/potential.h"
#include "evil/reward.h"

namespace evil {

struct EvolveOptions {
  int threads = 1;
  // Starting potential; defaults to make_default_potential(env, seed).
  const Potential* init = nullptr;
  // Called after every generation with the updated state.
  std::function<void(const EsState&)> on_generation;
};

struct EvolveResult {
  std::unique_ptr<Potential> potential;  // mean parameters after the last generation
  EsState state;
};

// Fitness of one potential: AUC of a fresh pg_train run on base + F_Phi,
// measured under the shaped reward itself.
double shaping_fitness(const Environment& env, RewardPtr base, const Potential& potential,
                       const PgConfig& inner, std::uint64_t seed);

// Evolves the parameters of a potential with OpenAI-ES. Every member trains a
// fresh policy for the generation's inner-update count; randomness derives
// from (seed, generation, member).
EvolveResult evolve_shaping(RewardPtr base_reward, const Environment& env, const EsConfig& config,
                            std::uint64_t seed, const EvolveOptions& options = {});

}  // namespace evil

#endif  // EVIL_EVOLVE_H_
