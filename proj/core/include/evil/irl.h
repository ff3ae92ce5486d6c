#ifndef EVIL_IRL_H_
#define EVIL_IRL_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evil/adam.h"
#include "evil/evolve.h"
#include "evil/pg.h"
#include "evil/reward_model.h"

namespace evil {

// Learner trajectories tagged with the outer iteration that produced them.
// capacity 0 keeps everything (append-only); a positive capacity keeps the
// most recent trajectories only.
class TrajectoryBuffer {
 public:
  explicit TrajectoryBuffer(std::size_t capacity = 0) : capacity_(capacity) {}

  void add(const Trajectory& traj, int iteration);
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  std::size_t capacity() const { return capacity_; }
  const Trajectory& at(std::size_t i) const { return items_.at(i).traj; }
  int iteration_of(std::size_t i) const { return items_.at(i).iteration; }
  // Everything when n >= size(), otherwise n uniform draws.
  std::vector<const Trajectory*> sample(std::size_t n, Rng& rng) const;

 private:
  struct Item {
    Trajectory traj;
    int iteration;
  };
  std::size_t capacity_;
  std::vector<Item> items_;
};

// Reset probability p0 * (1 - i / total), clamped to [0, 1].
struct ResetSchedule {
  double p0 = 0.0;
  double at(long iteration, long total) const;
};

struct IrlConfig {
  int outer_iterations = 2441;
  int ensemble_size = 5;
  LinearSchedule disc_lr{1e-2, 1e-5};
  double gp_coeff = 10.0;
  double l2_coeff = 0.0;
  int gp_samples = 64;
  int disc_batch_trajectories = 10;  // learner and expert trajectories per discriminator step
  std::size_t buffer_capacity = 0;   // 0 = keep every past trajectory
  ResetSchedule reset{0.05};
  bool literal_sign = false;         // learner maximizes -mean f instead of +mean f
  // "auto" (table on tabular environments), "table" or "network".
  std::string reward_model = "auto";
  std::vector<int> reward_hidden{128, 128};
  PgConfig inner;                    // batch_trajectories = trajectories per policy update

  void validate() const;
  nlohmann::json to_json() const;
  static IrlConfig from_json(const nlohmann::json& j);
  // Same settings with the ensemble, buffer and resets switched off: one
  // discriminator trained on the latest batch only.
  IrlConfig vanilla() const;
};

struct IrlMember {
  RewardModel f;
  Adam f_opt;
  PgTrainer learner;
  TrajectoryBuffer buffer;
};

struct IrlDiagnostic {
  int iteration = 0;
  int member = 0;
  double disc_loss = 0.0;
  double learner_j_true = 0.0;
  bool reset = false;
};

struct IrlState {
  std::vector<IrlMember> members;
  int iteration = 0;
  std::vector<IrlDiagnostic> diagnostics;

  std::shared_ptr<DiscriminatorEnsemble> ensemble() const;
};

IrlState make_irl_state(const Environment& env, const IrlConfig& config, std::uint64_t seed);

// One outer iteration: every member collects a batch, adds it to its buffer
// and takes a discriminator step; then every learner takes a policy step on
// the ensemble-mean reward and may be reset.
void irl_step(IrlState& state, const Environment& env, const std::vector<Trajectory>& expert_demos,
              const IrlConfig& config, std::uint64_t seed, int threads = 1);

struct IrlResult {
  std::shared_ptr<const DiscriminatorEnsemble> ensemble;
  std::shared_ptr<const EnsembleReward> reward;
  std::vector<PolicyPtr> policies;
  std::vector<IrlDiagnostic> diagnostics;
};

IrlResult run_irl(const Environment& env, const std::vector<Trajectory>& expert_demos,
                  const IrlConfig& config, std::uint64_t seed, int threads = 1);

// CSV: iteration,member,disc_loss,learner_J_true,reset_flag
void write_diagnostics_csv(std::ostream& out, const std::vector<IrlDiagnostic>& diagnostics);

// The ensemble reward tabulated over the states of a tabular environment
// (same values, cheaper to query); other environments get it back as is.
RewardPtr freeze_reward(std::shared_ptr<const EnsembleReward> reward, const Environment& env);

struct EvilResult {
  IrlResult irl;
  EvolveResult shaping;
};

// IRL++ then evolved shaping of the recovered reward. The shaping stage uses
// the frozen reward.
EvilResult run_evil(const Environment& env, const std::vector<Trajectory>& expert_demos,
                    const IrlConfig& irl_config, const EsConfig& es_config, std::uint64_t seed,
                    int threads = 1);

}  // namespace evil

#endif  // EVIL_IRL_H_
