#ifndef EVIL_EXPERIMENT_H_
#define EVIL_EXPERIMENT_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evil/bc.h"
#include "evil/curve.h"
#include "evil/es.h"
#include "evil/irl.h"
#include "evil/pg.h"

namespace evil {

// Invalid experiment spec; the message starts with the offending field.
class SpecError : public std::invalid_argument {
 public:
  SpecError(const std::string& field, const std::string& what)
      : std::invalid_argument("spec field '" + field + "': " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

const std::vector<std::string>& experiment_kinds();

struct AblationVariant {
  std::string name;
  nlohmann::json overrides;  // IrlConfig fields; {"vanilla": true} selects the vanilla toggles
};

struct ExperimentSpec {
  std::string kind;
  nlohmann::json env = {{"kind", "gridworld"}};
  std::vector<std::uint64_t> seeds;
  int threads = 1;
  PgConfig retrain;  // retraining runs and fitness-free baselines
  EsConfig es;
  IrlConfig irl;
  BcConfig bc;
  int expert_demos = 100;
  PgConfig expert_pg;  // expert for non-tabular environments and the V_E critic
  double tremble_p = 0.05;
  int dynamics_variants = 10;
  double dynamics_magnitude = 0.3;
  double threshold_fraction = 0.9;
  int eval_episodes = 50;  // Monte Carlo evaluation where no exact model exists
  std::vector<std::string> methods;
  std::vector<AblationVariant> ablation;
  std::string out;  // artifact directory; the CLI --out flag overrides it

  // Parses and validates; throws SpecError naming the field.
  static ExperimentSpec from_json(const nlohmann::json& j);
  static ExperimentSpec load(const std::string& path);
  nlohmann::json to_json() const;
};

// 16 hex digits of FNV-1a over the canonical JSON dump.
std::string config_hash(const nlohmann::json& spec);

std::string version_string();

struct ResultRow {
  std::string method;
  std::string target = "source";  // source | tremble | dynamics | variant<k>
  std::uint64_t seed = 0;
  double final_return = 0.0;
  std::optional<double> auc;
  std::optional<std::int64_t> interactions_to_threshold;
  std::optional<double> reward_correlation;
  std::optional<double> potential_correlation;  // evolved potential vs oracle V*
};

struct CurveRecord {
  std::string method;
  std::string target;
  std::uint64_t seed = 0;
  TrainingCurve curve;
};

struct ExperimentResult {
  std::string kind;
  std::vector<ResultRow> rows;
  std::vector<CurveRecord> curves;
  std::map<std::string, std::string> files;  // extra artifacts: relative path -> content
  std::map<std::uint64_t, double> expert_return;
};

// Runs every seed (seeds fan out over spec.threads workers) and collects
// rows, curves and per-seed artifacts in seed order.
ExperimentResult run_experiment(const ExperimentSpec& spec);

struct SummaryRow {
  std::string method;
  std::string target;
  int n = 0;
  double final_return_mean = 0.0;
  double final_return_stderr = 0.0;
  std::optional<double> auc_mean, auc_stderr;
  int reached = 0;
  std::optional<double> interactions_mean, interactions_stderr;
  // Threshold crossing of the seed-mean curve.
  std::optional<std::int64_t> mean_curve_interactions;
  std::optional<double> correlation_mean, correlation_stderr;
  std::optional<double> potential_correlation_mean, potential_correlation_stderr;
};

// Per (method, target) mean and standard error across seeds. Curve-crossing
// thresholds follow the kind: a fraction of the expert return for source
// training, a fraction of the curve's own final return (mean of its last
// five points) for transfer targets.
std::vector<SummaryRow> summarize(const ExperimentResult& result, double threshold_fraction = 0.9);

// Threshold rule used for the rows and summary of a given target.
std::optional<std::int64_t> own_final_crossing(const TrainingCurve& curve, double fraction);

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

struct RunArtifact {
  std::string dir;
  nlohmann::json manifest;
};

// Writes manifest.json, results.csv, summary.csv, curves/ and the per-seed
// files of a finished run into dir.
RunArtifact write_artifact(const std::string& dir, const ExperimentSpec& spec, const ExperimentResult& result,
                           double wall_clock_seconds, const std::string& error = "");

// Loads the spec (seeds / threads overridable), runs it and writes the
// artifact directory (spec "out" unless out_dir is given). An invalid spec
// throws SpecError before anything is written; a failing seed leaves the
// completed seeds' files plus a manifest with status "error", then throws.
RunArtifact cli_run(const std::string& spec_path, const std::string& out_dir = "",
                    const std::optional<std::vector<std::uint64_t>>& seeds = std::nullopt,
                    std::optional<int> threads = std::nullopt);

// True when the manifest's hash matches its embedded spec.
bool verify_manifest(const nlohmann::json& manifest);

// Reloads the rows and curves of an artifact directory.
ExperimentResult load_artifact(const std::string& dir);

// Pools artifacts of one kind and summarizes them together. Mixed kinds are
// rejected.
std::vector<SummaryRow> summarize_artifacts(const std::vector<std::string>& dirs,
                                            double threshold_fraction = 0.9);

}  // namespace evil

#endif  // EVIL_EXPERIMENT_H_
