#include "evil/experiment.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "evil/env_config.h"
#include "evil/evaluate.h"
#include "evil/evolve.h"
#include "evil/parallel.h"
#include "evil/serialize.h"
#include "evil/shaping.h"
#include "evil/solvers.h"
#include "evil/stats.h"
#include "evil/wrappers.h"

#ifndef EVIL_VERSION_STRING
#define EVIL_VERSION_STRING "0.0.0-unknown"
#endif

namespace fs = std::filesystem;

namespace evil {
namespace {

// Independent random streams of one experiment seed.
enum class Purpose : std::uint64_t {
  kDemos = 1,
  kIrl = 2,
  kEs = 3,
  kRetrain = 4,
  kBc = 5,
  kVariants = 6,
  kVisits = 7,
  kExpert = 8,
  kEval = 9,
  kCritic = 10,
};

const std::map<std::string, std::vector<std::string>>& kind_methods() {
  static const std::map<std::string, std::vector<std::string>> m = {
      {"rl-shaping", {"unshaped", "evolved", "vstar"}},
      {"irl-retrain", {"irl++", "vanilla"}},
      {"evil-retrain", {"irl++", "evil", "ve_shaping"}},
      {"transfer-tremble", {"evil", "irl++", "bc"}},
      {"transfer-dynamics", {"evil", "irl++", "bc"}},
      {"gridworld-heatmap", {"evolved"}},
      {"ablation", {}},
  };
  return m;
}

std::vector<AblationVariant> default_ablation() {
  return {{"irl++", nlohmann::json::object()},
          {"no_buffer", {{"buffer_capacity", -1}}},
          {"no_ensemble", {{"ensemble_size", 1}}},
          {"no_resets", {{"reset_p0", 0.0}}},
          {"l2", {{"l2_coeff", 0.01}}},
          {"vanilla", {{"vanilla", true}}}};
}

template <typename F>
auto sub_config(const std::string& field, F&& parse) {
  try {
    return parse();
  } catch (const SpecError&) {
    throw;
  } catch (const std::exception& e) {
    throw SpecError(field, e.what());
  }
}

PgConfig parse_pg(const nlohmann::json& j, const std::string& field, const PgConfig& fallback) {
  if (!j.contains(field)) return fallback;
  return sub_config(field, [&] {
    nlohmann::json merged = fallback.to_json();
    merged.merge_patch(j.at(field));
    return PgConfig::from_json(merged);
  });
}

BcConfig parse_bc(const nlohmann::json& j) {
  BcConfig c;
  c.epochs = j.value("epochs", c.epochs);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  if (j.contains("hidden")) c.hidden = j.at("hidden").get<std::vector<int>>();
  const std::string cls = j.value("policy_class", "auto");
  if (cls == "auto") {
    c.policy_class = PolicyClass::kAuto;
  } else if (cls == "tabular") {
    c.policy_class = PolicyClass::kTabular;
  } else if (cls == "mlp") {
    c.policy_class = PolicyClass::kMlp;
  } else {
    throw std::invalid_argument("policy_class must be auto, tabular or mlp");
  }
  if (c.epochs < 1 || !(c.learning_rate > 0.0)) throw std::invalid_argument("epochs and learning_rate must be positive");
  return c;
}

nlohmann::json bc_to_json(const BcConfig& c) {
  const char* cls = c.policy_class == PolicyClass::kTabular ? "tabular"
                    : c.policy_class == PolicyClass::kMlp   ? "mlp"
                                                            : "auto";
  return {{"policy_class", cls}, {"epochs", c.epochs}, {"learning_rate", c.learning_rate}, {"hidden", c.hidden}};
}

IrlConfig apply_overrides(const IrlConfig& base, const nlohmann::json& overrides) {
  nlohmann::json patch = overrides;
  bool vanilla = false;
  if (patch.contains("vanilla")) {
    vanilla = patch.at("vanilla").get<bool>();
    patch.erase("vanilla");
  }
  // buffer_capacity -1 means "latest batch only".
  bool latest_batch = false;
  if (patch.contains("buffer_capacity") && patch.at("buffer_capacity").is_number_integer() &&
      patch.at("buffer_capacity").get<long>() < 0) {
    latest_batch = true;
    patch.erase("buffer_capacity");
  }
  nlohmann::json merged = base.to_json();
  merged.merge_patch(patch);
  IrlConfig c = IrlConfig::from_json(merged);
  if (latest_batch) c.buffer_capacity = static_cast<std::size_t>(c.inner.batch_trajectories);
  return vanilla ? c.vanilla() : c;
}

ResultRow make_row(std::string method, std::string target, std::uint64_t seed, double final_return) {
  ResultRow r;
  r.method = std::move(method);
  r.target = std::move(target);
  r.seed = seed;
  r.final_return = final_return;
  return r;
}

struct SeedOutput {
  std::vector<ResultRow> rows;
  std::vector<CurveRecord> curves;
  std::map<std::string, std::string> files;
  double expert_return = 0.0;
};

std::string curve_path(const std::string& method, const std::string& target, std::uint64_t seed) {
  return "curves/" + method + "__" + target + "__seed" + std::to_string(seed) + ".csv";
}

std::string seed_suffix(std::uint64_t seed) { return "_seed" + std::to_string(seed) + ""; }

class SeedRun {
 public:
  SeedRun(const ExperimentSpec& spec, EnvPtr env, std::uint64_t seed)
      : spec_(spec), env_(std::move(env)), seed_(seed), truth_(std::make_shared<GroundTruthReward>()) {
    if (const TabularMdp* mdp = env_->tabular()) vi_ = value_iteration(*mdp);
  }

  SeedOutput run() {
    const std::string& kind = spec_.kind;
    make_expert();
    out_.expert_return = expert_return_;
    add_row(make_row("expert", "source", seed_, expert_return_));
    if (kind == "rl-shaping") {
      rl_shaping();
    } else if (kind == "gridworld-heatmap") {
      heatmap();
    } else if (kind == "irl-retrain") {
      irl_retrain(methods(), {});
    } else if (kind == "ablation") {
      std::vector<std::string> names;
      for (const auto& v : spec_.ablation) names.push_back(v.name);
      irl_retrain(names, spec_.ablation);
    } else if (kind == "evil-retrain") {
      evil_retrain();
    } else if (kind == "transfer-tremble" || kind == "transfer-dynamics") {
      transfer();
    } else {
      throw SpecError("kind", "unrecognized experiment kind '" + kind + "'");
    }
    return std::move(out_);
  }

 private:
  std::uint64_t key(Purpose p) const { return derive_seed(seed_, {tag(Stream::kExperiment), static_cast<std::uint64_t>(p)}); }

  std::vector<std::string> methods() const {
    return spec_.methods.empty() ? kind_methods().at(spec_.kind) : spec_.methods;
  }
  bool wants(const std::string& m) const {
    const auto ms = methods();
    return std::find(ms.begin(), ms.end(), m) != ms.end();
  }

  void add_row(ResultRow row) { out_.rows.push_back(std::move(row)); }

  double final_return(const Policy& policy, const Environment& env) const {
    if (env.tabular() && policy.action_space().discrete) return evaluate_exact(policy, env);
    return evaluate(policy, env, *truth_, spec_.eval_episodes, key(Purpose::kEval));
  }

  void make_expert() {
    if (vi_) {
      expert_ = std::make_unique<DeterministicTablePolicy>(vi_->stationary_policy());
    } else {
      expert_ = pg_train(*env_, *truth_, spec_.expert_pg, key(Purpose::kExpert)).policy;
    }
    expert_return_ = final_return(*expert_, *env_);
  }

  const std::vector<Trajectory>& demos() {
    if (demos_.empty()) demos_ = rollouts(*env_, *expert_, *truth_, spec_.expert_demos, key(Purpose::kDemos));
    return demos_;
  }

  struct Retrained {
    PolicyPtr policy;
    TrainingCurve curve;
    double final_return = 0.0;
  };

  // Fresh policy on reward in env; the curve tracks ground-truth returns.
  Retrained retrain(const Environment& env, const RewardSource& reward, std::uint64_t target_key) const {
    PgResult r = pg_train(env, reward, spec_.retrain, derive_seed(key(Purpose::kRetrain), {target_key}), nullptr,
                          truth_.get());
    Retrained out;
    out.final_return = final_return(*r.policy, env);
    out.policy = std::move(r.policy);
    out.curve = std::move(r.curve);
    return out;
  }

  void record_source(const std::string& method, Retrained& r, std::optional<double> reward_corr = std::nullopt,
                     std::optional<double> potential_corr = std::nullopt) {
    ResultRow row = make_row(method, "source", seed_, r.final_return);
    row.auc = auc(r.curve);
    row.interactions_to_threshold = interactions_to_threshold(r.curve, spec_.threshold_fraction * expert_return_);
    row.reward_correlation = reward_corr;
    row.potential_correlation = potential_corr;
    add_row(row);
    add_curve(method, "source", std::move(r.curve));
  }

  void add_curve(const std::string& method, const std::string& target, TrainingCurve curve) {
    std::ostringstream os;
    write_curve_csv(os, curve, seed_);
    out_.files[curve_path(method, target, seed_)] = os.str();
    out_.curves.push_back({method, target, seed_, std::move(curve)});
  }

  std::optional<double> vstar_correlation(const Potential& potential) const {
    if (!vi_) return std::nullopt;
    const Eigen::VectorXd phi = potential_table(potential, *env_);
    const Eigen::VectorXd& v = vi_->potential();
    try {
      return pearson(std::vector<double>(phi.data(), phi.data() + phi.size()),
                     std::vector<double>(v.data(), v.data() + v.size()));
    } catch (const std::invalid_argument&) {
      return std::nullopt;  // constant potential
    }
  }

  EvolveResult evolve(RewardPtr base, const std::string& name) {
    EvolveResult r = evolve_shaping(std::move(base), *env_, spec_.es, key(Purpose::kEs));
    out_.files["potentials/" + name + seed_suffix(seed_) + ".json"] = r.potential->to_json().dump(2) + "\n";
    std::ostringstream os;
    write_fitness_csv(os, r.state.fitness_history);
    out_.files["fitness/" + name + seed_suffix(seed_) + ".csv"] = os.str();
    return r;
  }

  void write_grid(const std::string& path, const Eigen::VectorXd& values) {
    const auto cfg = env_->config();
    if (!cfg.contains("width") || !cfg.contains("height")) return;
    std::ostringstream os;
    write_grid_csv(os, values, cfg.at("width").get<int>(), cfg.at("height").get<int>());
    out_.files[path] = os.str();
  }

  void rl_shaping() {
    if (wants("unshaped")) {
      auto r = retrain(*env_, *truth_, 0);
      record_source("unshaped", r);
    }
    if (wants("evolved")) {
      EvolveResult ev = evolve(truth_, "evolved");
      PotentialPtr phi = std::move(ev.potential);
      auto r = retrain(*env_, ShapedReward(truth_, phi), 0);
      record_source("evolved", r, std::nullopt, vstar_correlation(*phi));
    }
    if (wants("vstar")) {
      if (!vi_) throw SpecError("methods", "vstar shaping needs a tabular environment");
      PotentialPtr phi = std::make_shared<TabularPotential>(vi_->potential());
      auto r = retrain(*env_, ShapedReward(truth_, phi), 0);
      record_source("vstar", r, std::nullopt, 1.0);
    }
  }

  void heatmap() {
    if (!vi_) throw SpecError("env", "gridworld-heatmap needs a tabular environment");
    EvolveResult ev = evolve(truth_, "evolved");
    const Eigen::VectorXd phi = potential_table(*ev.potential, *env_);
    write_grid("heatmaps/evolved" + seed_suffix(seed_) + ".csv", phi);
    write_grid("heatmaps/vstar.csv", vi_->potential());
    ResultRow row = make_row("evolved", "source", seed_, 0.0);
    row.potential_correlation = vstar_correlation(*ev.potential);
    // Greedy one-step planning on the evolved potential, exactly evaluated.
    if (const TabularMdp* mdp = env_->tabular(); mdp && mdp->deterministic()) {
      row.final_return = evaluate_exact(greedy_under_shaping(*mdp, *ev.potential), *env_);
    }
    add_row(row);
  }

  IrlResult irl(const IrlConfig& config, const std::string& name) {
    IrlResult r = run_irl(*env_, demos(), config, key(Purpose::kIrl));
    nlohmann::json members = nlohmann::json::array();
    for (int k = 0; k < r.ensemble->size(); ++k) members.push_back(r.ensemble->member(k).to_json());
    out_.files["rewards/" + name + seed_suffix(seed_) + ".json"] =
        nlohmann::json{{"literal_sign", config.literal_sign}, {"members", members}}.dump(2) + "\n";
    std::ostringstream os;
    write_diagnostics_csv(os, r.diagnostics);
    out_.files["diagnostics/" + name + seed_suffix(seed_) + ".csv"] = os.str();
    if (vi_) {
      Eigen::VectorXd table(env_->num_states());
      for (int s = 0; s < env_->num_states(); ++s) table[s] = r.reward->value(*env_, from_index(s));
      write_grid("heatmaps/reward_" + name + seed_suffix(seed_) + ".csv", table);
    }
    return r;
  }

  // Pearson correlation of r_hat vs ground truth over the IRL learners' own
  // state visits.
  std::optional<double> learner_correlation(const IrlResult& r) const {
    std::vector<Trajectory> visits;
    for (std::size_t k = 0; k < r.policies.size(); ++k) {
      auto v = rollouts(*env_, *r.policies[k], *truth_, 10, derive_seed(key(Purpose::kVisits), {k}));
      visits.insert(visits.end(), v.begin(), v.end());
    }
    try {
      return reward_correlation(*r.reward, *truth_, *env_, visits);
    } catch (const std::invalid_argument&) {
      return std::nullopt;
    }
  }

  void irl_retrain(const std::vector<std::string>& names, const std::vector<AblationVariant>& variants) {
    for (std::size_t i = 0; i < names.size(); ++i) {
      IrlConfig config = spec_.irl;
      if (!variants.empty()) {
        config = apply_overrides(spec_.irl, variants[i].overrides);
      } else if (names[i] == "vanilla") {
        config = spec_.irl.vanilla();
      }
      IrlResult r = irl(config, names[i]);
      const auto corr = learner_correlation(r);
      auto rt = retrain(*env_, *freeze_reward(r.reward, *env_), 0);
      record_source(names[i], rt, corr);
    }
  }

  void evil_retrain() {
    IrlResult r = irl(spec_.irl, "irl++");
    RewardPtr r_hat = freeze_reward(r.reward, *env_);
    const auto corr = learner_correlation(r);
    if (wants("irl++")) {
      auto rt = retrain(*env_, *r_hat, 0);
      record_source("irl++", rt, corr);
    }
    if (wants("evil")) {
      EvolveResult ev = evolve(r_hat, "evil");
      PotentialPtr phi = std::move(ev.potential);
      auto rt = retrain(*env_, ShapedReward(r_hat, phi), 0);
      record_source("evil", rt, corr, vstar_correlation(*phi));
    }
    if (wants("ve_shaping")) {
      // Critic of an RL expert trained on the true reward.
      PgResult expert = pg_train(*env_, *truth_, spec_.expert_pg, key(Purpose::kCritic));
      PotentialPtr phi = std::make_shared<CriticPotential>(std::shared_ptr<const Critic>(std::move(expert.critic)));
      auto rt = retrain(*env_, ShapedReward(r_hat, phi), 0);
      record_source("ve_shaping", rt, corr);
    }
  }

  void transfer() {
    const bool tremble = spec_.kind == "transfer-tremble";
    std::vector<EnvPtr> targets;
    if (tremble) {
      targets.push_back(std::make_shared<TrembleWrapper>(env_, spec_.tremble_p));
    } else {
      for (int v = 0; v < spec_.dynamics_variants; ++v) {
        targets.push_back(sample_dynamics_variant(env_, spec_.dynamics_magnitude,
                                                  derive_seed(key(Purpose::kVariants), {static_cast<std::uint64_t>(v)}))
                              .env);
      }
    }
    const std::string aggregate = tremble ? "tremble" : "dynamics";

    RewardPtr r_hat;
    PotentialPtr phi;
    if (wants("irl++") || wants("evil")) {
      IrlResult r = irl(spec_.irl, "irl++");
      r_hat = freeze_reward(r.reward, *env_);
      if (wants("evil")) phi = std::shared_ptr<Potential>(evolve(r_hat, "evil").potential);
    }
    PolicyPtr bc;
    if (wants("bc")) {
      bc = behavioural_cloning(demos(), *env_, spec_.bc, key(Purpose::kBc));
      add_row(make_row("bc", "source", seed_, final_return(*bc, *env_)));
    }

    for (const std::string& method : methods()) {
      std::vector<double> finals, aucs;
      std::vector<TrainingCurve> curves;
      for (std::size_t t = 0; t < targets.size(); ++t) {
        const Environment& target = *targets[t];
        const std::string name = tremble ? aggregate : "variant" + std::to_string(t);
        ResultRow row = make_row(method, name, seed_, 0.0);
        if (method == "bc") {
          row.final_return = final_return(*bc, target);
        } else {
          std::unique_ptr<RewardSource> shaped;
          if (method == "evil") shaped = std::make_unique<ShapedReward>(r_hat, phi);
          auto rt = retrain(target, shaped ? *shaped : *r_hat, t + 1);
          row.final_return = rt.final_return;
          row.auc = auc(rt.curve);
          row.interactions_to_threshold = own_final_crossing(rt.curve, spec_.threshold_fraction);
          aucs.push_back(*row.auc);
          curves.push_back(std::move(rt.curve));
        }
        finals.push_back(row.final_return);
        add_row(row);
      }
      if (!tremble) {
        ResultRow row = make_row(method, aggregate, seed_, mean(finals));
        if (!curves.empty()) {
          TrainingCurve m = mean_curve_by_update(curves);
          row.auc = mean(aucs);
          row.interactions_to_threshold = own_final_crossing(m, spec_.threshold_fraction);
          add_curve(method, aggregate, std::move(m));
        }
        add_row(row);
      } else if (!curves.empty()) {
        add_curve(method, aggregate, std::move(curves.front()));
      }
    }
  }

  const ExperimentSpec& spec_;
  EnvPtr env_;
  std::uint64_t seed_;
  std::shared_ptr<GroundTruthReward> truth_;
  std::optional<ValueIterationResult> vi_;
  PolicyPtr expert_;
  double expert_return_ = 0.0;
  std::vector<Trajectory> demos_;
  SeedOutput out_;
};

std::string opt_str(const std::optional<double>& v) {
  if (!v) return "";
  std::ostringstream os;
  os.precision(17);
  os << *v;
  return os.str();
}

std::string opt_str(const std::optional<std::int64_t>& v) { return v ? std::to_string(*v) : ""; }

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::optional<double> parse_opt_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::stod(s);
}

void write_text(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << content;
}

}  // namespace

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds = {"rl-shaping",       "irl-retrain",       "evil-retrain",
                                                 "transfer-tremble", "transfer-dynamics", "gridworld-heatmap",
                                                 "ablation"};
  return kinds;
}

ExperimentSpec ExperimentSpec::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SpecError("<root>", "spec must be a JSON object");
  static const std::set<std::string> known = {
      "kind",       "env",        "seeds",      "threads",           "retrain",          "es",
      "irl",        "bc",         "expert_demos", "expert_pg",       "tremble_p",        "dynamics_variants",
      "dynamics_magnitude", "threshold_fraction", "eval_episodes", "methods", "ablation", "out"};
  for (const auto& [k, v] : j.items()) {
    if (!known.count(k)) throw SpecError(k, "unknown field");
  }
  ExperimentSpec s;
  if (!j.contains("kind") || !j.at("kind").is_string()) throw SpecError("kind", "missing or not a string");
  s.kind = j.at("kind").get<std::string>();
  const auto& kinds = experiment_kinds();
  if (std::find(kinds.begin(), kinds.end(), s.kind) == kinds.end()) {
    throw SpecError("kind", "unrecognized experiment kind '" + s.kind + "'");
  }
  if (!j.contains("seeds") || !j.at("seeds").is_array() || j.at("seeds").empty()) {
    throw SpecError("seeds", "must be a non-empty list of non-negative integers");
  }
  std::set<std::uint64_t> seen;
  for (const auto& v : j.at("seeds")) {
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      throw SpecError("seeds", "must be a non-empty list of non-negative integers");
    }
    const auto seed = v.get<std::uint64_t>();
    if (!seen.insert(seed).second) throw SpecError("seeds", "duplicate seed " + std::to_string(seed));
    s.seeds.push_back(seed);
  }
  if (j.contains("env")) {
    s.env = j.at("env");
    sub_config("env", [&] { return make_environment(s.env); });
  }
  auto get_int = [&](const char* field, int fallback, int min) {
    if (!j.contains(field)) return fallback;
    if (!j.at(field).is_number_integer() || j.at(field).get<long long>() < min) {
      throw SpecError(field, "must be an integer >= " + std::to_string(min));
    }
    return j.at(field).get<int>();
  };
  auto get_double = [&](const char* field, double fallback, double lo, double hi) {
    if (!j.contains(field)) return fallback;
    if (!j.at(field).is_number() || j.at(field).get<double>() < lo || j.at(field).get<double>() > hi) {
      throw SpecError(field, "must be a number in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return j.at(field).get<double>();
  };
  s.threads = get_int("threads", s.threads, 0);
  s.expert_demos = get_int("expert_demos", s.expert_demos, 1);
  s.dynamics_variants = get_int("dynamics_variants", s.dynamics_variants, 1);
  s.eval_episodes = get_int("eval_episodes", s.eval_episodes, 1);
  s.tremble_p = get_double("tremble_p", s.tremble_p, 0.0, 1.0);
  s.dynamics_magnitude = get_double("dynamics_magnitude", s.dynamics_magnitude, 0.0, 1.0);
  s.threshold_fraction = get_double("threshold_fraction", s.threshold_fraction, 0.0, 1.0);
  s.retrain = parse_pg(j, "retrain", s.retrain);
  s.expert_pg = parse_pg(j, "expert_pg", s.expert_pg);
  if (j.contains("es")) {
    s.es = sub_config("es", [&] {
      nlohmann::json merged = s.es.to_json();
      merged.merge_patch(j.at("es"));
      return EsConfig::from_json(merged);
    });
  }
  if (j.contains("irl")) {
    s.irl = sub_config("irl", [&] {
      nlohmann::json merged = s.irl.to_json();
      merged.merge_patch(j.at("irl"));
      return IrlConfig::from_json(merged);
    });
  }
  if (j.contains("bc")) s.bc = sub_config("bc", [&] { return parse_bc(j.at("bc")); });
  if (j.contains("methods")) {
    if (!j.at("methods").is_array()) throw SpecError("methods", "must be a list of method names");
    const auto& allowed = kind_methods().at(s.kind);
    for (const auto& m : j.at("methods")) {
      const auto name = m.get<std::string>();
      if (std::find(allowed.begin(), allowed.end(), name) == allowed.end()) {
        throw SpecError("methods", "method '" + name + "' is not available for kind " + s.kind);
      }
      s.methods.push_back(name);
    }
  }
  if (j.contains("ablation")) {
    if (s.kind != "ablation") throw SpecError("ablation", "only valid for kind ablation");
    if (!j.at("ablation").is_array() || j.at("ablation").empty()) {
      throw SpecError("ablation", "must be a non-empty list of {name, overrides}");
    }
    std::set<std::string> names;
    for (const auto& v : j.at("ablation")) {
      AblationVariant a{v.value("name", ""), v.value("overrides", nlohmann::json::object())};
      if (a.name.empty() || !names.insert(a.name).second) throw SpecError("ablation", "variant names must be unique and non-empty");
      s.ablation.push_back(std::move(a));
    }
  } else if (s.kind == "ablation") {
    s.ablation = default_ablation();
  }
  for (const auto& a : s.ablation) sub_config("ablation", [&] { return apply_overrides(s.irl, a.overrides); });
  if (j.contains("out")) {
    if (!j.at("out").is_string()) throw SpecError("out", "must be a directory path");
    s.out = j.at("out").get<std::string>();
  }
  return s;
}

ExperimentSpec ExperimentSpec::load(const std::string& path) {
  nlohmann::json j;
  try {
    j = load_json(path);
  } catch (const std::exception& e) {
    throw SpecError("<file>", e.what());
  }
  return from_json(j);
}

nlohmann::json ExperimentSpec::to_json() const {
  nlohmann::json ablation_json = nlohmann::json::array();
  for (const auto& a : ablation) ablation_json.push_back({{"name", a.name}, {"overrides", a.overrides}});
  nlohmann::json j = {{"kind", kind},
                      {"env", env},
                      {"seeds", seeds},
                      {"threads", threads},
                      {"retrain", retrain.to_json()},
                      {"es", es.to_json()},
                      {"irl", irl.to_json()},
                      {"bc", bc_to_json(bc)},
                      {"expert_demos", expert_demos},
                      {"expert_pg", expert_pg.to_json()},
                      {"tremble_p", tremble_p},
                      {"dynamics_variants", dynamics_variants},
                      {"dynamics_magnitude", dynamics_magnitude},
                      {"threshold_fraction", threshold_fraction},
                      {"eval_episodes", eval_episodes},
                      {"methods", methods}};
  if (kind == "ablation") j["ablation"] = ablation_json;
  if (!out.empty()) j["out"] = out;
  return j;
}

std::string config_hash(const nlohmann::json& spec) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : spec.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string version_string() { return EVIL_VERSION_STRING; }

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  EnvPtr env = make_environment(spec.env);
  std::vector<SeedOutput> outputs(spec.seeds.size());
  parallel_for(static_cast<int>(spec.seeds.size()), spec.threads, [&](int i) {
    outputs[i] = SeedRun(spec, env, spec.seeds[i]).run();
  });
  ExperimentResult result;
  result.kind = spec.kind;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    auto& o = outputs[i];
    result.expert_return[spec.seeds[i]] = o.expert_return;
    std::move(o.rows.begin(), o.rows.end(), std::back_inserter(result.rows));
    std::move(o.curves.begin(), o.curves.end(), std::back_inserter(result.curves));
    result.files.merge(o.files);
  }
  return result;
}

std::optional<std::int64_t> own_final_crossing(const TrainingCurve& curve, double fraction) {
  if (curve.empty()) return std::nullopt;
  const auto& pts = curve.points();
  const std::size_t k = std::min<std::size_t>(5, pts.size());
  double final_value = 0.0;
  for (std::size_t i = pts.size() - k; i < pts.size(); ++i) final_value += pts[i].performance;
  final_value /= static_cast<double>(k);
  return interactions_to_threshold(curve, final_value - (1.0 - fraction) * std::abs(final_value));
}

std::vector<SummaryRow> summarize(const ExperimentResult& result, double threshold_fraction) {
  std::vector<std::pair<std::string, std::string>> order;
  std::map<std::pair<std::string, std::string>, std::vector<const ResultRow*>> groups;
  for (const auto& r : result.rows) {
    auto key = std::make_pair(r.method, r.target);
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(&r);
  }
  std::vector<double> experts;
  for (const auto& [seed, v] : result.expert_return) experts.push_back(v);

  std::vector<SummaryRow> out;
  for (const auto& key : order) {
    const auto& rows = groups[key];
    SummaryRow s;
    s.method = key.first;
    s.target = key.second;
    s.n = static_cast<int>(rows.size());
    std::vector<double> finals, aucs, ts, corrs, pcorrs;
    for (const ResultRow* r : rows) {
      finals.push_back(r->final_return);
      if (r->auc) aucs.push_back(*r->auc);
      if (r->interactions_to_threshold) ts.push_back(static_cast<double>(*r->interactions_to_threshold));
      if (r->reward_correlation) corrs.push_back(*r->reward_correlation);
      if (r->potential_correlation) pcorrs.push_back(*r->potential_correlation);
    }
    s.final_return_mean = mean(finals);
    s.final_return_stderr = standard_error(finals);
    if (!aucs.empty()) {
      s.auc_mean = mean(aucs);
      s.auc_stderr = standard_error(aucs);
    }
    s.reached = static_cast<int>(ts.size());
    if (!ts.empty()) {
      s.interactions_mean = mean(ts);
      s.interactions_stderr = standard_error(ts);
    }
    if (!corrs.empty()) {
      s.correlation_mean = mean(corrs);
      s.correlation_stderr = standard_error(corrs);
    }
    if (!pcorrs.empty()) {
      s.potential_correlation_mean = mean(pcorrs);
      s.potential_correlation_stderr = standard_error(pcorrs);
    }
    std::vector<TrainingCurve> curves;
    for (const auto& c : result.curves) {
      if (c.method == s.method && c.target == s.target) curves.push_back(c.curve);
    }
    if (!curves.empty()) {
      const TrainingCurve m = mean_curve_by_update(curves);
      if (s.target == "source") {
        if (!experts.empty()) s.mean_curve_interactions = interactions_to_threshold(m, threshold_fraction * mean(experts));
      } else {
        s.mean_curve_interactions = own_final_crossing(m, threshold_fraction);
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  const auto old = out.precision(17);
  out << "method,target,seed,final_return,auc,interactions_to_threshold,reward_correlation,potential_correlation\n";
  for (const auto& r : rows) {
    out << r.method << ',' << r.target << ',' << r.seed << ',' << r.final_return << ',' << opt_str(r.auc) << ','
        << opt_str(r.interactions_to_threshold) << ',' << opt_str(r.reward_correlation) << ','
        << opt_str(r.potential_correlation) << '\n';
  }
  out.precision(old);
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  const auto old = out.precision(17);
  out << "method,target,n,single_seed,final_return_mean,final_return_stderr,auc_mean,auc_stderr,"
         "threshold_reached,interactions_mean,interactions_stderr,mean_curve_interactions,"
         "reward_correlation_mean,reward_correlation_stderr,potential_correlation_mean,"
         "potential_correlation_stderr\n";
  for (const auto& s : rows) {
    out << s.method << ',' << s.target << ',' << s.n << ',' << (s.n == 1 ? 1 : 0) << ',' << s.final_return_mean
        << ',' << s.final_return_stderr << ',' << opt_str(s.auc_mean) << ',' << opt_str(s.auc_stderr) << ','
        << s.reached << ',' << opt_str(s.interactions_mean) << ',' << opt_str(s.interactions_stderr) << ','
        << opt_str(s.mean_curve_interactions) << ',' << opt_str(s.correlation_mean) << ','
        << opt_str(s.correlation_stderr) << ',' << opt_str(s.potential_correlation_mean) << ','
        << opt_str(s.potential_correlation_stderr) << '\n';
  }
  out.precision(old);
}

RunArtifact write_artifact(const std::string& dir, const ExperimentSpec& spec, const ExperimentResult& result,
                           double wall_clock_seconds, const std::string& error) {
  const fs::path root(dir);
  fs::create_directories(root);
  std::vector<std::string> files;
  for (const auto& [path, content] : result.files) {
    write_text(root / path, content);
    files.push_back(path);
  }
  std::ostringstream results;
  write_results_csv(results, result.rows);
  write_text(root / "results.csv", results.str());
  files.push_back("results.csv");
  if (!result.rows.empty()) {
    std::ostringstream summary;
    write_summary_csv(summary, summarize(result, spec.threshold_fraction));
    write_text(root / "summary.csv", summary.str());
    files.push_back("summary.csv");
  }
  const nlohmann::json spec_json = spec.to_json();
  nlohmann::json manifest = {{"kind", spec.kind},
                             {"config_hash", config_hash(spec_json)},
                             {"seeds", spec.seeds},
                             {"version", version_string()},
                             {"wall_clock_seconds", wall_clock_seconds},
                             {"status", error.empty() ? "ok" : "error"},
                             {"files", files},
                             {"spec", spec_json}};
  if (!error.empty()) manifest["error"] = error;
  write_text(root / "manifest.json", manifest.dump(2) + "\n");
  return {dir, manifest};
}

RunArtifact cli_run(const std::string& spec_path, const std::string& out_dir,
                    const std::optional<std::vector<std::uint64_t>>& seeds, std::optional<int> threads) {
  nlohmann::json j;
  try {
    j = load_json(spec_path);
  } catch (const std::exception& e) {
    throw SpecError("<file>", e.what());
  }
  if (seeds) j["seeds"] = *seeds;
  if (threads) j["threads"] = *threads;
  ExperimentSpec spec = ExperimentSpec::from_json(j);
  if (!out_dir.empty()) spec.out = out_dir;
  if (spec.out.empty()) throw SpecError("out", "no output directory (set \"out\" or pass --out)");

  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
  EnvPtr env = make_environment(spec.env);
  std::vector<std::optional<SeedOutput>> outputs(spec.seeds.size());
  std::vector<std::string> errors(spec.seeds.size());
  parallel_for(static_cast<int>(spec.seeds.size()), spec.threads, [&](int i) {
    try {
      outputs[i] = SeedRun(spec, env, spec.seeds[i]).run();
    } catch (const std::exception& e) {
      errors[i] = "seed " + std::to_string(spec.seeds[i]) + ": " + e.what();
    }
  });
  ExperimentResult result;
  result.kind = spec.kind;
  std::string error;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    if (!errors[i].empty() && error.empty()) error = errors[i];
    if (!outputs[i]) continue;
    result.expert_return[spec.seeds[i]] = outputs[i]->expert_return;
    for (auto& r : outputs[i]->rows) result.rows.push_back(std::move(r));
    for (auto& c : outputs[i]->curves) result.curves.push_back(std::move(c));
    result.files.merge(outputs[i]->files);
  }
  RunArtifact artifact = write_artifact(spec.out, spec, result, elapsed(), error);
  if (!error.empty()) throw std::runtime_error("run failed (partial artifacts in " + spec.out + "): " + error);
  return artifact;
}

bool verify_manifest(const nlohmann::json& manifest) {
  if (!manifest.contains("spec") || !manifest.contains("config_hash")) return false;
  return config_hash(manifest.at("spec")) == manifest.at("config_hash").get<std::string>();
}

ExperimentResult load_artifact(const std::string& dir) {
  const fs::path root(dir);
  const nlohmann::json manifest = load_json((root / "manifest.json").string());
  if (!verify_manifest(manifest)) throw std::runtime_error(dir + ": manifest hash does not match its spec");
  ExperimentResult result;
  result.kind = manifest.at("kind").get<std::string>();

  std::ifstream rf(root / "results.csv");
  if (!rf) throw std::runtime_error(dir + ": missing results.csv");
  std::string line;
  std::getline(rf, line);
  while (std::getline(rf, line)) {
    if (line.empty()) continue;
    const auto c = split(line, ',');
    if (c.size() != 8) throw std::runtime_error(dir + ": malformed results.csv line: " + line);
    ResultRow r;
    r.method = c[0];
    r.target = c[1];
    r.seed = std::stoull(c[2]);
    r.final_return = std::stod(c[3]);
    r.auc = parse_opt_double(c[4]);
    if (!c[5].empty()) r.interactions_to_threshold = std::stoll(c[5]);
    r.reward_correlation = parse_opt_double(c[6]);
    r.potential_correlation = parse_opt_double(c[7]);
    if (r.method == "expert") result.expert_return[r.seed] = r.final_return;
    result.rows.push_back(std::move(r));
  }

  if (fs::exists(root / "curves")) {
    std::vector<fs::path> paths;
    for (const auto& e : fs::directory_iterator(root / "curves")) paths.push_back(e.path());
    std::sort(paths.begin(), paths.end());
    for (const auto& p : paths) {
      const auto parts = [&] {
        std::vector<std::string> out;
        std::string stem = p.stem().string();
        for (std::size_t pos; (pos = stem.find("__")) != std::string::npos; stem = stem.substr(pos + 2)) {
          out.push_back(stem.substr(0, pos));
        }
        out.push_back(stem);
        return out;
      }();
      if (parts.size() != 3 || parts[2].rfind("seed", 0) != 0) continue;
      CurveRecord rec{parts[0], parts[1], std::stoull(parts[2].substr(4)), {}};
      std::ifstream cf(p);
      std::getline(cf, line);
      bool named = false;
      while (std::getline(cf, line)) {
        if (line.empty()) continue;
        const auto c = split(line, ',');
        if (c.size() != 4) throw std::runtime_error(p.string() + ": malformed curve line");
        if (!named) {
          rec.curve = TrainingCurve(c[2]);
          named = true;
        }
        rec.curve.append(std::stoll(c[0]), std::stod(c[1]));
      }
      result.curves.push_back(std::move(rec));
    }
  }
  return result;
}

std::vector<SummaryRow> summarize_artifacts(const std::vector<std::string>& dirs, double threshold_fraction) {
  if (dirs.empty()) throw std::invalid_argument("summarize: no artifacts");
  ExperimentResult pooled;
  for (const auto& d : dirs) {
    ExperimentResult r = load_artifact(d);
    if (pooled.kind.empty()) {
      pooled.kind = r.kind;
    } else if (pooled.kind != r.kind) {
      throw std::invalid_argument("summarize: mixed experiment kinds (" + pooled.kind + " vs " + r.kind + ")");
    }
    for (auto& row : r.rows) pooled.rows.push_back(std::move(row));
    for (auto& c : r.curves) pooled.curves.push_back(std::move(c));
    for (const auto& [seed, v] : r.expert_return) pooled.expert_return[seed] = v;
  }
  return summarize(pooled, threshold_fraction);
}

}  // namespace evil
