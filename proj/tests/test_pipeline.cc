#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <gtest/gtest.h>

#include "evil/experiment.h"
#include "evil/serialize.h"
#include "evil/stats.h"
#include "tiny_specs.h"

namespace evil {
namespace {

namespace fs = std::filesystem;
using testing::tiny_spec;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::path(::testing::TempDir()) / ("evil_pipeline_" + name);
  fs::remove_all(p);
  return p;
}

std::string write_spec(const std::string& name, const nlohmann::json& spec) {
  const fs::path p = scratch(name + "_spec");
  fs::create_directories(p);
  const fs::path file = p / "spec.json";
  std::ofstream(file) << spec.dump(2);
  return file.string();
}

std::map<std::string, std::string> read_tree(const fs::path& root, const std::string& sub) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root / sub)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    out[fs::relative(e.path(), root).string()] = os.str();
  }
  return out;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void expect_spec_error(const nlohmann::json& j, const std::string& field) {
  try {
    ExperimentSpec::from_json(j);
    FAIL() << "expected a SpecError for " << field;
  } catch (const SpecError& e) {
    EXPECT_EQ(e.field(), field) << e.what();
  }
}

TEST(Spec, EmptySeedsRejectedWithoutArtifacts) {
  nlohmann::json j = tiny_spec("rl-shaping");
  j["seeds"] = nlohmann::json::array();
  const fs::path out = scratch("empty_seeds");
  const std::string path = write_spec("empty_seeds", j);
  try {
    cli_run(path, out.string());
    FAIL() << "expected a SpecError";
  } catch (const SpecError& e) {
    EXPECT_EQ(e.field(), "seeds");
  }
  EXPECT_FALSE(fs::exists(out));
}

TEST(Spec, ErrorsNameTheField) {
  nlohmann::json j = tiny_spec("rl-shaping");
  j["kind"] = "fig7";
  expect_spec_error(j, "kind");
  j = tiny_spec("rl-shaping");
  j["colour"] = "blue";
  expect_spec_error(j, "colour");
  j = tiny_spec("rl-shaping");
  j["es"]["population_size"] = 3;
  expect_spec_error(j, "es");
  j = tiny_spec("rl-shaping");
  j["seeds"] = {1, 1};
  expect_spec_error(j, "seeds");
  j = tiny_spec("rl-shaping");
  j["methods"] = {"bc"};
  expect_spec_error(j, "methods");
  j = tiny_spec("irl-retrain");
  j["env"]["width"] = 0;
  expect_spec_error(j, "env");
  j = tiny_spec("rl-shaping");
  j["ablation"] = {{{"name", "x"}}};
  expect_spec_error(j, "ablation");
}

TEST(Spec, JsonRoundTripAndStableHash) {
  const ExperimentSpec s = ExperimentSpec::from_json(tiny_spec("transfer-tremble"));
  const ExperimentSpec t = ExperimentSpec::from_json(s.to_json());
  EXPECT_EQ(s.to_json(), t.to_json());
  EXPECT_EQ(config_hash(s.to_json()), config_hash(t.to_json()));
  EXPECT_EQ(config_hash(s.to_json()).size(), 16u);
  nlohmann::json other = s.to_json();
  other["tremble_p"] = 0.1;
  EXPECT_NE(config_hash(other), config_hash(s.to_json()));
}

TEST(Spec, AblationDefaultsToEveryToggle) {
  const ExperimentSpec s = ExperimentSpec::from_json(tiny_spec("ablation"));
  std::vector<std::string> names;
  for (const auto& a : s.ablation) names.push_back(a.name);
  EXPECT_EQ(names, (std::vector<std::string>{"irl++", "no_buffer", "no_ensemble", "no_resets", "l2", "vanilla"}));
}

TEST(Run, RlShapingProducesRowsCurvesAndPotentials) {
  const ExperimentResult r = run_experiment(ExperimentSpec::from_json(tiny_spec("rl-shaping")));
  std::map<std::string, int> counts;
  for (const auto& row : r.rows) ++counts[row.method];
  EXPECT_EQ(counts["expert"], 2);
  EXPECT_EQ(counts["unshaped"], 2);
  EXPECT_EQ(counts["evolved"], 2);
  EXPECT_EQ(counts["vstar"], 2);
  EXPECT_EQ(r.curves.size(), 6u);
  EXPECT_TRUE(r.files.count("curves/evolved__source__seed1.csv"));
  EXPECT_TRUE(r.files.count("potentials/evolved_seed0.json"));
  EXPECT_TRUE(r.files.count("fitness/evolved_seed0.csv"));
  // 3x3 grid, horizon 8: the goal is 4 steps from the start
  EXPECT_NEAR(r.expert_return.at(0), 4 * -0.01 + 4 * 1.0, 1e-12);
}

TEST(Run, HeatmapWritesEvolvedAndVStarGrids) {
  nlohmann::json j = tiny_spec("gridworld-heatmap");
  j["seeds"] = {0};
  const ExperimentResult r = run_experiment(ExperimentSpec::from_json(j));
  for (const std::string name : {"heatmaps/evolved_seed0.csv", "heatmaps/vstar.csv"}) {
    ASSERT_TRUE(r.files.count(name)) << name;
    std::istringstream in(r.files.at(name));
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "row,x0,x1,x2");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 3);
  }
}

TEST(Run, AblationTabulatesEveryVariant) {
  nlohmann::json j = tiny_spec("ablation");
  j["seeds"] = {0};
  const ExperimentResult r = run_experiment(ExperimentSpec::from_json(j));
  std::set<std::string> methods;
  for (const auto& row : r.rows) {
    if (row.method == "expert") continue;
    methods.insert(row.method);
    EXPECT_TRUE(row.reward_correlation.has_value()) << row.method;
  }
  EXPECT_EQ(methods.size(), 6u);
  std::ostringstream os;
  write_summary_csv(os, summarize(r));
  EXPECT_NE(os.str().find("no_resets"), std::string::npos);
}

TEST(Run, EveryKindRunsAtTinyBudget) {
  for (const std::string kind : {"irl-retrain", "evil-retrain", "transfer-tremble", "transfer-dynamics"}) {
    nlohmann::json j = tiny_spec(kind);
    j["seeds"] = {3};
    const ExperimentResult r = run_experiment(ExperimentSpec::from_json(j));
    EXPECT_GT(r.rows.size(), 1u) << kind;
    for (const auto& row : r.rows) EXPECT_TRUE(std::isfinite(row.final_return)) << kind << " " << row.method;
  }
}

TEST(Run, TransferDynamicsHasPerVariantAndAggregateRows) {
  nlohmann::json j = tiny_spec("transfer-dynamics");
  j["seeds"] = {0};
  j["methods"] = {"bc"};
  const ExperimentResult r = run_experiment(ExperimentSpec::from_json(j));
  std::set<std::string> targets;
  for (const auto& row : r.rows) {
    if (row.method == "bc") targets.insert(row.target);
  }
  EXPECT_EQ(targets, (std::set<std::string>{"source", "dynamics", "variant0", "variant1"}));
}

TEST(Run, ThreadCountDoesNotChangeResults) {
  nlohmann::json j = tiny_spec("evil-retrain");
  j["threads"] = 1;
  const ExperimentResult a = run_experiment(ExperimentSpec::from_json(j));
  j["threads"] = 2;
  const ExperimentResult b = run_experiment(ExperimentSpec::from_json(j));
  std::ostringstream ra, rb;
  write_results_csv(ra, a.rows);
  write_results_csv(rb, b.rows);
  EXPECT_EQ(ra.str(), rb.str());
  EXPECT_EQ(a.files, b.files);
}

TEST(CliRun, RerunReproducesByteIdenticalCurves) {
  const std::string path = write_spec("rerun", tiny_spec("transfer-tremble"));
  const fs::path a = scratch("rerun_a");
  const fs::path b = scratch("rerun_b");
  cli_run(path, a.string());
  cli_run(path, b.string());
  const auto ca = read_tree(a, "curves");
  EXPECT_FALSE(ca.empty());
  EXPECT_EQ(ca, read_tree(b, "curves"));
  EXPECT_EQ(read_file(a / "results.csv"), read_file(b / "results.csv"));
}

TEST(CliRun, ManifestVerifiesAndDetectsTampering) {
  const std::string path = write_spec("manifest", tiny_spec("irl-retrain"));
  const fs::path out = scratch("manifest_out");
  const RunArtifact art = cli_run(path, out.string(), std::vector<std::uint64_t>{5}, 1);
  const nlohmann::json m = load_json((out / "manifest.json").string());
  EXPECT_TRUE(verify_manifest(m));
  EXPECT_EQ(m.at("status"), "ok");
  EXPECT_EQ(m.at("seeds"), nlohmann::json({5}));
  EXPECT_EQ(m.at("version").get<std::string>(), version_string());
  for (const auto& f : m.at("files")) EXPECT_TRUE(fs::exists(out / f.get<std::string>())) << f;
  nlohmann::json tampered = m;
  tampered["spec"]["tremble_p"] = 0.5;
  EXPECT_FALSE(verify_manifest(tampered));
}

TEST(CliRun, MidRunFailureLeavesErrorManifest) {
  nlohmann::json j = tiny_spec("rl-shaping");
  j["env"] = {{"kind", "point_mass"}, {"horizon", 5}};
  j["methods"] = {"vstar"};
  j["expert_pg"]["updates"] = 1;
  const std::string path = write_spec("failure", j);
  const fs::path out = scratch("failure_out");
  EXPECT_THROW(cli_run(path, out.string()), std::runtime_error);
  const nlohmann::json m = load_json((out / "manifest.json").string());
  EXPECT_EQ(m.at("status"), "error");
  EXPECT_NE(m.at("error").get<std::string>().find("vstar"), std::string::npos);
  EXPECT_TRUE(verify_manifest(m));
}

TEST(Artifacts, LoadRoundTripsRowsAndCurves) {
  const std::string path = write_spec("load", tiny_spec("rl-shaping"));
  const fs::path out = scratch("load_out");
  cli_run(path, out.string());
  const ExperimentResult r = load_artifact(out.string());
  const ExperimentResult direct = run_experiment(ExperimentSpec::from_json(tiny_spec("rl-shaping")));
  EXPECT_EQ(r.kind, "rl-shaping");
  EXPECT_EQ(r.rows.size(), direct.rows.size());
  EXPECT_EQ(r.curves.size(), direct.curves.size());
  std::ostringstream a, b;
  write_summary_csv(a, summarize(r));
  write_summary_csv(b, summarize(direct));
  EXPECT_EQ(a.str(), b.str());
}

TEST(Artifacts, MixedKindsRejected) {
  const fs::path a = scratch("mixed_a");
  const fs::path b = scratch("mixed_b");
  nlohmann::json ja = tiny_spec("irl-retrain");
  ja["seeds"] = {0};
  nlohmann::json jb = tiny_spec("rl-shaping");
  jb["seeds"] = {0};
  cli_run(write_spec("mixed_a", ja), a.string());
  cli_run(write_spec("mixed_b", jb), b.string());
  EXPECT_THROW(summarize_artifacts({a.string(), b.string()}), std::invalid_argument);
  EXPECT_NO_THROW(summarize_artifacts({a.string()}));
}

TEST(Summarize, SingleSeedHasZeroStandardError) {
  ExperimentResult r;
  r.kind = "irl-retrain";
  r.expert_return[0] = 10.0;
  ResultRow row;
  row.method = "irl++";
  row.seed = 0;
  row.final_return = 7.0;
  r.rows.push_back(row);
  const auto s = summarize(r);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].n, 1);
  EXPECT_EQ(s[0].final_return_stderr, 0.0);
  std::ostringstream os;
  write_summary_csv(os, s);
  EXPECT_NE(os.str().find("single_seed"), std::string::npos);
}

TEST(Summarize, IdenticalSeedsHaveExactlyZeroStandardError) {
  ExperimentResult r;
  r.kind = "rl-shaping";
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    r.expert_return[seed] = 1.0;
    ResultRow row;
    row.method = "unshaped";
    row.seed = seed;
    row.final_return = 0.1 + 0.2;
    row.auc = 3.3;
    row.interactions_to_threshold = 400;
    r.rows.push_back(row);
  }
  const auto s = summarize(r);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].final_return_stderr, 0.0);
  EXPECT_EQ(*s[0].auc_stderr, 0.0);
  EXPECT_EQ(*s[0].interactions_stderr, 0.0);
  EXPECT_EQ(s[0].reached, 5);
}

TEST(Summarize, OwnFinalCrossingUsesMeanOfLastFivePoints) {
  TrainingCurve c;
  const double perf[] = {0.0, 5.0, 9.5, 10.0, 10.0, 10.0, 10.0, 10.0};
  for (int i = 0; i < 8; ++i) c.append(100 * (i + 1), perf[i]);
  EXPECT_EQ(own_final_crossing(c, 0.9), 300);
  EXPECT_EQ(own_final_crossing(c, 0.99), 400);
}

TEST(Stats, MeanAndStandardError) {
  EXPECT_DOUBLE_EQ(mean({1.0, 2.0, 3.0}), 2.0);
  EXPECT_DOUBLE_EQ(standard_error({1.0, 2.0, 3.0}), 1.0 / std::sqrt(3.0));
  EXPECT_EQ(standard_error({4.0}), 0.0);
  EXPECT_THROW(mean({}), std::invalid_argument);
}

}  // namespace
}  // namespace evil
