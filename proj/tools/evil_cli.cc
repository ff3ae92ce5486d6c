#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evil/env_config.h"
#include "evil/experiment.h"
#include "evil/potential.h"
#include "evil/serialize.h"
#include "evil/shaping.h"
#include "evil/solvers.h"

namespace {

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto dash = item.find('-');
    if (dash != std::string::npos && dash > 0) {
      const auto lo = std::stoull(item.substr(0, dash));
      const auto hi = std::stoull(item.substr(dash + 1));
      for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    } else {
      seeds.push_back(std::stoull(item));
    }
  }
  return seeds;
}

int export_heatmap(const std::string& spec_path, const std::string& potential_path, bool vstar,
                   const std::string& out_path) {
  const nlohmann::json spec = evil::load_json(spec_path);
  const nlohmann::json env_json = spec.contains("env") ? spec.at("env") : spec;
  const auto env = evil::make_environment(env_json);
  const auto cfg = env->config();
  if (!env->tabular() || !cfg.contains("width")) {
    std::cerr << "export-heatmap: needs a gridworld environment\n";
    return 2;
  }
  Eigen::VectorXd values;
  if (vstar) {
    values = evil::value_iteration(*env->tabular()).potential();
  } else {
    values = evil::potential_table(*evil::potential_from_json(evil::load_json(potential_path)), *env);
  }
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) {
      std::cerr << "export-heatmap: cannot write " << out_path << "\n";
      return 1;
    }
    out = &file;
  }
  evil::write_grid_csv(*out, values, cfg.at("width").get<int>(), cfg.at("height").get<int>());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evolved potential-based shaping and IRL++ experiments"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run an experiment spec and write its artifact directory");
  std::string spec_path, out_dir, seeds_text;
  int threads = -1;
  run->add_option("--spec", spec_path, "Experiment spec (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Artifact directory (overrides the spec's \"out\")");
  run->add_option("--seeds", seeds_text, "Seeds, e.g. 0,1,2 or 0-4 (overrides the spec)");
  run->add_option("--threads", threads, "Worker threads (0 = all cores)");

  auto* summarize = app.add_subcommand("summarize", "Mean and standard error across artifact directories");
  std::vector<std::string> artifacts;
  std::string summary_out;
  double fraction = 0.9;
  summarize->add_option("artifacts", artifacts, "Artifact directories of one experiment kind")->required();
  summarize->add_option("--out", summary_out, "Write the table here instead of stdout");
  summarize->add_option("--threshold", fraction, "Threshold fraction for interactions-to-threshold");

  auto* heatmap = app.add_subcommand("export-heatmap", "Export a gridworld potential as a CSV grid");
  std::string heat_spec, potential_path, heat_out;
  bool vstar = false;
  heatmap->add_option("--spec", heat_spec, "Experiment spec or environment config")->required()->check(CLI::ExistingFile);
  heatmap->add_option("--potential", potential_path, "Potential parameter file");
  heatmap->add_flag("--vstar", vstar, "Export the oracle optimal value table instead");
  heatmap->add_option("--out", heat_out, "Output CSV (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      std::optional<std::vector<std::uint64_t>> seeds;
      if (!seeds_text.empty()) seeds = parse_seeds(seeds_text);
      std::optional<int> thread_override;
      if (threads >= 0) thread_override = threads;
      const auto artifact = evil::cli_run(spec_path, out_dir, seeds, thread_override);
      std::cout << "wrote " << artifact.dir << " (" << artifact.manifest.at("kind").get<std::string>() << ", hash "
                << artifact.manifest.at("config_hash").get<std::string>() << ")\n";
      std::ifstream summary(artifact.dir + "/summary.csv");
      std::cout << summary.rdbuf();
      return 0;
    }
    if (*summarize) {
      const auto rows = evil::summarize_artifacts(artifacts, fraction);
      if (summary_out.empty()) {
        evil::write_summary_csv(std::cout, rows);
      } else {
        std::ofstream f(summary_out);
        evil::write_summary_csv(f, rows);
      }
      return 0;
    }
    if (*heatmap) {
      if (!vstar && potential_path.empty()) {
        std::cerr << "export-heatmap: pass --potential or --vstar\n";
        return 2;
      }
      return export_heatmap(heat_spec, potential_path, vstar, heat_out);
    }
  } catch (const evil::SpecError& e) {
    std::cerr << "invalid spec: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
