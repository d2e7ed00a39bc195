// rmt-lab: batch runner for the random-matrix experiments.
// Exit codes: 0 all rules passed, 2 some rule failed, 1 error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rmtlab/config.hpp"
#include "rmtlab/errors.hpp"
#include "rmtlab/linalg.hpp"
#include "rmtlab/stats.hpp"

namespace {

int run(const std::string& config_path, std::optional<std::uint64_t> seed, std::optional<int> threads,
        std::optional<std::string> out) {
  rmt::RunConfig cfg = rmt::load_run_config(config_path);
  if (seed) cfg.seed = *seed;
  const int nthreads = threads ? *threads : cfg.threads ? *cfg.threads : rmt::default_threads();
  if (nthreads < 1) throw rmt::ConfigInvalid("config key 'threads': must be >= 1");
  const std::filesystem::path dir = out ? *out : cfg.out ? *cfg.out : "rmt-lab-out/" + cfg.experiment;

  const rmt::ExperimentReport rep = rmt::run_experiment(cfg, nthreads);
  rmt::write_outputs(dir, cfg, rep, nthreads);

  for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
  for (const auto& r : rep.rules) std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
  std::cout << rep.id << " " << (rep.passed() ? "passed" : "failed") << " in " << rep.wall_clock_s << " s; outputs in "
            << dir.string() << "\n";
  return rep.passed() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  rmt::pin_blas_threads();
  CLI::App app{"Seeded Monte-Carlo experiments on Wigner-type random matrices"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out;
  auto* run_cmd = app.add_subcommand("run", "Run the experiment described by a config file");
  run_cmd->add_option("--config", config_path, "Run config (JSON)")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--seed", seed, "Override the master seed");
  run_cmd->add_option("--threads", threads, "Worker threads (default: config, then RMT_LAB_THREADS, then 1)");
  run_cmd->add_option("--out", out, "Output directory");

  auto* list_cmd = app.add_subcommand("list-experiments", "Print the experiment registry");

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate-config", "Check a config against the schema");
  validate_cmd->add_option("--config", validate_path, "Run config (JSON)")->required()->check(CLI::ExistingFile);

  std::string profile_json;
  auto* profile_cmd = app.add_subcommand("profile-info", "Print delta_-, delta_+, M, C_inf and C_sup of a profile");
  profile_cmd->add_option("spec", profile_json, "Profile spec as JSON, or @file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return run(config_path, seed, threads, out);
    if (*list_cmd) {
      for (const auto& n : rmt::experiment_names()) std::cout << n << "\n";
      return 0;
    }
    if (*validate_cmd) {
      const rmt::RunConfig cfg = rmt::load_run_config(validate_path);
      std::cout << "valid " << cfg.experiment << " config, seed " << cfg.seed << "\n";
      return 0;
    }
    if (*profile_cmd) {
      nlohmann::json spec;
      if (!profile_json.empty() && profile_json[0] == '@') {
        std::ifstream in(profile_json.substr(1));
        if (!in) throw rmt::IoError("cannot open " + profile_json.substr(1));
        spec = nlohmann::json::parse(in);
      } else {
        spec = nlohmann::json::parse(profile_json);
      }
      std::cout << rmt::profile_info(rmt::profile_from_spec(spec)).dump(2) << "\n";
      return 0;
    }
  } catch (const rmt::Error& e) {
    std::cerr << "error: " << e.kind() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
