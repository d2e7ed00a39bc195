#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rmtlab/entrylaws.hpp"
#include "rmtlab/experiments.hpp"
#include "rmtlab/profiles.hpp"

namespace rmt {

inline constexpr const char* kVersion = "0.1.0";

struct RunConfig {
  std::string experiment;
  std::uint64_t seed = 0;
  std::optional<int> threads;
  std::optional<std::string> out;
  nlohmann::json body;  // the parsed document, experiment keys included
};

// Checks the document against the run-config schema.  Throws ConfigInvalid
// whose message starts with the offending key.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

const std::vector<std::string>& experiment_names();

// Law spec: {"kind": ..., "params": {...}} with the EntryLaw kinds plus
// "matching" {m3, m4} and "matched_gaussian_divisible" {m3, m4, gamma}.
EntryLaw law_from_spec(const nlohmann::json& j, const std::string& key = "law");
VarianceProfile profile_from_spec(const nlohmann::json& j, const std::string& key = "profile");

ExperimentReport run_experiment(const RunConfig& cfg, int threads);

// FNV-1a of the canonical (sorted-key, compact) dump.
std::string config_hash(const nlohmann::json& j);

nlohmann::json make_manifest(const RunConfig& cfg, const ExperimentReport& rep, int threads);
// Writes report.json, cells.csv and manifest.json into dir.
void write_outputs(const std::filesystem::path& dir, const RunConfig& cfg, const ExperimentReport& rep, int threads);

nlohmann::json profile_info(const VarianceProfile& p);

}  // namespace rmt
