#pragma once
#include <string>
#include <utility>
#include <vector>

#include "slowfast/scenario.hpp"

namespace slowfast {

struct ExperimentConfig {
  std::string schema = "slowfast-config/1";
  std::string pipeline;            // lemma_stab | action_identity | floquet |
                                   // horseshoe_lemmas | theorem1 | orbit_find |
                                   // action_map | slow_flow | path_plan | drift_run
  std::string scenario = "synthetic";
  std::vector<double> eps;         // pipeline-dependent defaults when empty
  unsigned long seed = 1;
  std::string out_dir = "out";
  std::string params_json = "{}";  // pipeline-specific parameter block, serialized

  std::string canonical() const;   // deterministic serialization (hashed)
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

struct RunArtifacts {
  std::string out_dir;
  std::string manifest_path;
  std::vector<std::pair<std::string, std::string>> files;  // (name, role)
  bool checks_passed = true;
  std::string summary_json;  // serialized summary record
};

// Executes the configured pipeline, writes CSVs and manifest.json under
// out_dir, and reports whether all pipeline checks passed.
RunArtifacts run_experiment(const ExperimentConfig& config);

// Prints the pass/fail table; returns 0 when all checks passed, 1 otherwise.
int emit_summary(const RunArtifacts& artifacts);

// FNV-1a 64-bit hash used for the manifest's config fingerprint.
unsigned long long fnv1a(const std::string& text);

}  // namespace slowfast
