#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "spec.hpp"

namespace rowsim::app {

struct RunOptions {
  unsigned threads = 1;
  bool strict_jedec = false;
};

struct Artifact {
  std::string name;
  std::string content;
};

struct RunOutput {
  /// CSVs, in a fixed order.
  std::vector<Artifact> files;
  nlohmann::json summary;
  nlohmann::json metadata;

  const Artifact* file(const std::string& name) const;
};

/// Runs the experiment entirely in memory. Output depends only on the experiment spec (never on threads).
RunOutput run_experiment(const ExperimentSpec& spec, const RunOptions& opts = {});

/// ROWSIM_OUT when set, else the experiment spec's output_dir.
std::filesystem::path resolve_output_dir(const ExperimentSpec& spec);

/// Writes every artifact plus metadata.json and summary.json into `dir` (created if needed).
void write_outputs(const RunOutput& out, const std::filesystem::path& dir);

/// Profile named by the experiment spec, with any mitigation_eval rescaling applied.
device::DeviceProfile experiment_profile(const ExperimentSpec& spec);

}  // namespace rowsim::app
