#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace pilotopt {

struct ExperimentError {
  std::string field;
  std::string message;
};

// A fully resolved experiment: preset defaults overlaid with the spec file
// and any command-line overrides.
struct ExperimentSpec {
  std::string id;
  nlohmann::json params;
};

const std::vector<std::string>& experiment_ids();
const char* experiment_summary(const std::string& id);

// Desk-scale defaults per experiment; full_scale switches grids and sizes to
// the long-running reference setup (N = 10000, 20 GBd, 200 kHz).
nlohmann::json experiment_preset(const std::string& id, bool full_scale);

// preset <- file <- overrides (dotted paths, values parsed as JSON when
// possible). Throws std::invalid_argument for an unknown or missing id.
ExperimentSpec resolve_spec(const nlohmann::json& file_json, bool full_scale,
                            const std::vector<std::pair<std::string, std::string>>& overrides);

// Structural and range checks; empty result means runnable.
std::vector<ExperimentError> validate_spec(const ExperimentSpec& spec);

struct RunOutcome {
  std::vector<std::string> outputs;  // file names relative to the output dir
  double wall_seconds = 0.0;
};

// Runs one experiment, writing its CSV/JSON outputs plus run_manifest.json
// into out_dir. The manifest is written even when the run throws (the
// exception is rethrown after recording it).
RunOutcome run_experiment(const ExperimentSpec& spec, const std::filesystem::path& out_dir);

}  // namespace pilotopt
