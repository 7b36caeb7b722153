// Experiment runner: `run <spec>` executes an experiment described by a JSON
// spec file (presets filled in, overridable with --set), `validate <spec>`
// checks it, `list-experiments` enumerates the known ids.
//
// Exit codes: 0 ok, 2 invalid spec / usage, 3 runtime failure.

#include <cstdint>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pilotopt/experiments.hpp"
#include "pilotopt/version.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitRuntime = 3;

struct CommonArgs {
  std::string spec_path;
  std::vector<std::string> sets;
  bool full_scale = false;
};

std::vector<std::pair<std::string, std::string>> parse_sets(const std::vector<std::string>& sets) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::invalid_argument("--set expects key=value, got '" + s + "'");
    out.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  return out;
}

json load_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open spec file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("spec file '" + path + "' is not valid JSON: " + e.what());
  }
  return j;
}

json errors_to_json(const std::vector<pilotopt::ExperimentError>& errors) {
  json arr = json::array();
  for (const auto& e : errors) arr.push_back({{"field", e.field}, {"message", e.message}});
  return arr;
}

int resolve_or_fail(const CommonArgs& args, pilotopt::ExperimentSpec& spec) {
  try {
    spec = pilotopt::resolve_spec(load_spec_file(args.spec_path), args.full_scale,
                                  parse_sets(args.sets));
  } catch (const std::exception& e) {
    std::cout << json{{"status", "invalid"},
                      {"errors", json::array({{{"field", "spec"}, {"message", e.what()}}})}}
                     .dump(2)
              << std::endl;
    return kExitInvalid;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pilot-distribution experiments for joint-channel phase tracking"};
  app.set_version_flag("--version", PILOTOPT_VERSION);
  app.require_subcommand(1);

  CommonArgs run_args, val_args;
  std::string out_dir;
  std::uint64_t seed = 0;
  int workers = 0;

  CLI::App* run = app.add_subcommand("run", "run an experiment spec");
  run->add_option("spec", run_args.spec_path, "JSON spec file")->required();
  run->add_option("--out", out_dir, "output directory (default: spec's output_dir)");
  run->add_option("--seed", seed, "override the spec seed");
  run->add_option("--set", run_args.sets, "override a spec value, dotted path (a.b=value)");
  run->add_flag("--full-scale", run_args.full_scale,
                "use the long-running full-scale preset as the base");
  run->add_option("--workers", workers, "worker thread count (also: PILOTOPT_WORKERS)");

  CLI::App* validate = app.add_subcommand("validate", "check a spec without running it");
  validate->add_option("spec", val_args.spec_path, "JSON spec file")->required();
  validate->add_option("--set", val_args.sets, "override a spec value (a.b=value)");
  validate->add_flag("--full-scale", val_args.full_scale, "validate against full-scale presets");

  CLI::App* list = app.add_subcommand("list-experiments", "list known experiment ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  if (list->parsed()) {
    for (const auto& id : pilotopt::experiment_ids())
      std::cout << id << " - " << pilotopt::experiment_summary(id) << '\n';
    return kExitOk;
  }

  if (validate->parsed()) {
    pilotopt::ExperimentSpec spec;
    if (const int rc = resolve_or_fail(val_args, spec); rc != kExitOk) return rc;
    const auto errors = pilotopt::validate_spec(spec);
    if (errors.empty()) {
      std::cout << json{{"status", "ok"}, {"experiment", spec.id}}.dump(2) << std::endl;
      return kExitOk;
    }
    std::cout << json{{"status", "invalid"}, {"errors", errors_to_json(errors)}}.dump(2)
              << std::endl;
    return kExitInvalid;
  }

  // run
  if (workers > 0) {
#ifdef _WIN32
    _putenv_s("PILOTOPT_WORKERS", std::to_string(workers).c_str());
#else
    setenv("PILOTOPT_WORKERS", std::to_string(workers).c_str(), 1);
#endif
  }
  pilotopt::ExperimentSpec spec;
  if (const int rc = resolve_or_fail(run_args, spec); rc != kExitOk) return rc;
  if (run->count("--seed") > 0) spec.params["seed"] = seed;

  const auto errors = pilotopt::validate_spec(spec);
  if (!errors.empty()) {
    std::cout << json{{"status", "invalid"}, {"errors", errors_to_json(errors)}}.dump(2)
              << std::endl;
    return kExitInvalid;
  }

  const std::string dir =
      !out_dir.empty() ? out_dir : spec.params.value("output_dir", "results/" + spec.id);
  try {
    const pilotopt::RunOutcome outcome = pilotopt::run_experiment(spec, dir);
    json report{{"status", "ok"},
                {"experiment", spec.id},
                {"output_dir", dir},
                {"outputs", outcome.outputs},
                {"wall_seconds", outcome.wall_seconds}};
    std::cout << report.dump(2) << std::endl;
    return kExitOk;
  } catch (const std::exception& e) {
    std::cout << json{{"status", "error"}, {"experiment", spec.id}, {"message", e.what()}}.dump(2)
              << std::endl;
    return kExitRuntime;
  }
}
