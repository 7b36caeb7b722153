#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pilotopt/csv.hpp"
#include "pilotopt/experiments.hpp"

using namespace pilotopt;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_CASE("floats render with twelve significant digits") {
  CHECK(format_double(0.25, 12) == "0.25");
  CHECK(format_double(1.0, 12) == "1");
  CHECK(format_double(1.0 / 3.0, 12) == "0.333333333333");
  CHECK(format_double(-2.5e-7, 12) == "-2.5e-07");
}

TEST_CASE("the experiment catalogue is stable") {
  const auto& ids = experiment_ids();
  CHECK(ids.size() == 7);
  for (const char* id : {"mse-vs-alpha", "mse-heuristics", "mse-grid", "mse-reduction",
                         "air-sweep", "air-gain", "optimize"}) {
    CHECK(std::find(ids.begin(), ids.end(), id) != ids.end());
    CHECK(experiment_summary(id) != nullptr);
  }
  CHECK_THROWS_AS(experiment_preset("nope", false), std::invalid_argument);
}

TEST_CASE("every preset validates at both scales") {
  for (const std::string& id : experiment_ids()) {
    for (bool full : {false, true}) {
      const ExperimentSpec spec = resolve_spec(json{{"experiment", id}}, full, {});
      const auto errs = validate_spec(spec);
      std::string msg;
      for (const auto& e : errs) msg += e.field + ": " + e.message + "; ";
      INFO(id << (full ? " full" : " desk") << " -> " << msg);
      CHECK(errs.empty());
    }
  }
}

TEST_CASE("spec files overlay presets and overrides parse as JSON") {
  const json file = {{"experiment", "mse-grid"},
                     {"seed", 99},
                     {"config", {{"block_length", 50}}}};
  const ExperimentSpec spec = resolve_spec(
      file, false,
      {{"config.snr_db", "17.5"},
       {"grids.alpha", "[0, 1]"},
       {"distributions", R"(["s1","s4"])"},
       {"output_dir", "custom/dir"}});
  CHECK(spec.id == "mse-grid");
  CHECK(spec.params["seed"] == 99);
  CHECK(spec.params["config"]["block_length"] == 50);
  CHECK(spec.params["config"]["num_channels"] == 4);  // preset survives the merge
  CHECK(spec.params["config"]["snr_db"] == 17.5);
  CHECK(spec.params["grids"]["alpha"] == json({0, 1}));
  CHECK(spec.params["distributions"] == json({"s1", "s4"}));
  CHECK(spec.params["output_dir"] == "custom/dir");  // non-JSON stays a string

  CHECK_THROWS_AS(resolve_spec(json::array(), false, {}), std::invalid_argument);
  CHECK_THROWS_AS(resolve_spec(json{{"experiment", "nope"}}, false, {}),
                  std::invalid_argument);
}

TEST_CASE("validation pinpoints the broken field") {
  ExperimentSpec spec = resolve_spec(json{{"experiment", "mse-grid"}}, false, {});
  spec.params["config"]["block_length"] = 0;
  auto errs = validate_spec(spec);
  REQUIRE(!errs.empty());
  CHECK(errs.front().field == "config");

  spec = resolve_spec(json{{"experiment", "mse-grid"}}, false, {});
  spec.params["grids"]["alpha"] = json::array({-0.5});
  errs = validate_spec(spec);
  REQUIRE(!errs.empty());
  CHECK(errs.front().field == "grids.alpha");

  spec = resolve_spec(json{{"experiment", "mse-grid"}}, false, {});
  spec.params["distributions"].push_back("bogus");
  CHECK(!validate_spec(spec).empty());

  spec = resolve_spec(json{{"experiment", "mse-grid"}}, false, {});
  spec.params["seed"] = -4;
  errs = validate_spec(spec);
  REQUIRE(!errs.empty());
  CHECK(errs.front().field == "seed");

  spec = resolve_spec(json{{"experiment", "air-sweep"}}, false, {});
  spec.params["format"] = 128;
  CHECK(!validate_spec(spec).empty());
}

TEST_CASE("a small grid experiment runs, reruns identically, and logs a manifest") {
  const json file = {{"experiment", "mse-grid"}, {"seed", 5}};
  const ExperimentSpec spec = resolve_spec(
      file, false,
      {{"config.block_length", "20"},
       {"grids.snr_db", "[10, 20]"},
       {"grids.alpha", "[0, 1]"},
       {"distributions", R"(["s1","s4","u-rnd"])"},
       {"pilot_rate", "0.1"}});
  REQUIRE(validate_spec(spec).empty());

  const fs::path base = fs::path("test_runs") / "mse_grid_a";
  fs::remove_all(base);
  const RunOutcome out = run_experiment(spec, base);
  REQUIRE(!out.outputs.empty());

  const fs::path csv = base / "mse_grid.csv";
  REQUIRE(fs::exists(csv));
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "alpha,snr_db,distribution,kappa,J");
  int rows = 0;
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) ++rows;
  CHECK(rows == 2 * 2 * 3);

  const json manifest = json::parse(slurp(base / "run_manifest.json"));
  CHECK(manifest["experiment"] == "mse-grid");
  CHECK(manifest["status"] == "ok");
  CHECK(manifest["seed"] == 5);
  CHECK(manifest["params"]["pilot_rate"] == 0.1);

  // Byte-identical rerun.
  const fs::path again = fs::path("test_runs") / "mse_grid_b";
  fs::remove_all(again);
  run_experiment(spec, again);
  CHECK(slurp(again / "mse_grid.csv") == slurp(csv));

  CHECK_THROWS_AS(
      run_experiment(resolve_spec(file, false, {{"config.block_length", "0"}}),
                     fs::path("test_runs") / "broken"),
      std::invalid_argument);
}

TEST_CASE("the optimize experiment persists both optimization targets") {
  const json file = {{"experiment", "optimize"}, {"seed", 6}};
  const ExperimentSpec spec = resolve_spec(
      file, false,
      {{"config.block_length", "12"},
       {"num_pilots", "4"},
       {"pilots_per_channel", "2"},
       {"ga.population_size", "16"},
       {"ga.generations", "10"}});
  REQUIRE(validate_spec(spec).empty());
  const fs::path dir = fs::path("test_runs") / "optimize";
  fs::remove_all(dir);
  run_experiment(spec, dir);
  const json ju = json::parse(slurp(dir / "optimize_unstructured.json"));
  const json js = json::parse(slurp(dir / "optimize_structured.json"));
  CHECK(ju["best_distribution"]["type"] == "unstructured");
  CHECK(js["best_distribution"]["type"] == "structured");
  CHECK(ju["best_J"].get<double>() > 0.0);
}
