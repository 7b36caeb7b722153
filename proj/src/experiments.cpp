#include "pilotopt/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "pilotopt/air.hpp"
#include "pilotopt/covariance_smoother.hpp"
#include "pilotopt/csv.hpp"
#include "pilotopt/genetic.hpp"
#include "pilotopt/parallel.hpp"
#include "pilotopt/pilot_patterns.hpp"
#include "pilotopt/rng.hpp"
#include "pilotopt/version.hpp"

namespace pilotopt {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct IdInfo {
  const char* id;
  const char* summary;
};

constexpr IdInfo kExperiments[] = {
    {"mse-vs-alpha",
     "smoothing objective vs correlation and SNR for the pilot families (100-slot block, 20 pilots)"},
    {"mse-heuristics", "objective vs correlation for S1-S5 at a 1% pilot rate"},
    {"mse-grid", "objective vs SNR at fixed correlations for the pilot families"},
    {"mse-reduction",
     "percent objective reduction of S4 over S1 along correlation/SNR/linewidth/channel-count axes"},
    {"air-sweep", "Monte-Carlo AIR vs pilot rate for selected families"},
    {"air-gain", "best-rate AIR gain of S4 over S1 per (format, M, SNR, correlation) cell"},
    {"optimize", "genetic-algorithm search for pilot distributions, persisted as JSON"},
};

json grid_points(double lo, double hi, double step) {
  json out = json::array();
  // Half-step tolerance absorbs accumulated rounding at the top endpoint.
  for (double v = lo; v <= hi + step / 2; v += step) out.push_back(std::round(v * 1e9) / 1e9);
  return out;
}

json config_json(int M, int N, double snr_db, double alpha) {
  return json{{"num_channels", M},        {"block_length", N},
              {"snr_db", snr_db},         {"alpha", alpha},
              {"linewidth_hz", 200e3},    {"symbol_rate_baud", 20e9},
              {"symbol_energy", 1.0}};
}

json air_json(bool full_scale) {
  return json{{"num_iters", 3},
              {"min_blocks", 8},
              {"block_cap", full_scale ? 400 : 64},
              {"ci_target", full_scale ? 0.01 : 0.03},
              {"batch_size", 8},
              {"genie_phase", false}};
}

json ga_json() {
  return json{{"population_size", 200}, {"generations", 300},   {"tournament_size", 4},
              {"crossover_rate", 0.9},  {"elitism_count", 2},   {"stall_generations", 50}};
}

SystemConfig config_from(const json& c, int M, int N, double snr_db, double alpha) {
  return SystemConfig::make(M, N, snr_db, alpha, c.at("linewidth_hz").get<double>(),
                            c.at("symbol_rate_baud").get<double>(),
                            c.at("symbol_energy").get<double>());
}

SystemConfig config_from(const json& c) {
  return config_from(c, c.at("num_channels").get<int>(), c.at("block_length").get<int>(),
                     c.at("snr_db").get<double>(), c.at("alpha").get<double>());
}

GaConfig ga_from(const json& params, std::uint64_t seed) {
  GaConfig ga;
  if (params.contains("ga")) {
    const json& g = params["ga"];
    ga.population_size = g.value("population_size", ga.population_size);
    ga.generations = g.value("generations", ga.generations);
    ga.tournament_size = g.value("tournament_size", ga.tournament_size);
    ga.crossover_rate = g.value("crossover_rate", ga.crossover_rate);
    if (g.contains("mutation_rate") && !g["mutation_rate"].is_null())
      ga.mutation_rate = g["mutation_rate"].get<double>();
    ga.elitism_count = g.value("elitism_count", ga.elitism_count);
    ga.stall_generations = g.value("stall_generations", ga.stall_generations);
  }
  ga.rng_seed = seed;
  return ga;
}

AirOptions air_from(const json& params) {
  AirOptions opt;
  if (!params.contains("air")) return opt;
  const json& a = params["air"];
  opt.num_iters = a.value("num_iters", opt.num_iters);
  opt.min_blocks = a.value("min_blocks", opt.min_blocks);
  opt.block_cap = a.value("block_cap", opt.block_cap);
  opt.ci_target = a.value("ci_target", opt.ci_target);
  opt.batch_size = a.value("batch_size", opt.batch_size);
  opt.genie_phase = a.value("genie_phase", opt.genie_phase);
  return opt;
}

int kappa_from(const json& params, int block_length) {
  if (params.contains("pilots_per_channel")) return params.at("pilots_per_channel").get<int>();
  const double rate = params.at("pilot_rate").get<double>();
  return std::max(1, static_cast<int>(std::llround(rate * block_length)));
}

// J for one named distribution; "u-opt"/"s-opt" run the GA with the given
// per-point seed, "u-rnd" draws with it.
double family_objective(const std::string& name, const SystemConfig& cfg, int kappa,
                        const json& params, std::uint64_t seed) {
  if (name == "u-opt")
    return optimize_unstructured(cfg, kappa * cfg.num_channels, ga_from(params, seed))
        .best_objective;
  if (name == "s-opt")
    return optimize_structured(cfg, kappa, ga_from(params, seed)).best_objective;
  const auto fam = family_from_name(name);
  if (!fam) throw std::invalid_argument("unknown distribution '" + name + "'");
  const PilotMask mask =
      build_family_mask(*fam, kappa, cfg.num_channels, cfg.block_length, seed);
  return smoother_objective(mask, cfg);
}

std::ofstream open_output(const fs::path& dir, const std::string& name,
                          std::vector<std::string>& outputs) {
  std::ofstream out(dir / name, std::ios::binary);  // binary: byte-identical reruns
  if (!out) throw std::runtime_error("cannot open output file " + (dir / name).string());
  outputs.push_back(name);
  return out;
}

std::string fmt(double v) { return format_double(v, 12); }

// ---- runners ----

void run_mse_vs_alpha(const json& p, const fs::path& dir, std::vector<std::string>& outputs) {
  const json& c = p.at("config");
  const int M = c.at("num_channels").get<int>();
  const int N = c.at("block_length").get<int>();
  const int kappa = kappa_from(p, N);
  const std::vector<double> alphas = p.at("grids").at("alpha").get<std::vector<double>>();
  const std::vector<double> snrs = p.at("grids").at("snr_db").get<std::vector<double>>();
  const std::vector<std::string> dists = p.at("distributions").get<std::vector<std::string>>();
  const std::uint64_t seed = p.at("seed").get<std::uint64_t>();

  const int n_points = static_cast<int>(alphas.size() * snrs.size() * dists.size());
  std::vector<double> J(n_points);
  parallel_for(n_points, [&](int idx) {
    const int d = idx % static_cast<int>(dists.size());
    const int s = (idx / static_cast<int>(dists.size())) % static_cast<int>(snrs.size());
    const int a = idx / static_cast<int>(dists.size() * snrs.size());
    const SystemConfig cfg = config_from(c, M, N, snrs[s], alphas[a]);
    J[idx] = family_objective(dists[d], cfg, kappa, p, derive_seed(seed, idx));
  });

  auto out = open_output(dir, "mse_vs_alpha.csv", outputs);
  out << "alpha,snr_db,distribution,J\n";
  int idx = 0;
  for (double a : alphas)
    for (double s : snrs)
      for (const auto& d : dists)
        out << fmt(a) << ',' << fmt(s) << ',' << d << ',' << fmt(J[idx++]) << '\n';
}

void run_mse_heuristics(const json& p, const fs::path& dir, std::vector<std::string>& outputs) {
  const json& c = p.at("config");
  const int M = c.at("num_channels").get<int>();
  const int N = c.at("block_length").get<int>();
  const int kappa = kappa_from(p, N);
  const double snr = c.at("snr_db").get<double>();
  const std::vector<double> alphas = p.at("grids").at("alpha").get<std::vector<double>>();
  const std::vector<std::string> dists = p.at("distributions").get<std::vector<std::string>>();
  const std::uint64_t seed = p.at("seed").get<std::uint64_t>();

  const int n_points = static_cast<int>(alphas.size() * dists.size());
  std::vector<double> J(n_points);
  parallel_for(n_points, [&](int idx) {
    const int d = idx % static_cast<int>(dists.size());
    const int a = idx / static_cast<int>(dists.size());
    const SystemConfig cfg = config_from(c, M, N, snr, alphas[a]);
    J[idx] = family_objective(dists[d], cfg, kappa, p, derive_seed(seed, idx));
  });

  auto out = open_output(dir, "mse_heuristics.csv", outputs);
  out << "alpha,distribution,kappa,J\n";
  int idx = 0;
  for (double a : alphas)
    for (const auto& d : dists)
      out << fmt(a) << ',' << d << ',' << kappa << ',' << fmt(J[idx++]) << '\n';
}

void run_mse_grid(const json& p, const fs::path& dir, std::vector<std::string>& outputs) {
  const json& c = p.at("config");
  const int M = c.at("num_channels").get<int>();
  const int N = c.at("block_length").get<int>();
  const int kappa = kappa_from(p, N);
  const std::vector<double> alphas = p.at("grids").at("alpha").get<std::vector<double>>();
  const std::vector<double> snrs = p.at("grids").at("snr_db").get<std::vector<double>>();
  const std::vector<std::string> dists = p.at("distributions").get<std::vector<std::string>>();
  const std::uint64_t seed = p.at("seed").get<std::uint64_t>();

  const int n_points = static_cast<int>(alphas.size() * snrs.size() * dists.size());
  std::vector<double> J(n_points);
  parallel_for(n_points, [&](int idx) {
    const int d = idx % static_cast<int>(dists.size());
    const int s = (idx / static_cast<int>(dists.size())) % static_cast<int>(snrs.size());
    const int a = idx / static_cast<int>(dists.size() * snrs.size());
    const SystemConfig cfg = config_from(c, M, N, snrs[s], alphas[a]);
    J[idx] = family_objective(dists[d], cfg, kappa, p, derive_seed(seed, idx));
  });

  auto out = open_output(dir, "mse_grid.csv", outputs);
  out << "alpha,snr_db,distribution,kappa,J\n";
  int idx = 0;
  for (double a : alphas)
    for (double s : snrs)
      for (const auto& d : dists)
        out << fmt(a) << ',' << fmt(s) << ',' << d << ',' << kappa << ',' << fmt(J[idx++])
            << '\n';
}

void run_mse_reduction(const json& p, const fs::path& dir, std::vector<std::string>& outputs) {
  const json& c = p.at("config");
  const json& axes = p.at("axes");
  const double pilot_rate = p.at("pilot_rate").get<double>();
  const int N = c.at("block_length").get<int>();

  struct Point {
    std::string axis;
    int M;
    double alpha, snr, linewidth;
  };
  std::vector<Point> pts;
  const char* axis_order[] = {"alpha", "snr_db", "linewidth_hz", "num_channels"};
  for (const char* axis : axis_order) {
    for (const json& v : axes.at(axis)) {
      Point pt{axis, c.at("num_channels").get<int>(), c.at("alpha").get<double>(),
               c.at("snr_db").get<double>(), c.at("linewidth_hz").get<double>()};
      if (axis == std::string("alpha")) pt.alpha = v.get<double>();
      if (axis == std::string("snr_db")) pt.snr = v.get<double>();
      if (axis == std::string("linewidth_hz")) pt.linewidth = v.get<double>();
      if (axis == std::string("num_channels")) pt.M = v.get<int>();
      pts.push_back(pt);
    }
  }

  const int kappa = std::max(1, static_cast<int>(std::llround(pilot_rate * N)));
  std::vector<double> j_s1(pts.size()), j_s4(pts.size());
  parallel_for(static_cast<int>(pts.size()), [&](int i) {
    const Point& pt = pts[i];
    SystemConfig cfg = SystemConfig::make(pt.M, N, pt.snr, pt.alpha, pt.linewidth,
                                          c.at("symbol_rate_baud").get<double>(),
                                          c.at("symbol_energy").get<double>());
    j_s1[i] = smoother_objective(build_family_mask(PatternFamily::kS1, kappa, pt.M, N), cfg);
    j_s4[i] = smoother_objective(build_family_mask(PatternFamily::kS4, kappa, pt.M, N), cfg);
  });

  auto out = open_output(dir, "mse_reduction.csv", outputs);
  out << "axis,alpha,snr_db,linewidth_hz,num_channels,kappa,j_s1,j_s4,reduction_pct\n";
  for (size_t i = 0; i < pts.size(); ++i) {
    const Point& pt = pts[i];
    const double red = 100.0 * (1.0 - j_s4[i] / j_s1[i]);
    out << pt.axis << ',' << fmt(pt.alpha) << ',' << fmt(pt.snr) << ',' << fmt(pt.linewidth)
        << ',' << pt.M << ',' << kappa << ',' << fmt(j_s1[i]) << ',' << fmt(j_s4[i]) << ','
        << fmt(red) << '\n';
  }
}

void write_air_row(std::ostream& out, int format, int M, double snr, double alpha,
                   const std::string& dist, const AirResult& r, std::uint64_t seed) {
  out << format << ',' << M << ',' << fmt(snr) << ',' << fmt(alpha) << ',' << dist << ','
      << fmt(r.pilot_rate) << ',' << fmt(r.gmi_bits_per_symbol) << ','
      << fmt(r.air_bits_per_symbol) << ',' << fmt(r.ci_halfwidth) << ',' << r.num_blocks << ','
      << seed << '\n';
}

void run_air_sweep(const json& p, const fs::path& dir, std::vector<std::string>& outputs) {
  const json& c = p.at("config");
  const int M = c.at("num_channels").get<int>();
  const int N = c.at("block_length").get<int>();
  const int format = p.at("format").get<int>();
  const Constellation cons = make_constellation(format, c.at("symbol_energy").get<double>());
  const std::vector<double> alphas = p.at("grids").at("alpha").get<std::vector<double>>();
  const std::vector<std::string> dists = p.at("distributions").get<std::vector<std::string>>();
  const std::vector<double> rates = p.at("rate_grid").get<std::vector<double>>();
  const AirOptions opt = air_from(p);
  const std::uint64_t seed = p.at("seed").get<std::uint64_t>();
  const double snr = c.at("snr_db").get<double>();

  auto out = open_output(dir, "air_sweep.csv", outputs);
  out << "format,M,snr_db,alpha,distribution,pilot_rate,gmi,air,ci,blocks,seed\n";
  std::uint64_t combo = 0;
  for (double alpha : alphas) {
    const SystemConfig cfg = config_from(c, M, N, snr, alpha);
    for (const auto& d : dists) {
      const auto fam = family_from_name(d);
      if (!fam) throw std::invalid_argument("unknown distribution '" + d + "'");
      const std::uint64_t sweep_seed = derive_seed(seed, combo++);
      const SweepResult sweep = sweep_pilot_rate(cfg, cons, *fam, rates, opt, sweep_seed);
      for (size_t i = 0; i < sweep.grid.size(); ++i)
        write_air_row(out, format, M, snr, alpha, d, sweep.grid[i].result,
                      derive_seed(sweep_seed, i));
    }
  }
}

void run_air_gain(const json& p, const fs::path& dir, std::vector<std::string>& outputs) {
  const json& c = p.at("config");
  const int N = c.at("block_length").get<int>();
  const std::vector<json> cells = p.at("cells").get<std::vector<json>>();
  const std::vector<double> alphas = p.at("grids").at("alpha").get<std::vector<double>>();
  const std::vector<int> Ms = p.at("grids").at("num_channels").get<std::vector<int>>();
  const std::vector<double> rates = p.at("rate_grid").get<std::vector<double>>();
  const AirOptions opt = air_from(p);
  const std::uint64_t seed = p.at("seed").get<std::uint64_t>();

  auto best = open_output(dir, "air_gain.csv", outputs);
  best << "format,M,snr_db,alpha,distribution,pilot_rate,gmi,air,ci,blocks,seed\n";
  auto summary = open_output(dir, "air_gain_summary.csv", outputs);
  summary << "format,M,snr_db,alpha,rate_s1,air_s1,ci_s1,rate_s4,air_s4,ci_s4,gain\n";

  // Each family sweeps the subset of the grid it can realize at this (M, N).
  const auto legal = [N](const std::vector<double>& grid, PatternFamily fam, int M) {
    std::vector<double> out;
    for (double r : grid) {
      const int kappa = static_cast<int>(std::llround(r * N));
      if (kappa >= 1 && kappa <= max_kappa(fam, M, N)) out.push_back(r);
    }
    return out;
  };

  std::uint64_t cell_idx = 0;
  for (const json& cell : cells) {
    const int format = cell.at("format").get<int>();
    const double snr = cell.at("snr_db").get<double>();
    const Constellation cons = make_constellation(format, c.at("symbol_energy").get<double>());
    for (int M : Ms) {
      for (double alpha : alphas) {
        const SystemConfig cfg = config_from(c, M, N, snr, alpha);
        const std::uint64_t cell_seed = derive_seed(seed, cell_idx++);
        // Shared sweep seed: common randomness across the two families keeps
        // the gain estimate tight (matches air_gain_cell).
        const std::uint64_t seed_s1 = derive_seed(cell_seed, 1);
        const std::uint64_t seed_s4 = seed_s1;
        const SweepResult s1 = sweep_pilot_rate(
            cfg, cons, PatternFamily::kS1, legal(rates, PatternFamily::kS1, M), opt, seed_s1);
        const SweepResult s4 = sweep_pilot_rate(
            cfg, cons, PatternFamily::kS4, legal(rates, PatternFamily::kS4, M), opt, seed_s4);
        write_air_row(best, format, M, snr, alpha, "s1", s1.grid[s1.argmax_index].result,
                      derive_seed(seed_s1, s1.argmax_index));
        write_air_row(best, format, M, snr, alpha, "s4", s4.grid[s4.argmax_index].result,
                      derive_seed(seed_s4, s4.argmax_index));
        summary << format << ',' << M << ',' << fmt(snr) << ',' << fmt(alpha) << ','
                << fmt(s1.argmax_rate) << ',' << fmt(s1.max_air) << ','
                << fmt(s1.grid[s1.argmax_index].result.ci_halfwidth) << ','
                << fmt(s4.argmax_rate) << ',' << fmt(s4.max_air) << ','
                << fmt(s4.grid[s4.argmax_index].result.ci_halfwidth) << ','
                << fmt(s4.max_air - s1.max_air) << '\n';
      }
    }
  }
}

void run_optimize(const json& p, const fs::path& dir, std::vector<std::string>& outputs) {
  const SystemConfig cfg = config_from(p.at("config"));
  const std::vector<std::string> targets = p.at("targets").get<std::vector<std::string>>();
  const std::uint64_t seed = p.at("seed").get<std::uint64_t>();
  for (const auto& target : targets) {
    if (target == "unstructured") {
      const GaConfig ga = ga_from(p, derive_seed(seed, 1));
      const OptimizationResult res =
          optimize_unstructured(cfg, p.at("num_pilots").get<int>(), ga);
      auto out = open_output(dir, "optimize_unstructured.json", outputs);
      out << optimization_result_json(res, cfg, ga) << '\n';
    } else if (target == "structured") {
      const GaConfig ga = ga_from(p, derive_seed(seed, 2));
      const OptimizationResult res =
          optimize_structured(cfg, p.at("pilots_per_channel").get<int>(), ga);
      auto out = open_output(dir, "optimize_structured.json", outputs);
      out << optimization_result_json(res, cfg, ga) << '\n';
    } else {
      throw std::invalid_argument("unknown optimize target '" + target + "'");
    }
  }
}

}  // namespace

const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> v;
    for (const auto& e : kExperiments) v.push_back(e.id);
    return v;
  }();
  return ids;
}

const char* experiment_summary(const std::string& id) {
  for (const auto& e : kExperiments)
    if (id == e.id) return e.summary;
  return "";
}

json experiment_preset(const std::string& id, bool full_scale) {
  json p;
  p["experiment"] = id;
  p["seed"] = 20230815;
  p["output_dir"] = "results/" + id;
  if (id == "mse-vs-alpha") {
    p["config"] = config_json(4, 100, 20.0, 1.0);
    p["grids"]["alpha"] = grid_points(0.0, 1.0, full_scale ? 0.05 : 0.1);
    p["grids"]["snr_db"] = {15.0, 20.0, 25.0};
    p["distributions"] = {"s1", "s2", "s3", "s4", "s5", "u-rnd"};
    if (full_scale) p["distributions"].insert(p["distributions"].end(), {"u-opt", "s-opt"});
    p["pilots_per_channel"] = 5;
    p["ga"] = ga_json();
  } else if (id == "mse-heuristics") {
    p["config"] = config_json(4, full_scale ? 10000 : 1000, 25.0, 1.0);
    p["grids"]["alpha"] =
        full_scale ? grid_points(0.0, 1.0, 0.1) : json{0.0, 0.25, 0.5, 0.75, 1.0};
    p["distributions"] = {"s1", "s2", "s3", "s4", "s5"};
    p["pilot_rate"] = 0.01;
  } else if (id == "mse-grid") {
    p["config"] = config_json(4, full_scale ? 10000 : 1000, 20.0, 1.0);
    p["grids"]["alpha"] = {0.0, 1.0};
    p["grids"]["snr_db"] = {5.0, 10.0, 15.0, 20.0, 25.0, 30.0};
    p["distributions"] = {"s1", "s2", "s3", "s4", "s5"};
    p["pilot_rate"] = 0.01;
  } else if (id == "mse-reduction") {
    p["config"] = config_json(4, full_scale ? 10000 : 1000, 25.0, 1.0);
    p["axes"]["alpha"] = {0.0, 0.5, 0.9, 1.0};
    p["axes"]["snr_db"] = {10.0, 20.0, 25.0, 30.0};
    p["axes"]["linewidth_hz"] = {50e3, 200e3, 500e3, 1e6};
    p["axes"]["num_channels"] = {2, 4, 8, 16};
    p["pilot_rate"] = 0.01;
  } else if (id == "air-sweep") {
    p["config"] = config_json(4, full_scale ? 10000 : 1000, 25.0, 1.0);
    p["format"] = 256;
    p["grids"]["alpha"] = {0.0, 1.0};
    p["distributions"] = {"s1", "s4"};
    p["rate_grid"] = full_scale
                         ? json{0.001, 0.002, 0.005, 0.01, 0.015, 0.02, 0.03, 0.05}
                         : json{0.002, 0.005, 0.01, 0.02, 0.05};
    p["air"] = air_json(full_scale);
  } else if (id == "air-gain") {
    p["config"] = config_json(4, full_scale ? 10000 : 1000, 25.0, 1.0);
    if (full_scale) {
      p["cells"] = json::array();
      const json snr_sets = {{"64", {15.0, 20.0, 25.0}},
                             {"256", {20.0, 25.0, 30.0}},
                             {"1024", {25.0, 30.0, 35.0}}};
      for (int format : {64, 256, 1024})
        for (const json& snr : snr_sets.at(std::to_string(format)))
          p["cells"].push_back({{"format", format}, {"snr_db", snr.get<double>()}});
      p["grids"]["alpha"] = {0.0, 0.5, 1.0};
      p["grids"]["num_channels"] = {4, 40};
    } else {
      p["cells"] = json::array({{{"format", 256}, {"snr_db", 25.0}}});
      p["grids"]["alpha"] = {0.0, 1.0};
      p["grids"]["num_channels"] = {4};
    }
    p["rate_grid"] = full_scale
                         ? json{0.001, 0.002, 0.005, 0.01, 0.015, 0.02, 0.03, 0.05}
                         : json{0.002, 0.005, 0.01, 0.02, 0.05};
    p["air"] = air_json(full_scale);
  } else if (id == "optimize") {
    p["config"] = config_json(4, 100, 20.0, 1.0);
    p["targets"] = {"unstructured", "structured"};
    p["num_pilots"] = 20;
    p["pilots_per_channel"] = 5;
    p["ga"] = ga_json();
  } else {
    throw std::invalid_argument("unknown experiment id '" + id + "'");
  }
  return p;
}

namespace {

json deep_merge(json base, const json& over) {
  if (!base.is_object() || !over.is_object()) return over;
  for (const auto& [k, v] : over.items()) {
    if (base.contains(k))
      base[k] = deep_merge(base[k], v);
    else
      base[k] = v;
  }
  return base;
}

void set_dotted(json& root, const std::string& path, const json& value) {
  json* node = &root;
  size_t start = 0;
  while (true) {
    const size_t dot = path.find('.', start);
    const std::string key = path.substr(start, dot - start);
    if (key.empty()) throw std::invalid_argument("bad override path '" + path + "'");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

}  // namespace

ExperimentSpec resolve_spec(const json& file_json, bool full_scale,
                            const std::vector<std::pair<std::string, std::string>>& overrides) {
  if (!file_json.is_object() || !file_json.contains("experiment"))
    throw std::invalid_argument("spec must be an object with an 'experiment' key");
  const std::string id = file_json.at("experiment").get<std::string>();
  ExperimentSpec spec;
  spec.id = id;
  spec.params = deep_merge(experiment_preset(id, full_scale), file_json);
  for (const auto& [path, raw] : overrides) {
    json v = json::parse(raw, nullptr, false);
    if (v.is_discarded()) v = raw;  // plain string
    set_dotted(spec.params, path, v);
  }
  return spec;
}

namespace {

void check_config(const json& p, std::vector<ExperimentError>& errs) {
  if (!p.contains("config")) {
    errs.push_back({"config", "missing"});
    return;
  }
  try {
    config_from(p["config"]).validate();
  } catch (const std::exception& e) {
    errs.push_back({"config", e.what()});
  }
}

void check_grid(const json& p, const char* name, std::vector<ExperimentError>& errs,
                double lo = -std::numeric_limits<double>::infinity(),
                double hi = std::numeric_limits<double>::infinity()) {
  const std::string field = std::string("grids.") + name;
  if (!p.contains("grids") || !p["grids"].contains(name) || !p["grids"][name].is_array() ||
      p["grids"][name].empty()) {
    errs.push_back({field, "missing or empty grid"});
    return;
  }
  for (const json& v : p["grids"][name]) {
    if (!v.is_number() || v.get<double>() < lo || v.get<double>() > hi) {
      errs.push_back({field, "value out of range"});
      return;
    }
  }
}

// Every named distribution must be renderable at this kappa for (M, N).
void check_distributions(const json& p, int kappa, int M, int N,
                         std::vector<ExperimentError>& errs) {
  if (!p.contains("distributions") || !p["distributions"].is_array() ||
      p["distributions"].empty()) {
    errs.push_back({"distributions", "missing or empty"});
    return;
  }
  for (const json& dj : p["distributions"]) {
    const std::string d = dj.get<std::string>();
    if (d == "u-opt") {
      const long long L = static_cast<long long>(kappa) * M;
      if (L < 1 || L > static_cast<long long>(M) * N)
        errs.push_back({"distributions", "u-opt: pilot count out of range"});
      continue;
    }
    if (d == "s-opt") {
      if (kappa < 1 || kappa > N)
        errs.push_back({"distributions", "s-opt: infeasible kappa " + std::to_string(kappa)});
      continue;
    }
    const auto fam = family_from_name(d);
    if (!fam) {
      errs.push_back({"distributions", "unknown distribution '" + d + "'"});
      continue;
    }
    if (kappa < 0 || kappa > max_kappa(*fam, M, N))
      errs.push_back({"distributions", d + ": kappa " + std::to_string(kappa) +
                                           " outside the legal range"});
  }
}

void check_air(const json& p, std::vector<ExperimentError>& errs) {
  const AirOptions opt = air_from(p);
  if (opt.num_iters < 1) errs.push_back({"air.num_iters", "must be >= 1"});
  if (opt.min_blocks < 1) errs.push_back({"air.min_blocks", "must be >= 1"});
  if (opt.block_cap < 1) errs.push_back({"air.block_cap", "must be >= 1"});
  if (!(opt.ci_target > 0)) errs.push_back({"air.ci_target", "must be > 0"});
  if (opt.batch_size < 1) errs.push_back({"air.batch_size", "must be >= 1"});
}

// require_all: every rate must be legal for every family (air-sweep runs the
// full grid per family). Otherwise each family only needs a non-empty legal
// subset, since gain cells maximize each family over the rates it can realize.
void check_rate_grid(const json& p, int N, const std::vector<std::string>& fams, int M,
                     bool require_all, std::vector<ExperimentError>& errs) {
  if (!p.contains("rate_grid") || !p["rate_grid"].is_array() || p["rate_grid"].empty()) {
    errs.push_back({"rate_grid", "missing or empty"});
    return;
  }
  for (const auto& f : fams) {
    const auto fam = family_from_name(f);
    if (!fam) continue;  // reported elsewhere
    int legal = 0;
    for (const json& rj : p["rate_grid"]) {
      const double r = rj.get<double>();
      const int kappa = static_cast<int>(std::llround(r * N));
      if (kappa >= 1 && kappa <= max_kappa(*fam, M, N)) {
        ++legal;
      } else if (require_all) {
        errs.push_back({"rate_grid", "rate " + format_double(r, 6) + " maps to kappa " +
                                         std::to_string(kappa) + ", illegal for " + f});
      }
    }
    if (legal == 0)
      errs.push_back({"rate_grid", "no legal rate for " + f + " at M = " + std::to_string(M)});
  }
}

bool known_format(int f) { return f == 64 || f == 256 || f == 1024; }

}  // namespace

std::vector<ExperimentError> validate_spec(const ExperimentSpec& spec) {
  std::vector<ExperimentError> errs;
  const json& p = spec.params;
  const auto& ids = experiment_ids();
  if (std::find(ids.begin(), ids.end(), spec.id) == ids.end()) {
    errs.push_back({"experiment", "unknown experiment id '" + spec.id + "'"});
    return errs;
  }
  check_config(p, errs);
  if (!p.contains("seed") || !p["seed"].is_number_integer() ||
      (!p["seed"].is_number_unsigned() && p["seed"].get<long long>() < 0))
    errs.push_back({"seed", "missing or not a nonnegative integer"});
  if (!errs.empty() && errs.front().field == "config") return errs;  // dims unusable below

  const json& c = p["config"];
  const int M = c.at("num_channels").get<int>();
  const int N = c.at("block_length").get<int>();

  if (spec.id == "mse-vs-alpha" || spec.id == "mse-heuristics" || spec.id == "mse-grid") {
    check_grid(p, "alpha", errs, 0.0, 1.0);
    if (spec.id != "mse-heuristics") check_grid(p, "snr_db", errs);
    int kappa = 0;
    try {
      kappa = kappa_from(p, N);
    } catch (const std::exception&) {
      errs.push_back({"pilots_per_channel", "missing (or provide pilot_rate)"});
      return errs;
    }
    check_distributions(p, kappa, M, N, errs);
  } else if (spec.id == "mse-reduction") {
    if (!p.contains("axes")) {
      errs.push_back({"axes", "missing"});
      return errs;
    }
    for (const char* axis : {"alpha", "snr_db", "linewidth_hz", "num_channels"})
      if (!p["axes"].contains(axis) || !p["axes"][axis].is_array() || p["axes"][axis].empty())
        errs.push_back({std::string("axes.") + axis, "missing or empty"});
    if (!p.contains("pilot_rate")) errs.push_back({"pilot_rate", "missing"});
    if (errs.empty()) {
      const int kappa = kappa_from(p, N);
      for (const json& mj : p["axes"]["num_channels"]) {
        const int m = mj.get<int>();
        if (m < 2 || m % 2 != 0) {
          errs.push_back({"axes.num_channels", "channel counts must be even and >= 2"});
          break;
        }
        if (kappa > max_kappa(PatternFamily::kS4, m, N)) {
          errs.push_back({"axes.num_channels",
                          "kappa " + std::to_string(kappa) + " illegal for s4 at M = " +
                              std::to_string(m)});
          break;
        }
      }
      for (const json& aj : p["axes"]["alpha"]) {
        const double a = aj.get<double>();
        if (a < 0.0 || a > 1.0) {
          errs.push_back({"axes.alpha", "correlation out of [0, 1]"});
          break;
        }
      }
    }
  } else if (spec.id == "air-sweep") {
    if (!p.contains("format") || !known_format(p["format"].get<int>()))
      errs.push_back({"format", "must be one of 64, 256, 1024"});
    check_grid(p, "alpha", errs, 0.0, 1.0);
    std::vector<std::string> fams;
    if (!p.contains("distributions") || !p["distributions"].is_array() ||
        p["distributions"].empty())
      errs.push_back({"distributions", "missing or empty"});
    else
      for (const json& dj : p["distributions"]) {
        const std::string d = dj.get<std::string>();
        if (!family_from_name(d))
          errs.push_back({"distributions", "unknown distribution '" + d + "'"});
        else
          fams.push_back(d);
      }
    check_rate_grid(p, N, fams, M, true, errs);
    check_air(p, errs);
  } else if (spec.id == "air-gain") {
    if (!p.contains("cells") || !p["cells"].is_array() || p["cells"].empty())
      errs.push_back({"cells", "missing or empty"});
    else
      for (const json& cell : p["cells"])
        if (!cell.contains("format") || !known_format(cell["format"].get<int>()) ||
            !cell.contains("snr_db"))
          errs.push_back({"cells", "each cell needs a known format and an snr_db"});
    check_grid(p, "alpha", errs, 0.0, 1.0);
    check_grid(p, "num_channels", errs, 2);
    if (p.contains("grids") && p["grids"].contains("num_channels"))
      for (const json& mj : p["grids"]["num_channels"]) {
        if (mj.get<int>() % 2 != 0) {
          errs.push_back({"grids.num_channels", "channel counts must be even"});
          break;
        }
        check_rate_grid(p, N, {"s1", "s4"}, mj.get<int>(), false, errs);
      }
    check_air(p, errs);
  } else if (spec.id == "optimize") {
    if (!p.contains("targets") || !p["targets"].is_array() || p["targets"].empty())
      errs.push_back({"targets", "missing or empty"});
    else
      for (const json& tj : p["targets"]) {
        const std::string t = tj.get<std::string>();
        if (t == "unstructured") {
          if (!p.contains("num_pilots") || p["num_pilots"].get<long long>() < 1 ||
              p["num_pilots"].get<long long>() > static_cast<long long>(M) * N)
            errs.push_back({"num_pilots", "need 1 <= num_pilots <= M*N"});
        } else if (t == "structured") {
          const int kappa = p.value("pilots_per_channel", 0);
          if (kappa < 1 || kappa > N)
            errs.push_back({"pilots_per_channel", "infeasible kappa"});
        } else {
          errs.push_back({"targets", "unknown target '" + t + "'"});
        }
      }
    try {
      ga_from(p, 0).validate();
    } catch (const std::exception& e) {
      errs.push_back({"ga", e.what()});
    }
  }
  return errs;
}

RunOutcome run_experiment(const ExperimentSpec& spec, const fs::path& out_dir) {
  const auto errors = validate_spec(spec);
  if (!errors.empty())
    throw std::invalid_argument("invalid spec: " + errors.front().field + ": " +
                                errors.front().message);
  fs::create_directories(out_dir);

  const auto t0 = std::chrono::steady_clock::now();
  RunOutcome out;
  json manifest;
  manifest["experiment"] = spec.id;
  manifest["params"] = spec.params;
  manifest["versions"] = {{"pilotopt", PILOTOPT_VERSION}};
  manifest["seed"] = spec.params.value("seed", 0ull);

  const auto finish = [&](const char* status, const std::string& error) {
    manifest["status"] = status;
    if (!error.empty()) manifest["error"] = error;
    manifest["outputs"] = out.outputs;
    const auto t1 = std::chrono::steady_clock::now();
    out.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
    manifest["wall_seconds"] = out.wall_seconds;
    std::ofstream mf(out_dir / "run_manifest.json", std::ios::binary);
    mf << manifest.dump(2) << '\n';
  };

  try {
    if (spec.id == "mse-vs-alpha")
      run_mse_vs_alpha(spec.params, out_dir, out.outputs);
    else if (spec.id == "mse-heuristics")
      run_mse_heuristics(spec.params, out_dir, out.outputs);
    else if (spec.id == "mse-grid")
      run_mse_grid(spec.params, out_dir, out.outputs);
    else if (spec.id == "mse-reduction")
      run_mse_reduction(spec.params, out_dir, out.outputs);
    else if (spec.id == "air-sweep")
      run_air_sweep(spec.params, out_dir, out.outputs);
    else if (spec.id == "air-gain")
      run_air_gain(spec.params, out_dir, out.outputs);
    else if (spec.id == "optimize")
      run_optimize(spec.params, out_dir, out.outputs);
    else
      throw std::invalid_argument("unknown experiment id '" + spec.id + "'");
  } catch (const std::exception& e) {
    finish("error", e.what());
    throw;
  }
  finish("ok", "");
  out.outputs.push_back("run_manifest.json");
  return out;
}

}  // namespace pilotopt
