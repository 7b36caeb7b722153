// Python bindings for the core operations: masks and pilot families, the
// covariance/state smoothers, the channel simulator, GMI/AIR estimation, and
// the genetic optimizer.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "pilotopt/air.hpp"
#include "pilotopt/channel.hpp"
#include "pilotopt/covariance_smoother.hpp"
#include "pilotopt/cpe.hpp"
#include "pilotopt/genetic.hpp"
#include "pilotopt/gmi.hpp"
#include "pilotopt/pilot_patterns.hpp"
#include "pilotopt/process_noise.hpp"
#include "pilotopt/state_smoother.hpp"
#include "pilotopt/system_config.hpp"
#include "pilotopt/version.hpp"

namespace py = pybind11;
using namespace pilotopt;

namespace {

PatternFamily family_or_throw(const std::string& name) {
  const auto f = family_from_name(name);
  if (!f) throw std::invalid_argument("unknown pilot family '" + name + "'");
  return *f;
}

}  // namespace

PYBIND11_MODULE(pilotopt, m) {
  m.doc() = "pilot distributions for joint-channel carrier-phase tracking";
  m.attr("__version__") = PILOTOPT_VERSION;

  py::class_<SystemConfig>(m, "SystemConfig")
      .def(py::init<>())
      .def_static("make", &SystemConfig::make, py::arg("num_channels"),
                  py::arg("block_length"), py::arg("snr_db"), py::arg("alpha"),
                  py::arg("linewidth_hz") = 200e3, py::arg("symbol_rate_baud") = 20e9,
                  py::arg("symbol_energy") = 1.0)
      .def_readwrite("num_channels", &SystemConfig::num_channels)
      .def_readwrite("block_length", &SystemConfig::block_length)
      .def_readwrite("symbol_energy", &SystemConfig::symbol_energy)
      .def_readwrite("noise_psd", &SystemConfig::noise_psd)
      .def_readwrite("snr_db", &SystemConfig::snr_db)
      .def_readwrite("total_linewidth_hz", &SystemConfig::total_linewidth_hz)
      .def_readwrite("symbol_rate_baud", &SystemConfig::symbol_rate_baud)
      .def_readwrite("correlation", &SystemConfig::correlation)
      .def_readwrite("pilot_point", &SystemConfig::pilot_point)
      .def("increment_variance", &SystemConfig::increment_variance)
      .def("validate", &SystemConfig::validate);

  py::class_<Constellation>(m, "Constellation")
      .def_readonly("order", &Constellation::order)
      .def_readonly("bits_per_symbol", &Constellation::bits_per_symbol)
      .def_readonly("symbol_energy", &Constellation::symbol_energy)
      .def_readonly("points", &Constellation::points)
      .def("bit_of", &Constellation::bit_of, py::arg("label"), py::arg("bit"));
  m.def("make_constellation", &make_constellation, py::arg("order"),
        py::arg("symbol_energy") = 1.0);

  py::class_<PilotMask>(m, "PilotMask")
      .def(py::init<>())
      .def(py::init<int, int>(), py::arg("num_channels"), py::arg("block_length"))
      .def_property_readonly("num_channels", &PilotMask::num_channels)
      .def_property_readonly("block_length", &PilotMask::block_length)
      .def("at", &PilotMask::at, py::arg("channel"), py::arg("slot"))
      .def("set", &PilotMask::set, py::arg("channel"), py::arg("slot"),
           py::arg("pilot") = true)
      .def("count", &PilotMask::count)
      .def("count_in_channel", &PilotMask::count_in_channel, py::arg("channel"))
      .def("pilot_rate", &PilotMask::pilot_rate)
      .def("positions", &PilotMask::positions)
      .def_static(
          "from_positions",
          [](int num_channels, int block_length, const std::vector<int>& positions) {
            return PilotMask::from_positions(num_channels, block_length, positions);
          },
          py::arg("num_channels"), py::arg("block_length"), py::arg("positions"))
      .def("to_text_grid", &PilotMask::to_text_grid)
      .def_static("from_text_grid", &PilotMask::from_text_grid, py::arg("text"))
      .def("to_json", [](const PilotMask& mask) { return mask.to_json().dump(); })
      .def_static("from_json",
                  [](const std::string& text) {
                    return PilotMask::from_json(nlohmann::json::parse(text));
                  },
                  py::arg("text"))
      .def(py::self == py::self);

  m.def(
      "build_family_mask",
      [](const std::string& family, int kappa, int num_channels, int block_length,
         std::uint64_t seed) {
        return build_family_mask(family_or_throw(family), kappa, num_channels, block_length,
                                 seed);
      },
      py::arg("family"), py::arg("kappa"), py::arg("num_channels"), py::arg("block_length"),
      py::arg("seed") = 0);
  m.def(
      "max_kappa",
      [](const std::string& family, int num_channels, int block_length) {
        return max_kappa(family_or_throw(family), num_channels, block_length);
      },
      py::arg("family"), py::arg("num_channels"), py::arg("block_length"));
  m.def("random_distribution", &random_distribution, py::arg("kappa"),
        py::arg("num_channels"), py::arg("block_length"), py::arg("seed"));

  m.def(
      "process_noise_cov",
      [](const SystemConfig& cfg) { return build_process_noise_cov(cfg).matrix; },
      py::arg("config"));

  py::class_<SmootherTrace>(m, "SmootherTrace")
      .def_readonly("tr_predicted", &SmootherTrace::tr_predicted)
      .def_readonly("tr_filtered", &SmootherTrace::tr_filtered)
      .def_readonly("tr_smoothed", &SmootherTrace::tr_smoothed)
      .def_readonly("objective", &SmootherTrace::objective)
      .def_readonly("pseudo_inverse_used", &SmootherTrace::pseudo_inverse_used)
      .def_readonly("smoothed", &SmootherTrace::smoothed);
  m.def("covariance_smoother",
        py::overload_cast<const PilotMask&, const SystemConfig&, bool>(&covariance_smoother),
        py::arg("mask"), py::arg("config"), py::arg("keep_matrices") = false);
  m.def("smoother_objective", &smoother_objective, py::arg("mask"), py::arg("config"));

  py::class_<PhaseEstimates>(m, "PhaseEstimates")
      .def_readonly("smoothed", &PhaseEstimates::smoothed)
      .def_readonly("filtered", &PhaseEstimates::filtered);
  m.def(
      "state_smoother",
      [](const Eigen::MatrixXcd& received, const PilotMask& mask, const SystemConfig& cfg) {
        return state_smoother(received, pilot_prior_info(mask, cfg), cfg);
      },
      py::arg("received"), py::arg("mask"), py::arg("config"),
      "Pilot-only smoothing pass (first-iteration statistics).");
  m.def("wrapped_mse", &wrapped_mse, py::arg("estimate"), py::arg("truth"));

  py::class_<CpeResult>(m, "CpeResult")
      .def_readonly("phases", &CpeResult::phases)
      .def_readonly("llrs", &CpeResult::llrs)
      .def_readonly("num_data_symbols", &CpeResult::num_data_symbols);
  m.def("iterate_cpe_detection", &iterate_cpe_detection, py::arg("received"), py::arg("mask"),
        py::arg("constellation"), py::arg("config"), py::arg("num_iters") = 3);

  m.def(
      "sample_phase_trajectory",
      [](const SystemConfig& cfg, std::uint64_t seed) {
        return sample_phase_trajectory(build_process_noise_cov(cfg), cfg.block_length, seed);
      },
      py::arg("config"), py::arg("seed"));
  py::class_<SymbolBlock>(m, "SymbolBlock")
      .def_readonly("symbols", &SymbolBlock::symbols)
      .def_readonly("labels", &SymbolBlock::labels);
  m.def(
      "generate_symbol_block",
      [](const PilotMask& mask, const Constellation& cons, const SystemConfig& cfg,
         std::uint64_t seed) {
        return generate_symbol_block(mask, cons, cfg.pilot_point, seed);
      },
      py::arg("mask"), py::arg("constellation"), py::arg("config"), py::arg("seed"));
  m.def("transmit", &transmit, py::arg("symbols"), py::arg("theta"), py::arg("noise_psd"),
        py::arg("seed"));

  m.def("estimate_gmi", &estimate_gmi, py::arg("llrs"), py::arg("bits"),
        py::arg("bits_per_symbol"));
  m.def("data_bits", &data_bits, py::arg("labels"), py::arg("bits_per_symbol"));

  py::class_<AirOptions>(m, "AirOptions")
      .def(py::init<>())
      .def_readwrite("num_iters", &AirOptions::num_iters)
      .def_readwrite("min_blocks", &AirOptions::min_blocks)
      .def_readwrite("block_cap", &AirOptions::block_cap)
      .def_readwrite("ci_target", &AirOptions::ci_target)
      .def_readwrite("batch_size", &AirOptions::batch_size)
      .def_readwrite("genie_phase", &AirOptions::genie_phase);
  py::class_<AirResult>(m, "AirResult")
      .def_readonly("pilot_rate", &AirResult::pilot_rate)
      .def_readonly("gmi_bits_per_symbol", &AirResult::gmi_bits_per_symbol)
      .def_readonly("air_bits_per_symbol", &AirResult::air_bits_per_symbol)
      .def_readonly("ci_halfwidth", &AirResult::ci_halfwidth)
      .def_readonly("num_blocks", &AirResult::num_blocks)
      .def_readonly("num_symbols", &AirResult::num_symbols);
  m.def("estimate_air", &estimate_air, py::arg("config"), py::arg("mask"),
        py::arg("constellation"), py::arg("options"), py::arg("seed"));

  py::class_<SweepPoint>(m, "SweepPoint")
      .def_readonly("target_rate", &SweepPoint::target_rate)
      .def_readonly("pilots_per_channel", &SweepPoint::pilots_per_channel)
      .def_readonly("result", &SweepPoint::result);
  py::class_<SweepResult>(m, "SweepResult")
      .def_readonly("grid", &SweepResult::grid)
      .def_readonly("argmax_index", &SweepResult::argmax_index)
      .def_readonly("argmax_rate", &SweepResult::argmax_rate)
      .def_readonly("max_air", &SweepResult::max_air);
  m.def(
      "sweep_pilot_rate",
      [](const SystemConfig& cfg, const Constellation& cons, const std::string& family,
         const std::vector<double>& rates, const AirOptions& opt, std::uint64_t seed) {
        return sweep_pilot_rate(cfg, cons, family_or_throw(family), rates, opt, seed);
      },
      py::arg("config"), py::arg("constellation"), py::arg("family"), py::arg("rate_grid"),
      py::arg("options"), py::arg("seed"));

  py::class_<GaConfig>(m, "GaConfig")
      .def(py::init<>())
      .def_readwrite("population_size", &GaConfig::population_size)
      .def_readwrite("generations", &GaConfig::generations)
      .def_readwrite("tournament_size", &GaConfig::tournament_size)
      .def_readwrite("crossover_rate", &GaConfig::crossover_rate)
      .def_readwrite("mutation_rate", &GaConfig::mutation_rate)
      .def_readwrite("elitism_count", &GaConfig::elitism_count)
      .def_readwrite("rng_seed", &GaConfig::rng_seed)
      .def_readwrite("stall_generations", &GaConfig::stall_generations);
  py::class_<UnstructuredDistribution>(m, "UnstructuredDistribution")
      .def_readonly("positions", &UnstructuredDistribution::positions);
  py::class_<StructuredDistribution>(m, "StructuredDistribution")
      .def_readonly("pilots_per_channel", &StructuredDistribution::pilots_per_channel)
      .def_readonly("offset", &StructuredDistribution::offset)
      .def_readonly("spacing", &StructuredDistribution::spacing);
  py::class_<OptimizationResult>(m, "OptimizationResult")
      .def_readonly("best_mask", &OptimizationResult::best_mask)
      .def_readonly("best_objective", &OptimizationResult::best_objective)
      .def_readonly("history", &OptimizationResult::history)
      .def_readonly("evaluations", &OptimizationResult::evaluations)
      .def_readonly("seed", &OptimizationResult::seed)
      .def_readonly("unstructured", &OptimizationResult::unstructured)
      .def_readonly("structured", &OptimizationResult::structured);
  m.def("optimize_unstructured", &optimize_unstructured, py::arg("config"),
        py::arg("num_pilots"), py::arg("ga"),
        py::call_guard<py::gil_scoped_release>());
  m.def("optimize_structured", &optimize_structured, py::arg("config"),
        py::arg("pilots_per_channel"), py::arg("ga"),
        py::call_guard<py::gil_scoped_release>());
}
