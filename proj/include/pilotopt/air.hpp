#pragma once

#include <cstdint>
#include <vector>

#include "pilotopt/constellation.hpp"
#include "pilotopt/pilot_mask.hpp"
#include "pilotopt/pilot_patterns.hpp"
#include "pilotopt/system_config.hpp"

namespace pilotopt {

struct AirOptions {
  int num_iters = 3;       // CPE + detection passes per block
  int min_blocks = 8;      // always simulate at least this many blocks
  int block_cap = 200;     // hard stop
  double ci_target = 0.01; // stop once the 95% halfwidth drops below this
  int batch_size = 8;      // blocks dispatched per parallel round
  bool genie_phase = false;  // bypass CPE, demap with the true phase
};

struct AirResult {
  double pilot_rate = 0.0;           // realized pilots / (M*N)
  double gmi_bits_per_symbol = 0.0;  // mean per-block GMI over data slots
  double air_bits_per_symbol = 0.0;  // (1 - pilot_rate) * gmi
  double ci_halfwidth = 0.0;         // 1.96 * sd / sqrt(blocks)
  int num_blocks = 0;
  long long num_symbols = 0;  // data symbols demapped in total
};

// Monte-Carlo AIR for one mask: per block, sample phases and symbols,
// transmit, run the iterative CPE + detector, and score the LLRs. Blocks use
// seeds derived from (seed, block index), so results are reproducible and
// independent of the worker count.
AirResult estimate_air(const SystemConfig& cfg, const PilotMask& mask,
                       const Constellation& cons, const AirOptions& opt,
                       std::uint64_t seed);

struct SweepPoint {
  double target_rate = 0.0;
  int pilots_per_channel = 0;  // kappa = round(rate * N)
  AirResult result;
};

struct SweepResult {
  std::vector<SweepPoint> grid;
  int argmax_index = -1;
  double argmax_rate = 0.0;
  double max_air = 0.0;
};

// AIR across a pilot-rate grid for one heuristic family. Each point derives
// kappa by nearest-integer rounding of rate * N and reports the realized
// rate.
SweepResult sweep_pilot_rate(const SystemConfig& cfg, const Constellation& cons,
                             PatternFamily family, const std::vector<double>& rate_grid,
                             const AirOptions& opt, std::uint64_t seed);

struct AirGainCell {
  int order = 0;
  int num_channels = 0;
  double snr_db = 0.0;
  double alpha = 0.0;
  double rate_s1 = 0.0, air_s1 = 0.0, ci_s1 = 0.0;
  double rate_s4 = 0.0, air_s4 = 0.0, ci_s4 = 0.0;
  double gain = 0.0;  // max-rate AIR(S4) - max-rate AIR(S1)
};

// One cell of the S4-vs-S1 gain table: both families swept over the same
// rate grid, each maximized independently.
AirGainCell air_gain_cell(const SystemConfig& cfg, const Constellation& cons,
                          const std::vector<double>& rate_grid, const AirOptions& opt,
                          std::uint64_t seed);

}  // namespace pilotopt
