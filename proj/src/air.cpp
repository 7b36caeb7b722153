#include "pilotopt/air.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include "pilotopt/channel.hpp"
#include "pilotopt/cpe.hpp"
#include "pilotopt/demapper.hpp"
#include "pilotopt/gmi.hpp"
#include "pilotopt/parallel.hpp"
#include "pilotopt/rng.hpp"

namespace pilotopt {

namespace {

double block_gmi(const SystemConfig& cfg, const PilotMask& mask, const Constellation& cons,
                 const AirOptions& opt, std::uint64_t seed, int block) {
  const std::uint64_t base = 3ull * static_cast<std::uint64_t>(block);
  const ProcessNoiseCov cov = build_process_noise_cov(cfg);
  const Eigen::MatrixXd theta =
      sample_phase_trajectory(cov, cfg.block_length, derive_seed(seed, base));
  const SymbolBlock tx =
      generate_symbol_block(mask, cons, cfg.pilot_point, derive_seed(seed, base + 1));
  const Eigen::MatrixXcd r =
      transmit(tx.symbols, theta, cfg.noise_psd, derive_seed(seed, base + 2));

  std::vector<double> llrs;
  if (opt.genie_phase) {
    const int m = cons.bits_per_symbol;
    llrs.resize(static_cast<size_t>(mask.num_channels() * mask.block_length() - mask.count()) * m);
    Demapper dem(cons, cfg.noise_psd);
    size_t w = 0;
    for (int k = 0; k < mask.block_length(); ++k)
      for (int i = 0; i < mask.num_channels(); ++i) {
        if (mask.at(i, k)) continue;
        dem.llrs(r(i, k) * std::polar(1.0, -theta(i, k)), llrs.data() + w);
        w += m;
      }
  } else {
    llrs = iterate_cpe_detection(r, mask, cons, cfg, opt.num_iters).llrs;
  }
  return estimate_gmi(llrs, data_bits(tx.labels, cons.bits_per_symbol), cons.bits_per_symbol);
}

// Mean / 95% halfwidth over per-block GMIs, accumulated in index order.
void block_stats(const std::vector<double>& g, double& mean, double& ci) {
  const size_t n = g.size();
  double sum = 0.0, comp = 0.0;
  for (double v : g) {
    const double term = v - comp;
    const double t = sum + term;
    comp = (t - sum) - term;
    sum = t;
  }
  mean = sum / static_cast<double>(n);
  if (n < 2) {
    ci = std::numeric_limits<double>::infinity();
    return;
  }
  double ss = 0.0;
  for (double v : g) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  ci = 1.96 * sd / std::sqrt(static_cast<double>(n));
}

}  // namespace

AirResult estimate_air(const SystemConfig& cfg, const PilotMask& mask,
                       const Constellation& cons, const AirOptions& opt,
                       std::uint64_t seed) {
  if (mask.num_channels() != cfg.num_channels || mask.block_length() != cfg.block_length)
    throw std::invalid_argument("estimate_air: mask dimensions disagree with config");
  if (opt.block_cap < 1) throw std::invalid_argument("estimate_air: block_cap must be >= 1");

  AirResult res;
  res.pilot_rate = mask.pilot_rate();
  const long long data_per_block =
      static_cast<long long>(mask.num_channels()) * mask.block_length() - mask.count();
  if (data_per_block == 0) return res;  // all-pilot: nothing to demap, AIR 0

  std::vector<double> per_block;
  per_block.reserve(opt.block_cap);
  double mean = 0.0, ci = std::numeric_limits<double>::infinity();
  while (static_cast<int>(per_block.size()) < opt.block_cap) {
    const int start = static_cast<int>(per_block.size());
    const int want = std::min(opt.batch_size, opt.block_cap - start);
    per_block.resize(start + want);
    parallel_for(want, [&](int j) {
      per_block[start + j] = block_gmi(cfg, mask, cons, opt, seed, start + j);
    });
    block_stats(per_block, mean, ci);
    if (static_cast<int>(per_block.size()) >= opt.min_blocks && ci <= opt.ci_target) break;
  }

  res.num_blocks = static_cast<int>(per_block.size());
  res.num_symbols = data_per_block * res.num_blocks;
  res.gmi_bits_per_symbol = mean;
  res.air_bits_per_symbol = (1.0 - res.pilot_rate) * mean;
  res.ci_halfwidth = std::isfinite(ci) ? ci : 0.0;
  return res;
}

SweepResult sweep_pilot_rate(const SystemConfig& cfg, const Constellation& cons,
                             PatternFamily family, const std::vector<double>& rate_grid,
                             const AirOptions& opt, std::uint64_t seed) {
  if (rate_grid.empty()) throw std::invalid_argument("sweep_pilot_rate: empty rate grid");
  SweepResult sweep;
  sweep.grid.reserve(rate_grid.size());
  const int limit = max_kappa(family, cfg.num_channels, cfg.block_length);
  for (size_t idx = 0; idx < rate_grid.size(); ++idx) {
    const double rate = rate_grid[idx];
    const int kappa = static_cast<int>(std::llround(rate * cfg.block_length));
    if (kappa < 1 || kappa > limit)
      throw std::invalid_argument("sweep_pilot_rate: rate " + std::to_string(rate) +
                                  " maps to kappa outside the legal range of " +
                                  family_name(family));
    const PilotMask mask =
        build_family_mask(family, kappa, cfg.num_channels, cfg.block_length);
    SweepPoint pt;
    pt.target_rate = rate;
    pt.pilots_per_channel = kappa;
    pt.result = estimate_air(cfg, mask, cons, opt, derive_seed(seed, idx));
    sweep.grid.push_back(std::move(pt));
  }
  for (size_t idx = 0; idx < sweep.grid.size(); ++idx) {
    const AirResult& r = sweep.grid[idx].result;
    if (sweep.argmax_index < 0 || r.air_bits_per_symbol > sweep.max_air) {
      sweep.argmax_index = static_cast<int>(idx);
      sweep.argmax_rate = r.pilot_rate;
      sweep.max_air = r.air_bits_per_symbol;
    }
  }
  return sweep;
}

namespace {

std::vector<double> legal_rates(const std::vector<double>& grid, PatternFamily family,
                                const SystemConfig& cfg) {
  std::vector<double> out;
  const int hi = max_kappa(family, cfg.num_channels, cfg.block_length);
  for (double r : grid) {
    const int kappa = static_cast<int>(std::llround(r * cfg.block_length));
    if (kappa >= 1 && kappa <= hi) out.push_back(r);
  }
  if (out.empty())
    throw std::invalid_argument("air_gain_cell: no legal rate for " +
                                std::string(family_name(family)));
  return out;
}

}  // namespace

AirGainCell air_gain_cell(const SystemConfig& cfg, const Constellation& cons,
                          const std::vector<double>& rate_grid, const AirOptions& opt,
                          std::uint64_t seed) {
  // Each family is maximized over the subset of the grid it can realize; the
  // same seed drives both sweeps so common phase/noise realizations cancel in
  // the S4 - S1 difference, tightening the gain estimate.
  const SweepResult s1 = sweep_pilot_rate(cfg, cons, PatternFamily::kS1,
                                          legal_rates(rate_grid, PatternFamily::kS1, cfg),
                                          opt, derive_seed(seed, 1));
  const SweepResult s4 = sweep_pilot_rate(cfg, cons, PatternFamily::kS4,
                                          legal_rates(rate_grid, PatternFamily::kS4, cfg),
                                          opt, derive_seed(seed, 1));
  AirGainCell cell;
  cell.order = cons.order;
  cell.num_channels = cfg.num_channels;
  cell.snr_db = cfg.snr_db;
  cell.alpha = cfg.correlation;
  cell.rate_s1 = s1.argmax_rate;
  cell.air_s1 = s1.max_air;
  cell.ci_s1 = s1.grid[s1.argmax_index].result.ci_halfwidth;
  cell.rate_s4 = s4.argmax_rate;
  cell.air_s4 = s4.max_air;
  cell.ci_s4 = s4.grid[s4.argmax_index].result.ci_halfwidth;
  cell.gain = s4.max_air - s1.max_air;
  return cell;
}

}  // namespace pilotopt
