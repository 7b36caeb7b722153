#include "pilotopt/system_config.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pilotopt {

SystemConfig SystemConfig::make(int num_channels, int block_length,
                                double snr_db, double alpha,
                                double linewidth_hz, double symbol_rate_baud,
                                double symbol_energy) {
  SystemConfig cfg;
  cfg.num_channels = num_channels;
  cfg.block_length = block_length;
  cfg.symbol_energy = symbol_energy;
  cfg.snr_db = snr_db;
  cfg.noise_psd = symbol_energy * std::pow(10.0, -snr_db / 10.0);
  cfg.total_linewidth_hz = linewidth_hz;
  cfg.symbol_rate_baud = symbol_rate_baud;
  cfg.correlation = alpha;
  cfg.pilot_point = {std::sqrt(symbol_energy), 0.0};
  cfg.validate();
  return cfg;
}

double SystemConfig::increment_variance() const {
  return 2.0 * std::numbers::pi * total_linewidth_hz / symbol_rate_baud;
}

void SystemConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("SystemConfig: " + msg); };
  if (num_channels < 2 || num_channels % 2 != 0)
    fail("num_channels must be even and >= 2, got " + std::to_string(num_channels));
  if (block_length < 1) fail("block_length must be >= 1");
  if (!(symbol_energy > 0.0)) fail("symbol_energy must be positive");
  if (!(noise_psd > 0.0)) fail("noise_psd must be positive");
  if (correlation < 0.0 || correlation > 1.0) fail("correlation must lie in [0, 1]");
  if (total_linewidth_hz < 0.0) fail("total_linewidth_hz must be nonnegative");
  if (!(symbol_rate_baud > 0.0)) fail("symbol_rate_baud must be positive");
  const double snr_lin = std::pow(10.0, snr_db / 10.0);
  if (std::abs(symbol_energy / noise_psd - snr_lin) > 1e-12 * snr_lin)
    fail("snr_db inconsistent with Es/N0");
}

}  // namespace pilotopt
