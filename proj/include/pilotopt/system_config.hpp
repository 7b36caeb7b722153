#pragma once

#include <complex>

namespace pilotopt {

// Scalar parameters of the multichannel transmission model. The M complex
// channels are grouped into M/2 dual-polarization (4D) channels; rows 2p and
// 2p+1 of every M x N block belong to 4D channel p and share one laser.
struct SystemConfig {
  int num_channels = 4;     // M, even
  int block_length = 1000;  // N symbols per channel
  double symbol_energy = 1.0;
  double noise_psd = 0.01;  // N0 (linear); N0/2 per real dimension
  double snr_db = 20.0;     // 10*log10(Es/N0)
  double total_linewidth_hz = 200e3;  // combined Tx+LO linewidth
  double symbol_rate_baud = 20e9;
  double correlation = 1.0;  // alpha: phase-increment correlation across 4D channels
  std::complex<double> pilot_point{1.0, 0.0};  // zeta

  // Consistent config with N0 derived from the SNR and pilots at sqrt(Es).
  static SystemConfig make(int num_channels, int block_length, double snr_db,
                           double alpha, double linewidth_hz = 200e3,
                           double symbol_rate_baud = 20e9,
                           double symbol_energy = 1.0);

  // Wiener phase-noise increment variance per symbol: 2*pi*linewidth/rate.
  double increment_variance() const;

  int num_4d_channels() const { return num_channels / 2; }

  // Throws std::invalid_argument on the first violated invariant.
  void validate() const;
};

}  // namespace pilotopt
