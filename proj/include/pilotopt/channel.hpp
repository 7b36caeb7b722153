#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "pilotopt/constellation.hpp"
#include "pilotopt/pilot_mask.hpp"
#include "pilotopt/process_noise.hpp"
#include "pilotopt/system_config.hpp"

namespace pilotopt {

// Multichannel Wiener phase-noise trajectory, column k holding the M phases
// at time k. The initial column draws one Uniform[0, 2pi) phase per 4D
// channel (both polarizations of a pair share the laser, hence the phase)
// and independent phases across 4D channels. Increments are zero-mean
// Gaussian with the given covariance, generated through a symmetric
// eigendecomposition square root with negative eigenvalues clamped at zero
// (the covariance is singular by construction, so Cholesky does not apply).
Eigen::MatrixXd sample_phase_trajectory(const ProcessNoiseCov& cov,
                                        int block_length, std::uint64_t seed);

struct SymbolBlock {
  Eigen::MatrixXcd symbols;  // M x N; pilot slots hold the pilot point
  Eigen::MatrixXi labels;    // constellation label per data slot, -1 at pilots
};

// Pilot slots carry pilot_point, data slots i.i.d. uniform constellation
// draws (column-major draw order).
SymbolBlock generate_symbol_block(const PilotMask& mask, const Constellation& c,
                                  std::complex<double> pilot_point,
                                  std::uint64_t seed);

// r = s .* exp(j*theta) + n with circular complex AWGN of variance
// noise_psd/2 per real dimension.
Eigen::MatrixXcd transmit(const Eigen::MatrixXcd& symbols,
                          const Eigen::MatrixXd& theta, double noise_psd,
                          std::uint64_t seed);

}  // namespace pilotopt
