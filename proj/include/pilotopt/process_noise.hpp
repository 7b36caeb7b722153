#pragma once

#include <Eigen/Core>

#include "pilotopt/system_config.hpp"

namespace pilotopt {

// Per-step covariance of the multichannel phase-noise increments:
//   Q = sigma2 * [ (1-alpha) * blockdiag(J2, ..., J2) + alpha * J_M ]
// with J_n the n x n all-ones matrix. Entries within a 4D-channel pair
// (including the diagonal) equal sigma2, entries across pairs alpha*sigma2.
// Q is symmetric PSD and singular (rank M/2 for alpha < 1, rank 1 at
// alpha = 1).
struct ProcessNoiseCov {
  Eigen::MatrixXd matrix;         // M x M
  double per_step_variance = 0.0; // sigma2, rad^2 per symbol
  double correlation = 0.0;       // alpha

  int num_channels() const { return static_cast<int>(matrix.rows()); }
};

// sigma2 = 2*pi*linewidth_hz/symbol_rate_baud (combined Tx+LO linewidth).
ProcessNoiseCov build_process_noise_cov(int num_channels, double alpha,
                                        double linewidth_hz,
                                        double symbol_rate_baud);
ProcessNoiseCov build_process_noise_cov(const SystemConfig& cfg);

}  // namespace pilotopt
