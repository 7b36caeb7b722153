#include "pilotopt/process_noise.hpp"

#include <numbers>
#include <stdexcept>
#include <string>

namespace pilotopt {

ProcessNoiseCov build_process_noise_cov(int num_channels, double alpha,
                                        double linewidth_hz,
                                        double symbol_rate_baud) {
  if (num_channels < 2 || num_channels % 2 != 0)
    throw std::invalid_argument("build_process_noise_cov: num_channels must be even and >= 2");
  if (alpha < 0.0 || alpha > 1.0)
    throw std::invalid_argument("build_process_noise_cov: alpha must lie in [0, 1]");
  if (linewidth_hz < 0.0)
    throw std::invalid_argument("build_process_noise_cov: linewidth must be nonnegative");
  if (!(symbol_rate_baud > 0.0))
    throw std::invalid_argument("build_process_noise_cov: symbol rate must be positive");

  const double sigma2 = 2.0 * std::numbers::pi * linewidth_hz / symbol_rate_baud;
  ProcessNoiseCov cov;
  cov.per_step_variance = sigma2;
  cov.correlation = alpha;
  cov.matrix.resize(num_channels, num_channels);
  for (int i = 0; i < num_channels; ++i) {
    for (int j = 0; j < num_channels; ++j) {
      const bool same_pair = (i / 2) == (j / 2);
      cov.matrix(i, j) = sigma2 * (same_pair ? 1.0 : alpha);
    }
  }
  return cov;
}

ProcessNoiseCov build_process_noise_cov(const SystemConfig& cfg) {
  return build_process_noise_cov(cfg.num_channels, cfg.correlation,
                                 cfg.total_linewidth_hz, cfg.symbol_rate_baud);
}

}  // namespace pilotopt
