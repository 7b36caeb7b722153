#pragma once

#include <complex>
#include <vector>

#include "pilotopt/constellation.hpp"

namespace pilotopt {

// Posterior symbol statistics q(x) ~ exp(-|y - x|^2 / N0) for a compensated
// sample y.
struct PosteriorMoments {
  std::complex<double> mean;      // sum_x q(x) x
  double second_central = 0.0;    // sum_x q(x) |x - mean|^2
};

// Soft demapper for one constellation at a fixed noise level. Keeps scratch
// storage, so give each worker its own instance.
class Demapper {
 public:
  Demapper(const Constellation& cons, double noise_psd);

  PosteriorMoments posterior(std::complex<double> y);

  // Exact bitwise log-likelihood ratios, MSB first, clamped to +-llr_clamp.
  // Positive favors bit 0. Writes bits_per_symbol values to out.
  void llrs(std::complex<double> y, double* out);

  static constexpr double llr_clamp = 50.0;

  const Constellation& constellation() const { return cons_; }

 private:
  // Fills metric_[l] = -|y - x_l|^2 / N0.
  void gaussian_metrics(std::complex<double> y);

  const Constellation& cons_;
  double inv_n0_;
  std::vector<double> metric_;
  std::vector<double> weight_;
};

}  // namespace pilotopt
