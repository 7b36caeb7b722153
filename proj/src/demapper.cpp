#include "pilotopt/demapper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pilotopt {

Demapper::Demapper(const Constellation& cons, double noise_psd)
    : cons_(cons), inv_n0_(1.0 / noise_psd), metric_(cons.order), weight_(cons.order) {
  if (noise_psd <= 0.0) throw std::invalid_argument("Demapper: noise_psd must be positive");
}

void Demapper::gaussian_metrics(std::complex<double> y) {
  for (int l = 0; l < cons_.order; ++l)
    metric_[l] = -std::norm(y - cons_.points[l]) * inv_n0_;
}

PosteriorMoments Demapper::posterior(std::complex<double> y) {
  gaussian_metrics(y);
  const double peak = *std::max_element(metric_.begin(), metric_.end());
  double total = 0.0;
  for (int l = 0; l < cons_.order; ++l) {
    weight_[l] = std::exp(metric_[l] - peak);
    total += weight_[l];
  }
  PosteriorMoments out;
  std::complex<double> mean = 0.0;
  for (int l = 0; l < cons_.order; ++l) mean += weight_[l] * cons_.points[l];
  mean /= total;
  double spread = 0.0;
  for (int l = 0; l < cons_.order; ++l)
    spread += weight_[l] * std::norm(cons_.points[l] - mean);
  out.mean = mean;
  out.second_central = spread / total;
  return out;
}

void Demapper::llrs(std::complex<double> y, double* out) {
  gaussian_metrics(y);
  const int m = cons_.bits_per_symbol;
  for (int b = 0; b < m; ++b) {
    double max0 = -std::numeric_limits<double>::infinity();
    double max1 = max0;
    for (int l = 0; l < cons_.order; ++l) {
      double& peak = cons_.bit_of(l, b) ? max1 : max0;
      peak = std::max(peak, metric_[l]);
    }
    double sum0 = 0.0, sum1 = 0.0;
    for (int l = 0; l < cons_.order; ++l) {
      if (cons_.bit_of(l, b))
        sum1 += std::exp(metric_[l] - max1);
      else
        sum0 += std::exp(metric_[l] - max0);
    }
    const double llr = (max0 + std::log(sum0)) - (max1 + std::log(sum1));
    out[b] = std::clamp(llr, -llr_clamp, llr_clamp);
  }
}

}  // namespace pilotopt
