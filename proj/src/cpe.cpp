#include "pilotopt/cpe.hpp"

#include <cmath>
#include <stdexcept>

#include "pilotopt/demapper.hpp"

namespace pilotopt {

void refine_measurement_info(const Eigen::MatrixXcd& received,
                             const Eigen::MatrixXd& smoothed_phase, const PilotMask& mask,
                             const Constellation& cons, const SystemConfig& cfg,
                             MeasurementInfo& info) {
  Demapper dem(cons, cfg.noise_psd);
  const int M = mask.num_channels();
  const int N = mask.block_length();
  for (int k = 0; k < N; ++k) {
    for (int i = 0; i < M; ++i) {
      if (mask.at(i, k)) continue;
      const std::complex<double> y =
          received(i, k) * std::polar(1.0, -smoothed_phase(i, k));
      const PosteriorMoments mom = dem.posterior(y);
      info.effective_symbol(i, k) = mom.mean;
      info.effective_variance(i, k) = (cfg.noise_psd + mom.second_central) / 2.0;
      info.weight(i, k) = std::norm(mom.mean) / info.effective_variance(i, k);
    }
  }
}

CpeResult iterate_cpe_detection(const Eigen::MatrixXcd& received, const PilotMask& mask,
                                const Constellation& cons, const SystemConfig& cfg,
                                int num_iters) {
  if (num_iters < 1) throw std::invalid_argument("iterate_cpe_detection: num_iters must be >= 1");
  if (received.rows() != cfg.num_channels || received.cols() != cfg.block_length)
    throw std::invalid_argument("iterate_cpe_detection: block dimensions disagree with config");

  MeasurementInfo info = pilot_prior_info(mask, cfg);
  CpeResult out;
  out.phases = state_smoother(received, info, cfg);
  for (int it = 1; it < num_iters; ++it) {
    refine_measurement_info(received, out.phases.smoothed, mask, cons, cfg, info);
    out.phases = state_smoother(received, info, cfg);
  }

  const int M = mask.num_channels();
  const int N = mask.block_length();
  out.num_data_symbols = M * N - mask.count();
  out.llrs.resize(static_cast<size_t>(out.num_data_symbols) * cons.bits_per_symbol);
  Demapper dem(cons, cfg.noise_psd);
  size_t w = 0;
  for (int k = 0; k < N; ++k) {
    for (int i = 0; i < M; ++i) {
      if (mask.at(i, k)) continue;
      const std::complex<double> y =
          received(i, k) * std::polar(1.0, -out.phases.smoothed(i, k));
      dem.llrs(y, out.llrs.data() + w);
      w += cons.bits_per_symbol;
    }
  }
  return out;
}

}  // namespace pilotopt
