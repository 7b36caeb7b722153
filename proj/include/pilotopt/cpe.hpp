#pragma once

#include <vector>

#include <Eigen/Dense>

#include "pilotopt/constellation.hpp"
#include "pilotopt/pilot_mask.hpp"
#include "pilotopt/state_smoother.hpp"
#include "pilotopt/system_config.hpp"

namespace pilotopt {

// Output of the iterative smoother + soft detector. LLRs cover data slots
// only, ordered slot-major (k = 1..N) with channels nested inside and the
// bits_per_symbol values of one symbol MSB first. Positive favors bit 0.
struct CpeResult {
  PhaseEstimates phases;
  std::vector<double> llrs;
  int num_data_symbols = 0;
};

// Iteration 1 smooths with the pilot-prior statistics; each later iteration
// replaces the data-slot statistics with posterior moments computed from the
// compensated samples and smooths again. After the last pass the final LLRs
// are produced from y = r * exp(-j theta_hat).
CpeResult iterate_cpe_detection(const Eigen::MatrixXcd& received, const PilotMask& mask,
                                const Constellation& cons, const SystemConfig& cfg,
                                int num_iters = 3);

// Replaces the data-slot entries of `info` with posterior moments given the
// current smoothed phases: s~ = E[x|y], sigma~^2 = (N0 + Var[x|y]) / 2.
void refine_measurement_info(const Eigen::MatrixXcd& received,
                             const Eigen::MatrixXd& smoothed_phase, const PilotMask& mask,
                             const Constellation& cons, const SystemConfig& cfg,
                             MeasurementInfo& info);

}  // namespace pilotopt
