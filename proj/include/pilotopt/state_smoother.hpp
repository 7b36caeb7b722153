#pragma once

#include <Eigen/Dense>

#include "pilotopt/covariance_smoother.hpp"
#include "pilotopt/system_config.hpp"

namespace pilotopt {

// Phase estimates produced by the extended Kalman smoother, one row per
// channel, one column per slot.
struct PhaseEstimates {
  Eigen::MatrixXd smoothed;
  Eigen::MatrixXd filtered;
  bool pseudo_inverse_used = false;
};

// Runs the forward filter / backward smoother over a received block.  The
// measurement info supplies the effective symbols and variances used both for
// the innovation and for the information weights; entries with a zero
// effective symbol contribute no update.
PhaseEstimates state_smoother(const Eigen::MatrixXcd& received,
                              const MeasurementInfo& info, const SystemConfig& cfg);

// Mean of the squared estimation error with each residual wrapped to
// (-pi, pi].
double wrapped_mse(const Eigen::MatrixXd& estimate, const Eigen::MatrixXd& truth);

double wrap_angle(double x);

}  // namespace pilotopt
