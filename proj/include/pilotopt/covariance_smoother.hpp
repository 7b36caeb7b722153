#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "pilotopt/pilot_mask.hpp"
#include "pilotopt/process_noise.hpp"
#include "pilotopt/system_config.hpp"

namespace pilotopt {

// Per-slot effective measurement statistics feeding the smoother. Pilots
// carry s~ = zeta with variance N0/2; data slots carry the prior stats
// s~ = 0, sigma~^2 = (N0 + Es)/2 on the first iteration and posterior
// moments on later ones. weight(i, k) = |s~|^2 / sigma~^2 is the diagonal
// of V_k.
struct MeasurementInfo {
  Eigen::MatrixXcd effective_symbol;
  Eigen::MatrixXd effective_variance;
  Eigen::MatrixXd weight;
};

MeasurementInfo pilot_prior_info(const PilotMask& mask, const SystemConfig& cfg);

// Deterministic output of the covariance recursions. The objective is
// sum_k tr(M_{k|N}), proportional to the channel-averaged MSE of the
// smoothed phase estimates. tr_predicted[0] repeats the k = 1 initialization
// (there is no prediction into the first slot).
struct SmootherTrace {
  Eigen::VectorXd tr_predicted;
  Eigen::VectorXd tr_filtered;
  Eigen::VectorXd tr_smoothed;
  double objective = 0.0;
  bool pseudo_inverse_used = false;  // singular prediction fallback hit

  // Populated only when keep_matrices is requested.
  std::vector<Eigen::MatrixXd> predicted;
  std::vector<Eigen::MatrixXd> filtered;
  std::vector<Eigen::MatrixXd> smoothed;
};

// Runs the forward/backward covariance recursions:
//   M_{k|k-1} = M_{k-1|k-1} + Q
//   M_{k|k}   = (I + M_{k|k-1} V_k)^{-1} M_{k|k-1}          k = 2..N
//   A_k       = M_{k|k} M_{k+1|k}^{-1}
//   M_{k|N}   = M_{k|k} + A_k (M_{k+1|N} - M_{k+1|k}) A_k^T  k = N-1..1
// initialized with M_{1|1} = diag(sigma~^2_{i,1} / Es). Every update is
// symmetrized. No randomness is involved.
SmootherTrace covariance_smoother(const MeasurementInfo& info, const SystemConfig& cfg,
                                  bool keep_matrices = false);
SmootherTrace covariance_smoother(const PilotMask& mask, const SystemConfig& cfg,
                                  bool keep_matrices = false);

// Objective-only fast path used as the optimization fitness.
double smoother_objective(const PilotMask& mask, const SystemConfig& cfg);

// CSV summary: columns k, tr_pred, tr_filt, tr_smooth (k is 1-based).
void write_trace_csv(const SmootherTrace& trace, std::ostream& out);

namespace detail {
// Forward pass shared with the state smoother. Fills the N filtered
// covariances as M x M column blocks of `filtered` (resized as needed) and
// the predicted traces; returns true if a pseudo-inverse fallback was hit.
bool forward_covariances(const MeasurementInfo& info, const Eigen::MatrixXd& Q,
                         double symbol_energy, Eigen::MatrixXd& filtered,
                         Eigen::VectorXd& tr_predicted);

// gain = filt * pred^{-1} for symmetric inputs; true when the LDLT path
// failed and the pseudo-inverse fallback was taken instead.
bool smoother_gain(const Eigen::Ref<const Eigen::MatrixXd>& filt,
                   const Eigen::MatrixXd& pred, Eigen::LDLT<Eigen::MatrixXd>& ldlt,
                   Eigen::MatrixXd& gain);
}  // namespace detail

}  // namespace pilotopt
