#include "pilotopt/covariance_smoother.hpp"

#include <ostream>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/QR>

#include "pilotopt/csv.hpp"

namespace pilotopt {

MeasurementInfo pilot_prior_info(const PilotMask& mask, const SystemConfig& cfg) {
  const int M = mask.num_channels();
  const int N = mask.block_length();
  MeasurementInfo info;
  info.effective_symbol.resize(M, N);
  info.effective_variance.resize(M, N);
  info.weight.resize(M, N);

  const double pilot_var = cfg.noise_psd / 2.0;
  const double data_var = (cfg.noise_psd + cfg.symbol_energy) / 2.0;
  const double pilot_weight = std::norm(cfg.pilot_point) / pilot_var;
  for (int k = 0; k < N; ++k) {
    for (int i = 0; i < M; ++i) {
      if (mask.at(i, k)) {
        info.effective_symbol(i, k) = cfg.pilot_point;
        info.effective_variance(i, k) = pilot_var;
        info.weight(i, k) = pilot_weight;
      } else {
        info.effective_symbol(i, k) = 0.0;
        info.effective_variance(i, k) = data_var;
        info.weight(i, k) = 0.0;
      }
    }
  }
  return info;
}

namespace detail {

bool smoother_gain(const Eigen::Ref<const Eigen::MatrixXd>& filt,
                   const Eigen::MatrixXd& pred,
                   Eigen::LDLT<Eigen::MatrixXd>& ldlt, Eigen::MatrixXd& gain) {
  ldlt.compute(pred);
  if (ldlt.info() == Eigen::Success) {
    gain = ldlt.solve(filt).transpose();
    if (gain.allFinite()) return false;
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(pred);
  gain = (cod.pseudoInverse() * filt).transpose();
  return true;
}

bool forward_covariances(const MeasurementInfo& info, const Eigen::MatrixXd& Q,
                         double symbol_energy, Eigen::MatrixXd& filtered,
                         Eigen::VectorXd& tr_predicted) {
  const int M = static_cast<int>(info.weight.rows());
  const int N = static_cast<int>(info.weight.cols());
  filtered.resize(M, static_cast<Eigen::Index>(M) * N);
  tr_predicted.resize(N);

  // M_{1|1} = diag(sigma~^2_{i,1} / Es); slot-1 measurements enter only here.
  filtered.leftCols(M).setZero();
  filtered.leftCols(M).diagonal() = info.effective_variance.col(0) / symbol_energy;
  tr_predicted(0) = filtered.leftCols(M).trace();

  Eigen::MatrixXd pred(M, M), gram(M, M), filt(M, M);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
  for (int k = 1; k < N; ++k) {
    pred = filtered.middleCols(static_cast<Eigen::Index>(k - 1) * M, M) + Q;
    tr_predicted(k) = pred.trace();
    const auto w = info.weight.col(k);
    if (w.maxCoeff() <= 0.0) {
      // No measurement in this slot: the filter passes the prediction through.
      filtered.middleCols(static_cast<Eigen::Index>(k) * M, M) = pred;
      continue;
    }
    gram.noalias() = pred * w.asDiagonal();
    gram += Eigen::MatrixXd::Identity(M, M);
    lu.compute(gram);
    filt = lu.solve(pred);
    filtered.middleCols(static_cast<Eigen::Index>(k) * M, M) =
        0.5 * (filt + filt.transpose());
  }
  return false;
}

}  // namespace detail

SmootherTrace covariance_smoother(const MeasurementInfo& info, const SystemConfig& cfg,
                                  bool keep_matrices) {
  const int M = cfg.num_channels;
  const int N = cfg.block_length;
  if (info.weight.rows() != M || info.weight.cols() != N)
    throw std::invalid_argument("covariance_smoother: info dimensions disagree with config");

  const Eigen::MatrixXd Q = build_process_noise_cov(cfg).matrix;

  SmootherTrace trace;
  Eigen::MatrixXd filtered;
  detail::forward_covariances(info, Q, cfg.symbol_energy, filtered, trace.tr_predicted);

  trace.tr_filtered.resize(N);
  trace.tr_smoothed.resize(N);
  for (int k = 0; k < N; ++k)
    trace.tr_filtered(k) = filtered.middleCols(static_cast<Eigen::Index>(k) * M, M).trace();

  if (keep_matrices) {
    trace.filtered.resize(N);
    trace.predicted.resize(N);
    trace.smoothed.assign(N, Eigen::MatrixXd());
    for (int k = 0; k < N; ++k) {
      trace.filtered[k] = filtered.middleCols(static_cast<Eigen::Index>(k) * M, M);
      trace.predicted[k] = k == 0 ? trace.filtered[0]
                                  : Eigen::MatrixXd(trace.filtered[k - 1] + Q);
    }
  }

  Eigen::MatrixXd smooth = filtered.rightCols(M);
  trace.tr_smoothed(N - 1) = smooth.trace();
  if (keep_matrices) trace.smoothed[N - 1] = smooth;

  Eigen::MatrixXd pred(M, M), gain(M, M), diff(M, M), cross(M, M), next(M, M);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
  for (int k = N - 2; k >= 0; --k) {
    const auto filt_k = filtered.middleCols(static_cast<Eigen::Index>(k) * M, M);
    pred = filt_k + Q;
    trace.pseudo_inverse_used |= detail::smoother_gain(filt_k, pred, ldlt, gain);
    diff = smooth - pred;
    cross.noalias() = gain * diff;
    next.noalias() = cross * gain.transpose();
    next += filt_k;
    smooth = 0.5 * (next + next.transpose()).eval();
    trace.tr_smoothed(k) = smooth.trace();
    if (keep_matrices) trace.smoothed[k] = smooth;
  }

  trace.objective = trace.tr_smoothed.sum();
  return trace;
}

SmootherTrace covariance_smoother(const PilotMask& mask, const SystemConfig& cfg,
                                  bool keep_matrices) {
  if (mask.num_channels() != cfg.num_channels || mask.block_length() != cfg.block_length)
    throw std::invalid_argument("covariance_smoother: mask dimensions disagree with config");
  return covariance_smoother(pilot_prior_info(mask, cfg), cfg, keep_matrices);
}

double smoother_objective(const PilotMask& mask, const SystemConfig& cfg) {
  return covariance_smoother(mask, cfg).objective;
}

void write_trace_csv(const SmootherTrace& trace, std::ostream& out) {
  out << "k,tr_pred,tr_filt,tr_smooth\n";
  for (Eigen::Index k = 0; k < trace.tr_smoothed.size(); ++k) {
    out << (k + 1) << ',' << format_double(trace.tr_predicted(k), 12) << ','
        << format_double(trace.tr_filtered(k), 12) << ','
        << format_double(trace.tr_smoothed(k), 12) << '\n';
  }
}

}  // namespace pilotopt
