#include "pilotopt/state_smoother.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace pilotopt {

double wrap_angle(double x) { return std::remainder(x, 2.0 * std::numbers::pi); }

PhaseEstimates state_smoother(const Eigen::MatrixXcd& received,
                              const MeasurementInfo& info, const SystemConfig& cfg) {
  const int M = cfg.num_channels;
  const int N = cfg.block_length;
  if (received.rows() != M || received.cols() != N)
    throw std::invalid_argument("state_smoother: received block dimensions disagree with config");
  if (info.weight.rows() != M || info.weight.cols() != N)
    throw std::invalid_argument("state_smoother: info dimensions disagree with config");

  const Eigen::MatrixXd Q = build_process_noise_cov(cfg).matrix;
  Eigen::MatrixXd filt_cov;
  Eigen::VectorXd tr_pred;
  detail::forward_covariances(info, Q, cfg.symbol_energy, filt_cov, tr_pred);

  PhaseEstimates est;
  est.filtered.resize(M, N);

  // Slot 1 is absorbed by the initialization: channels with a known symbol
  // there start from the raw phase of the matched product, the rest at 0.
  for (int i = 0; i < M; ++i) {
    const std::complex<double> s = info.effective_symbol(i, 0);
    est.filtered(i, 0) =
        std::norm(s) > 0.0 ? std::arg(received(i, 0) * std::conj(s)) : 0.0;
  }

  Eigen::VectorXd theta = est.filtered.col(0);
  Eigen::VectorXd score(M);
  for (int k = 1; k < N; ++k) {
    for (int i = 0; i < M; ++i) {
      const std::complex<double> s = info.effective_symbol(i, k);
      if (std::norm(s) > 0.0) {
        const std::complex<double> rot =
            received(i, k) * std::conj(s) * std::polar(1.0, -theta(i));
        score(i) = rot.imag() / info.effective_variance(i, k);
      } else {
        score(i) = 0.0;
      }
    }
    theta += filt_cov.middleCols(static_cast<Eigen::Index>(k) * M, M) * score;
    est.filtered.col(k) = theta;
  }

  est.smoothed.resize(M, N);
  Eigen::VectorXd sm = est.filtered.col(N - 1);
  est.smoothed.col(N - 1) = sm;
  Eigen::MatrixXd pred(M, M), gain(M, M);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
  for (int k = N - 2; k >= 0; --k) {
    const auto filt_k = filt_cov.middleCols(static_cast<Eigen::Index>(k) * M, M);
    pred = filt_k + Q;
    est.pseudo_inverse_used |= detail::smoother_gain(filt_k, pred, ldlt, gain);
    // The predicted mean into slot k+1 equals the filtered mean at k.
    sm = est.filtered.col(k) + gain * (sm - est.filtered.col(k));
    est.smoothed.col(k) = sm;
  }
  return est;
}

double wrapped_mse(const Eigen::MatrixXd& estimate, const Eigen::MatrixXd& truth) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols())
    throw std::invalid_argument("wrapped_mse: shape mismatch");
  double acc = 0.0;
  for (Eigen::Index j = 0; j < estimate.cols(); ++j)
    for (Eigen::Index i = 0; i < estimate.rows(); ++i) {
      const double e = wrap_angle(estimate(i, j) - truth(i, j));
      acc += e * e;
    }
  return acc / static_cast<double>(estimate.size());
}

}  // namespace pilotopt
