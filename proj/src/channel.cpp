#include "pilotopt/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "pilotopt/rng.hpp"

namespace pilotopt {

Eigen::MatrixXd sample_phase_trajectory(const ProcessNoiseCov& cov,
                                        int block_length, std::uint64_t seed) {
  if (block_length < 1)
    throw std::invalid_argument("sample_phase_trajectory: block_length must be >= 1");
  const int M = cov.num_channels();
  Rng rng(seed);

  Eigen::MatrixXd theta(M, block_length);
  for (int pair = 0; pair < M / 2; ++pair) {
    const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
    theta(2 * pair, 0) = phi;
    theta(2 * pair + 1, 0) = phi;
  }
  if (block_length == 1) return theta;

  // Symmetric square root of the (singular) covariance.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov.matrix);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("sample_phase_trajectory: eigendecomposition failed");
  Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd root =
      es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();

  Eigen::VectorXd z(M);
  for (int k = 1; k < block_length; ++k) {
    for (int i = 0; i < M; ++i) z(i) = rng.normal();
    theta.col(k) = theta.col(k - 1) + root * z;
  }
  return theta;
}

SymbolBlock generate_symbol_block(const PilotMask& mask, const Constellation& c,
                                  std::complex<double> pilot_point,
                                  std::uint64_t seed) {
  const int M = mask.num_channels();
  const int N = mask.block_length();
  Rng rng(seed);

  SymbolBlock block;
  block.symbols.resize(M, N);
  block.labels.resize(M, N);
  for (int k = 0; k < N; ++k) {
    for (int i = 0; i < M; ++i) {
      if (mask.at(i, k)) {
        block.symbols(i, k) = pilot_point;
        block.labels(i, k) = -1;
      } else {
        const int label = static_cast<int>(rng.uniform_int(0, c.order - 1));
        block.symbols(i, k) = c.points[label];
        block.labels(i, k) = label;
      }
    }
  }
  return block;
}

Eigen::MatrixXcd transmit(const Eigen::MatrixXcd& symbols,
                          const Eigen::MatrixXd& theta, double noise_psd,
                          std::uint64_t seed) {
  if (symbols.rows() != theta.rows() || symbols.cols() != theta.cols())
    throw std::invalid_argument("transmit: symbol/phase dimensions disagree");
  if (noise_psd < 0.0) throw std::invalid_argument("transmit: noise_psd must be >= 0");
  Rng rng(seed);

  Eigen::MatrixXcd r(symbols.rows(), symbols.cols());
  for (Eigen::Index k = 0; k < symbols.cols(); ++k) {
    for (Eigen::Index i = 0; i < symbols.rows(); ++i) {
      const std::complex<double> rot{std::cos(theta(i, k)), std::sin(theta(i, k))};
      r(i, k) = symbols(i, k) * rot + rng.complex_normal(noise_psd / 2.0);
    }
  }
  return r;
}

}  // namespace pilotopt
