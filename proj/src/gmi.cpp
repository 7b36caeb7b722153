#include "pilotopt/gmi.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pilotopt {

namespace {

// log(1 + e^t) without overflow.
double softplus(double t) {
  if (t > 0.0) return t + std::log1p(std::exp(-t));
  return std::log1p(std::exp(t));
}

}  // namespace

double estimate_gmi(const std::vector<double>& llrs, const std::vector<std::uint8_t>& bits,
                    int bits_per_symbol) {
  if (llrs.size() != bits.size())
    throw std::invalid_argument("estimate_gmi: LLR / bit count mismatch");
  if (bits_per_symbol <= 0 || llrs.size() % bits_per_symbol != 0)
    throw std::invalid_argument("estimate_gmi: bit count not a multiple of bits_per_symbol");
  if (llrs.empty()) return 0.0;

  // Kahan-compensated, index order, so the result is independent of how the
  // caller parallelized the LLR production.
  double sum = 0.0, comp = 0.0;
  for (size_t i = 0; i < llrs.size(); ++i) {
    const double sign = bits[i] ? 1.0 : -1.0;  // -(1-2b)
    const double term = softplus(sign * llrs[i]) - comp;
    const double t = sum + term;
    comp = (t - sum) - term;
    sum = t;
  }
  const double n_sym = static_cast<double>(llrs.size() / bits_per_symbol);
  const double m = static_cast<double>(bits_per_symbol);
  const double gmi = m - sum / (n_sym * std::numbers::ln2);
  return std::clamp(gmi, 0.0, m);
}

std::vector<std::uint8_t> data_bits(const Eigen::MatrixXi& labels, int bits_per_symbol) {
  std::vector<std::uint8_t> bits;
  bits.reserve(static_cast<size_t>(labels.size()) * bits_per_symbol);
  for (Eigen::Index k = 0; k < labels.cols(); ++k)
    for (Eigen::Index i = 0; i < labels.rows(); ++i) {
      const int label = labels(i, k);
      if (label < 0) continue;
      for (int b = 0; b < bits_per_symbol; ++b)
        bits.push_back(static_cast<std::uint8_t>((label >> (bits_per_symbol - 1 - b)) & 1));
    }
  return bits;
}

}  // namespace pilotopt
