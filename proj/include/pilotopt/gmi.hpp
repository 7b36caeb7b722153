#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace pilotopt {

// Bit-metric-decoding GMI in bits per (complex) symbol:
//   GMI = m - (1/n_sym) * sum over all bits of log2(1 + exp(-(1-2b) * LLR)),
// clamped to [0, m]. b is the transmitted bit; positive LLR favors bit 0.
double estimate_gmi(const std::vector<double>& llrs, const std::vector<std::uint8_t>& bits,
                    int bits_per_symbol);

// Transmitted data bits in LLR order: slot-major, channels nested, MSB first.
// Label entries < 0 mark pilots and are skipped.
std::vector<std::uint8_t> data_bits(const Eigen::MatrixXi& labels, int bits_per_symbol);

}  // namespace pilotopt
