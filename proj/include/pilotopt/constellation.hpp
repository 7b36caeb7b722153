#pragma once

#include <complex>
#include <iosfwd>
#include <vector>

namespace pilotopt {

// Square QAM constellation with per-axis Gray labeling. points[x] is the
// point whose label is the integer x; bit b (MSB first) of a label is
// (x >> (bits_per_symbol - 1 - b)) & 1. The high half of the label Gray-codes
// the in-phase level, the low half the quadrature level, so points adjacent
// along either axis differ in exactly one bit.
struct Constellation {
  int order = 0;
  int bits_per_symbol = 0;
  double symbol_energy = 0.0;
  std::vector<std::complex<double>> points;

  int bit_of(int label, int bit) const {
    return (label >> (bits_per_symbol - 1 - bit)) & 1;
  }
};

// Supported orders: 64, 256, 1024. Zero mean, average energy symbol_energy.
Constellation make_constellation(int order, double symbol_energy);

// CSV export for inspection: header then one "re,im" row per label,
// 17 significant digits.
void write_constellation_csv(const Constellation& c, std::ostream& out);

}  // namespace pilotopt
