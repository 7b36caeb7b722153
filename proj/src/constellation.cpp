#include "pilotopt/constellation.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "pilotopt/csv.hpp"

namespace pilotopt {

namespace {
int gray_code(int x) { return x ^ (x >> 1); }
}  // namespace

Constellation make_constellation(int order, double symbol_energy) {
  if (order != 64 && order != 256 && order != 1024)
    throw std::invalid_argument("make_constellation: unsupported order " + std::to_string(order));
  if (!(symbol_energy > 0.0))
    throw std::invalid_argument("make_constellation: symbol_energy must be positive");

  Constellation c;
  c.order = order;
  c.bits_per_symbol = static_cast<int>(std::lround(std::log2(order)));
  c.symbol_energy = symbol_energy;
  c.points.resize(order);

  const int half = c.bits_per_symbol / 2;
  const int side = 1 << half;
  // Unnormalized levels -(side-1), ..., side-1 have mean square
  // (side^2 - 1)/3 per axis, hence 2*(order - 1)/3 per point.
  const double scale = std::sqrt(3.0 * symbol_energy / (2.0 * (order - 1)));
  for (int a = 0; a < side; ++a) {
    for (int b = 0; b < side; ++b) {
      const int label = (gray_code(a) << half) | gray_code(b);
      c.points[label] = {scale * (2 * a - side + 1), scale * (2 * b - side + 1)};
    }
  }
  return c;
}

void write_constellation_csv(const Constellation& c, std::ostream& out) {
  out << "label,re,im\n";
  for (int x = 0; x < c.order; ++x) {
    out << x << ',' << format_double(c.points[x].real(), 17) << ','
        << format_double(c.points[x].imag(), 17) << '\n';
  }
}

}  // namespace pilotopt
