#include "pilotopt/csv.hpp"

#include <cstdio>
#include <ostream>

namespace pilotopt {

std::string format_double(double v, int significant_digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", significant_digits, v);
  return buf;
}

void write_matrix_csv(const Eigen::MatrixXd& m, std::ostream& out) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << format_double(m(r, c), 17);
    }
    out << '\n';
  }
}

}  // namespace pilotopt
