#pragma once

#include <iosfwd>
#include <string>

#include <Eigen/Core>

namespace pilotopt {

// Shortest round-trip-safe decimal with the given significant digits ("%g").
std::string format_double(double v, int significant_digits);

// Row-major matrix dump, 17 significant digits, no header.
void write_matrix_csv(const Eigen::MatrixXd& m, std::ostream& out);

}  // namespace pilotopt
