// Plain-text matrix files. Line 1 is `rows cols field` with field R or C;
// each of the next `rows` lines holds `cols` whitespace-separated entries.
// Complex entries are written `re,im` with no spaces. Values are printed
// with 17 significant digits, which round-trips doubles exactly.

#pragma once

#include <iosfwd>
#include <string>

#include "matad/matrix.hpp"

namespace matad {

void write_mat(std::ostream& out, const Mat& m);
Mat read_mat(std::istream& in);

void write_mat_file(const std::string& path, const Mat& m);
Mat read_mat_file(const std::string& path);

/// One scalar with 17 significant digits; shared by matrix files and
/// machine-format reports so both are reproducible byte for byte.
std::string format_double(double v);

}  // namespace matad
