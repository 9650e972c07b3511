#pragma once

#include <string>

#include "spikedeig/types.hpp"

namespace spikedeig {

// CSV layout: first line "rows,cols", then one line per row with
// comma-separated values printed with 17 significant digits.
//
// Binary layout (little-endian):
//   bytes 0-7   magic "SPKDMAT1"
//   bytes 8-15  rows as uint64
//   bytes 16-23 cols as uint64
//   then rows * cols IEEE-754 float64 values, row-major.
//
// Failures throw Error(Io).
void write_matrix_csv(const std::string& path, const Matrix& m);
void write_matrix_binary(const std::string& path, const Matrix& m);
Matrix read_matrix_csv(const std::string& path);
Matrix read_matrix_binary(const std::string& path);

// Dispatches on the magic bytes.
Matrix read_matrix(const std::string& path);

}  // namespace spikedeig
