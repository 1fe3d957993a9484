#ifndef DDP_CSV_HPP
#define DDP_CSV_HPP

#include <ostream>
#include <string>

#include "ddp/tensor.hpp"

namespace ddp {

// Comma-separated numeric matrices, '.' decimal point, no header by default.
// Floats are written with 17 significant digits so that doubles round-trip
// bit-exactly.

std::string format_double(double v);

// Throws std::invalid_argument carrying "<path>, line <n>: <reason>" for
// malformed input.
Matrix read_csv_matrix(const std::string& path, bool skip_header = false);

void write_csv_matrix(std::ostream& out, const Matrix& m);
void write_csv_matrix(const std::string& path, const Matrix& m);

}  // namespace ddp

#endif
