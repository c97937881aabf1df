#pragma once

#include <string>

#include "mpcg/csr.hpp"

namespace mpcg {

/// Writes A in Matrix Market coordinate format. When `symmetric` is set
/// only the lower triangle is stored (the matrix must actually be
/// symmetric). Values are printed with shortest round-trip formatting,
/// so read_matrix_market() recovers them bit for bit.
void write_matrix_market(const std::string& path, const CsrMatrix& a,
                         bool symmetric);

/// Reads a real coordinate Matrix Market file (general or symmetric;
/// symmetric input is expanded to full storage). Throws IoError on
/// missing files or malformed content.
CsrMatrix read_matrix_market(const std::string& path);

/// Plain-text vectors, one value per line.
void write_vector(const std::string& path, const DenseVector& v);
DenseVector read_vector(const std::string& path);

/// Shortest round-trip decimal form of a double (also used by the CSV
/// writers so reports are byte-stable).
std::string format_double(double x);

}  // namespace mpcg
