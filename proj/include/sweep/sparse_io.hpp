#pragma once

#include <iosfwd>
#include <string>

#include "sweep/core.hpp"

namespace sweep {

// Coordinate-list text format: an optional "% rows cols nnz" header, then one
// "i j re im" line per entry with 1-based indices. Other '%' lines are
// comments.
void write_coo(std::ostream& out, const SparseMatrix& a);
SparseMatrix read_coo(std::istream& in);

void write_coo_file(const std::string& path, const SparseMatrix& a);
SparseMatrix read_coo_file(const std::string& path);

}  // namespace sweep
