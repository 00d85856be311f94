#include "sweep/sparse_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

namespace sweep {

void write_coo(std::ostream& out, const SparseMatrix& a) {
  out << "% " << a.rows() << ' ' << a.cols() << ' ' << a.nonZeros() << '\n';
  out << std::setprecision(17);
  for (Index row = 0; row < a.outerSize(); ++row)
    for (SparseMatrix::InnerIterator it(a, row); it; ++it)
      out << row + 1 << ' ' << it.col() + 1 << ' ' << it.value().real() << ' '
          << it.value().imag() << '\n';
}

SparseMatrix read_coo(std::istream& in) {
  std::vector<Eigen::Triplet<Complex, Index>> trip;
  Index rows = -1, cols = -1, max_r = 0, max_c = 0;
  std::string line;
  Index line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    if (line[0] == '%') {
      char pct;
      Index r, c, nnz;
      ss >> pct;
      if (rows < 0 && (ss >> r >> c >> nnz)) {
        rows = r;
        cols = c;
      }
      continue;
    }
    Index i, j;
    Real re, im;
    if (!(ss >> i >> j >> re >> im) || i < 1 || j < 1)
      throw ShapeError("malformed coordinate entry on line " + std::to_string(line_no));
    trip.emplace_back(i - 1, j - 1, Complex(re, im));
    max_r = std::max(max_r, i);
    max_c = std::max(max_c, j);
  }
  if (rows < 0) {
    rows = max_r;
    cols = max_c;
  }
  if (max_r > rows || max_c > cols) throw ShapeError("entry outside the declared shape");
  SparseMatrix a(rows, cols);
  a.setFromTriplets(trip.begin(), trip.end());
  return a;
}

void write_coo_file(const std::string& path, const SparseMatrix& a) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  write_coo(out, a);
}

SparseMatrix read_coo_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return read_coo(in);
}

}  // namespace sweep
