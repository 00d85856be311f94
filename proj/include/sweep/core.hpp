#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace sweep {

using Real = double;
using Complex = std::complex<double>;
using Index = std::int64_t;

using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor, Index>;

inline constexpr Complex kI{0.0, 1.0};

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

// Raised when a pivot falls below the singularity threshold. `where` is the
// layer, row or group index that failed, depending on the factorization.
class FactorizationError : public Error {
 public:
  FactorizationError(const std::string& what, Index where)
      : Error(what), where_(where) {}
  Index where() const noexcept { return where_; }

 private:
  Index where_;
};

}  // namespace sweep
