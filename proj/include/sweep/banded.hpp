#pragma once

#include <vector>

#include "sweep/core.hpp"

namespace sweep {

// Square complex band matrix in packed column-major storage with kl extra
// rows of headroom above the upper band for fill from row interchanges.
// Entry (i, j) lives at band row kl + ku + i - j of column j.
class BandedMatrix {
 public:
  BandedMatrix() = default;
  BandedMatrix(Index size, int lower_bw, int upper_bw);

  static BandedMatrix from_sparse(const SparseMatrix& a, int lower_bw, int upper_bw);
  static BandedMatrix from_dense(const CMatrix& a, int lower_bw, int upper_bw);

  Index size() const { return size_; }
  int lower_bw() const { return kl_; }
  int upper_bw() const { return ku_; }
  int ldab() const { return 2 * kl_ + ku_ + 1; }

  bool in_band(Index i, Index j) const { return j - i <= ku_ && i - j <= kl_; }
  Complex& at(Index i, Index j) { return data_[slot(i, j)]; }
  Complex at(Index i, Index j) const { return in_band(i, j) ? data_[slot(i, j)] : Complex(0.0); }

  CVector multiply(const CVector& x) const;
  CMatrix to_dense() const;
  Real max_abs() const;

 private:
  friend class BandedFactor;
  std::size_t slot(Index i, Index j) const {
    return static_cast<std::size_t>((kl_ + ku_ + i - j) + j * ldab());
  }

  Index size_ = 0;
  int kl_ = 0;
  int ku_ = 0;
  std::vector<Complex> data_;
};

// PA = LU with partial pivoting inside the band. After factorization U has
// upper bandwidth at most kl + ku. Immutable once built.
class BandedFactor {
 public:
  BandedFactor() = default;
  explicit BandedFactor(BandedMatrix matrix);

  Index size() const { return lu_.size_; }
  int lower_bw() const { return lu_.kl_; }
  int upper_bw() const { return lu_.ku_; }
  // Number of stored complex values in the factor.
  Index stored_values() const { return static_cast<Index>(lu_.data_.size()); }
  const std::vector<Index>& pivots() const { return pivots_; }
  Complex u_entry(Index i, Index j) const;
  Complex l_entry(Index i, Index j) const;  // multiplier below the diagonal

  CVector solve(const CVector& rhs) const;
  void solve_in_place(Eigen::Ref<CVector> x) const;
  CMatrix solve(const CMatrix& rhs) const;

 private:
  BandedMatrix lu_;
  std::vector<Index> pivots_;
};

inline BandedFactor banded_factorize(BandedMatrix matrix) { return BandedFactor(std::move(matrix)); }
inline CVector banded_solve(const BandedFactor& f, const CVector& rhs) { return f.solve(rhs); }

}  // namespace sweep
