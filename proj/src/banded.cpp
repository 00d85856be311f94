#include "sweep/banded.hpp"

#include <algorithm>
#include <string>

namespace sweep {

BandedMatrix::BandedMatrix(Index size, int lower_bw, int upper_bw)
    : size_(size), kl_(lower_bw), ku_(upper_bw) {
  if (size < 0 || lower_bw < 0 || upper_bw < 0) throw DomainError("invalid band shape");
  data_.assign(static_cast<std::size_t>(ldab() * size), Complex(0.0));
}

BandedMatrix BandedMatrix::from_sparse(const SparseMatrix& a, int lower_bw, int upper_bw) {
  if (a.rows() != a.cols()) throw ShapeError("band matrix must be square");
  BandedMatrix b(a.rows(), lower_bw, upper_bw);
  for (Index row = 0; row < a.outerSize(); ++row)
    for (SparseMatrix::InnerIterator it(a, row); it; ++it) {
      if (!b.in_band(row, it.col())) {
        if (it.value() == Complex(0.0)) continue;
        throw ShapeError("entry (" + std::to_string(row) + ", " + std::to_string(it.col()) +
                         ") outside the declared band");
      }
      b.at(row, it.col()) = it.value();
    }
  return b;
}

BandedMatrix BandedMatrix::from_dense(const CMatrix& a, int lower_bw, int upper_bw) {
  if (a.rows() != a.cols()) throw ShapeError("band matrix must be square");
  BandedMatrix b(a.rows(), lower_bw, upper_bw);
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i) {
      if (b.in_band(i, j))
        b.at(i, j) = a(i, j);
      else if (a(i, j) != Complex(0.0))
        throw ShapeError("dense entry outside the declared band");
    }
  return b;
}

CVector BandedMatrix::multiply(const CVector& x) const {
  if (x.size() != size_) throw ShapeError("band multiply size mismatch");
  CVector y = CVector::Zero(size_);
  for (Index j = 0; j < size_; ++j) {
    const Index i0 = std::max<Index>(0, j - ku_);
    const Index i1 = std::min<Index>(size_ - 1, j + kl_);
    for (Index i = i0; i <= i1; ++i) y[i] += data_[slot(i, j)] * x[j];
  }
  return y;
}

CMatrix BandedMatrix::to_dense() const {
  CMatrix d = CMatrix::Zero(size_, size_);
  for (Index j = 0; j < size_; ++j)
    for (Index i = std::max<Index>(0, j - ku_); i <= std::min<Index>(size_ - 1, j + kl_); ++i)
      d(i, j) = data_[slot(i, j)];
  return d;
}

Real BandedMatrix::max_abs() const {
  Real m = 0.0;
  for (const auto& v : data_) m = std::max(m, std::abs(v));
  return m;
}

BandedFactor::BandedFactor(BandedMatrix matrix) : lu_(std::move(matrix)) {
  const Index n = lu_.size_;
  const int kl = lu_.kl_;
  const int kv = lu_.kl_ + lu_.ku_;
  const Index ld = lu_.ldab();
  Complex* ab = lu_.data_.data();
  const Real tol = 1e-13 * lu_.max_abs();
  pivots_.resize(n);

  // Element (i, j) of the working matrix, with U allowed to reach bandwidth kv.
  auto el = [&](Index i, Index j) -> Complex& { return ab[(kv + i - j) + j * ld]; };

  Index ju = 0;
  for (Index j = 0; j < n; ++j) {
    const Index km = std::min<Index>(kl, n - 1 - j);
    Index jp = 0;
    Real best = std::abs(el(j, j));
    for (Index t = 1; t <= km; ++t) {
      const Real v = std::abs(el(j + t, j));
      if (v > best) {
        best = v;
        jp = t;
      }
    }
    pivots_[j] = j + jp;
    if (!(best > tol))
      throw FactorizationError("zero pivot in band LU at row " + std::to_string(j), j);
    ju = std::max(ju, std::min<Index>(j + lu_.ku_ + jp, n - 1));
    if (jp != 0)
      for (Index c = j; c <= ju; ++c) std::swap(el(j + jp, c), el(j, c));
    if (km > 0) {
      const Complex inv = 1.0 / el(j, j);
      Complex* col = &el(j + 1, j);
      for (Index t = 0; t < km; ++t) col[t] *= inv;
      for (Index c = j + 1; c <= ju; ++c) {
        const Complex ujc = el(j, c);
        if (ujc == Complex(0.0)) continue;
        Complex* dst = &el(j + 1, c);
        for (Index t = 0; t < km; ++t) dst[t] -= col[t] * ujc;
      }
    }
  }
}

Complex BandedFactor::u_entry(Index i, Index j) const {
  const int kv = lu_.kl_ + lu_.ku_;
  if (i > j || j - i > kv) return 0.0;
  return lu_.data_[static_cast<std::size_t>((kv + i - j) + j * lu_.ldab())];
}

Complex BandedFactor::l_entry(Index i, Index j) const {
  const int kv = lu_.kl_ + lu_.ku_;
  if (i <= j || i - j > lu_.kl_) return 0.0;
  return lu_.data_[static_cast<std::size_t>((kv + i - j) + j * lu_.ldab())];
}

void BandedFactor::solve_in_place(Eigen::Ref<CVector> x) const {
  const Index n = lu_.size_;
  if (x.size() != n) throw ShapeError("band solve size mismatch");
  const int kl = lu_.kl_;
  const int kv = lu_.kl_ + lu_.ku_;
  const Index ld = lu_.ldab();
  const Complex* ab = lu_.data_.data();

  for (Index j = 0; j + 1 < n; ++j) {
    const Index lm = std::min<Index>(kl, n - 1 - j);
    const Index l = pivots_[j];
    if (l != j) std::swap(x[l], x[j]);
    const Complex xj = x[j];
    if (xj == Complex(0.0)) continue;
    const Complex* col = ab + (kv + 1) + j * ld;
    for (Index t = 0; t < lm; ++t) x[j + 1 + t] -= col[t] * xj;
  }
  for (Index j = n - 1; j >= 0; --j) {
    const Complex* col = ab + j * ld;  // col[kv + i - j] is U(i, j)
    x[j] /= col[kv];
    const Complex xj = x[j];
    if (xj == Complex(0.0)) continue;
    const Index i0 = std::max<Index>(0, j - kv);
    for (Index i = i0; i < j; ++i) x[i] -= col[kv + i - j] * xj;
  }
}

CVector BandedFactor::solve(const CVector& rhs) const {
  CVector x = rhs;
  solve_in_place(x);
  return x;
}

CMatrix BandedFactor::solve(const CMatrix& rhs) const {
  CMatrix x = rhs;
  for (Index c = 0; c < x.cols(); ++c) {
    CVector col = x.col(c);
    solve_in_place(col);
    x.col(c) = col;
  }
  return x;
}

}  // namespace sweep
