#include <doctest.h>

#include "oracles.hpp"
#include "sweep/banded.hpp"

using namespace sweep;

namespace {

CMatrix random_band(Index n, int kl, int ku, std::mt19937_64& rng, bool weak_diagonal) {
  std::normal_distribution<Real> d;
  CMatrix a = CMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = std::max<Index>(0, i - kl); j <= std::min<Index>(n - 1, i + ku); ++j)
      a(i, j) = Complex(d(rng), d(rng));
  // Tiny diagonals force row interchanges.
  if (weak_diagonal)
    for (Index i = 0; i < n; ++i) a(i, i) *= 1e-3;
  return a;
}

Real condition(const CMatrix& a) {
  const Eigen::JacobiSVD<CMatrix> svd(a);
  const auto& s = svd.singularValues();
  return s[0] / s[s.size() - 1];
}

}  // namespace

TEST_CASE("1000 random band systems against a dense solve") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> size(1, 60), bw(0, 6);
  int checked = 0, pivoted = 0;
  Real worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    // Random triangular-ish draws can be numerically singular; redraw those
    // so the comparison with the dense solve is meaningful.
    Index n;
    int kl, ku;
    CMatrix a;
    do {
      n = size(rng);
      kl = bw(rng);
      ku = bw(rng);
      a = random_band(n, kl, ku, rng, trial % 3 == 0);
    } while (condition(a) > 1e6);
    const CVector b = oracle::random_vector(n, rng);
    const CVector ref = oracle::dense_solve(a, b);
    const BandedFactor f = banded_factorize(BandedMatrix::from_dense(a, kl, ku));
    worst = std::max(worst, oracle::rel_err(banded_solve(f, b), ref));
    for (Index i = 0; i < n; ++i)
      if (f.pivots()[i] != i) {
        ++pivoted;
        break;
      }
    ++checked;
  }
  CHECK(checked == 1000);
  CHECK(pivoted > 300);
  CHECK(worst <= 1e-10);
}

TEST_CASE("Toeplitz tridiagonal factor has diagonal (k+1)/k") {
  const Index n = 40;
  BandedMatrix m(n, 1, 1);
  for (Index i = 0; i < n; ++i) {
    m.at(i, i) = 2.0;
    if (i > 0) m.at(i, i - 1) = -1.0;
    if (i + 1 < n) m.at(i, i + 1) = -1.0;
  }
  const BandedFactor f(m);
  for (Index k = 1; k <= n; ++k) {
    CHECK(f.pivots()[k - 1] == k - 1);
    CHECK(std::abs(f.u_entry(k - 1, k - 1) - Complex(Real(k + 1) / k)) < 1e-13);
    if (k > 1) CHECK(std::abs(f.l_entry(k - 1, k - 2) - Complex(-Real(k - 1) / k)) < 1e-13);
  }
}

TEST_CASE("determinant from the factor matches the dense determinant") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 12;
    const int kl = 1 + trial % 3, ku = 2;
    const CMatrix a = random_band(n, kl, ku, rng, true);
    const BandedFactor f(BandedMatrix::from_dense(a, kl, ku));
    Complex det = 1.0;
    for (Index i = 0; i < n; ++i) {
      det *= f.u_entry(i, i);
      if (f.pivots()[i] != i) det = -det;
      // fill stays within kl + ku above the diagonal
      for (Index j = i + kl + ku + 1; j < n; ++j) CHECK(f.u_entry(i, j) == Complex(0.0));
    }
    const Complex ref = a.determinant();
    CHECK(std::abs(det - ref) <= 1e-9 * std::abs(ref));
  }
}

TEST_CASE("band storage, products and shape checks") {
  std::mt19937_64 rng(3);
  const CMatrix a = random_band(25, 2, 3, rng, false);
  const BandedMatrix m = BandedMatrix::from_dense(a, 2, 3);
  CHECK(m.ldab() == 2 * 2 + 3 + 1);
  CHECK((m.to_dense() - a).norm() == 0.0);
  const CVector x = oracle::random_vector(25, rng);
  CHECK((m.multiply(x) - a * x).norm() <= 1e-12 * (a * x).norm());

  const SparseMatrix s = a.sparseView();
  CHECK((BandedMatrix::from_sparse(s, 2, 3).to_dense() - a).norm() == 0.0);
  CHECK_THROWS_AS(BandedMatrix::from_sparse(s, 1, 3), ShapeError);
  CHECK_THROWS_AS(BandedMatrix::from_dense(a, 2, 1), ShapeError);
  const BandedFactor f(m);
  CHECK(f.stored_values() == 25 * m.ldab());
  CHECK_THROWS_AS(f.solve(CVector(CVector::Zero(3))), ShapeError);

  const CMatrix rhs = CMatrix::Random(25, 4);
  CHECK((a * f.solve(rhs) - rhs).norm() <= 1e-10 * rhs.norm());
}

TEST_CASE("singular band matrix reports the failing row") {
  BandedMatrix m(5, 1, 1);
  for (Index i = 0; i < 5; ++i) m.at(i, i) = 1.0;
  m.at(3, 3) = 0.0;
  try {
    BandedFactor f(m);
    FAIL("zero pivot not detected");
  } catch (const FactorizationError& e) {
    CHECK(e.where() == 3);
  }
}
