#include <doctest.h>

#include "oracles.hpp"
#include "sweep/exact_sweep.hpp"
#include "sweep/fields.hpp"

using namespace sweep;

namespace {

HelmholtzProblem problem(int n, FieldKind field, Real alpha, int dim = 2) {
  const Real omega = 2 * std::numbers::pi * (n + 1) / 8.0;
  HelmholtzProblem p = make_problem(n, dim, omega, alpha, BoundaryMode::PmlAllSides);
  p.velocity = make_velocity(field, p.grid, omega);
  return p;
}

}  // namespace

TEST_CASE("exact sweep reproduces a dense direct solve") {
  std::mt19937_64 rng(11);
  for (int n : {15, 31})
    for (FieldKind field : {FieldKind::Constant, FieldKind::Lens})
      for (Real alpha : {0.0, 2.0}) {
        const HelmholtzProblem p = problem(n, field, alpha);
        const BlockTridiagonalSystem sys = assemble_global(p);
        const CVector f = oracle::random_vector(sys.size(), rng);
        const CVector ref = oracle::dense_solve(oracle::dense(sys.matrix), f);
        const CVector u = exact_solve(exact_factorize(sys), f);
        CHECK(oracle::rel_err(u, ref) <= 1e-10);
      }
}

TEST_CASE("T_m is the last block of the inverse of the leading m layers") {
  const HelmholtzProblem p = problem(11, FieldKind::Lens, 1.0);
  const BlockTridiagonalSystem sys = assemble_global(p);
  const ExactSweepFactorization fact(sys);
  const CMatrix a = oracle::dense(sys.matrix);
  const Index L = sys.layer_size;
  for (int m : {1, 4, 11}) {
    const CMatrix lead = a.topLeftCorner(m * L, m * L);
    const CMatrix inv = lead.inverse();
    const CMatrix ref = inv.bottomRightCorner(L, L);
    CHECK((fact.schur_inverse(m - 1) - ref).norm() <= 1e-10 * ref.norm());
  }
  // complex symmetry is inherited by every T_m
  for (int m = 0; m < fact.layers(); ++m) {
    const CMatrix& t = fact.schur_inverse(m);
    CHECK((t - t.transpose()).norm() <= 1e-10 * t.norm());
  }
}

TEST_CASE("exact sweep in 3D") {
  std::mt19937_64 rng(5);
  const HelmholtzProblem p = problem(7, FieldKind::Lens, 1.0, 3);
  const BlockTridiagonalSystem sys = assemble_global(p);
  const CVector f = oracle::random_vector(sys.size(), rng);
  const CVector ref = oracle::dense_solve(oracle::dense(sys.matrix), f);
  CHECK(oracle::rel_err(exact_factorize(sys).solve(f), ref) <= 1e-10);
}

TEST_CASE("exact sweep error paths") {
  const HelmholtzProblem p = problem(7, FieldKind::Constant, 0.0);
  BlockTridiagonalSystem sys = assemble_global(p);
  CHECK_THROWS_AS(exact_factorize(sys).solve(CVector::Zero(5)), ShapeError);

  sys.diag_blocks[2] = SparseMatrix(sys.layer_size, sys.layer_size);
  sys.couplings[1].setZero();
  try {
    exact_factorize(sys);
    FAIL("singular Schur complement not detected");
  } catch (const FactorizationError& e) {
    CHECK(e.where() == 2);
  }

  BlockTridiagonalSystem wide;
  wide.layer_size = ExactSweepFactorization::kMaxLayerSize + 1;
  CHECK_THROWS_AS(ExactSweepFactorization{wide}, DomainError);
}
