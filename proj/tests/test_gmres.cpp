#include <doctest.h>

#include "oracles.hpp"
#include "sweep/exact_sweep.hpp"
#include "sweep/fields.hpp"
#include "sweep/gmres.hpp"
#include "sweep/sweep_preconditioner.hpp"

using namespace sweep;

namespace {

const LinearOperator identity = [](const CVector& x) { return x; };

void check_monotone(const SolveReport& r) {
  REQUIRE(r.residual_history.size() == std::size_t(r.iterations + 1));
  CHECK(r.residual_history.front() == 1.0);
  for (std::size_t k = 1; k < r.residual_history.size(); ++k)
    CHECK(r.residual_history[k] <= r.residual_history[k - 1] * (1 + 1e-12));
}

}  // namespace

TEST_CASE("identity converges in one step") {
  std::mt19937_64 rng(1);
  const CVector f = oracle::random_vector(50, rng);
  const GmresResult r = gmres_solve(identity, identity, f);
  CHECK(r.report.converged);
  CHECK(r.report.iterations == 1);
  CHECK((r.solution - f).norm() <= 1e-14 * f.norm());
}

TEST_CASE("exact diagonal preconditioner converges in one step") {
  CVector d(10);
  for (int i = 0; i < 10; ++i) d[i] = i + 1.0;
  const LinearOperator A = [&](const CVector& x) { return CVector(d.cwiseProduct(x)); };
  const LinearOperator M = [&](const CVector& x) { return CVector(x.cwiseQuotient(d)); };
  const CVector f = CVector::Ones(10);
  const GmresResult r = gmres_solve(A, M, f, {1e-12, 10});
  CHECK(r.report.iterations == 1);
  CHECK(r.report.converged);
  CHECK(unpreconditioned_residual(A, r.solution, f) <= 1e-12);
}

TEST_CASE("exact sweeping inverse as preconditioner") {
  std::mt19937_64 rng(2);
  const Real omega = 2 * std::numbers::pi * 4;
  HelmholtzProblem p = make_problem(31, 2, omega, 0.0, BoundaryMode::PmlAllSides);
  p.velocity = make_velocity(FieldKind::Lens, p.grid, omega);
  const BlockTridiagonalSystem A = assemble_global(p);
  const ExactSweepFactorization exact(A);
  const LinearOperator a = [&](const CVector& x) { return A.apply(x); };
  const LinearOperator m = [&](const CVector& x) { return exact.solve(x); };
  const CVector f = oracle::random_vector(A.size(), rng);
  const GmresResult r = gmres_solve(a, m, f, {1e-10, 10});
  CHECK(r.report.converged);
  CHECK(r.report.iterations <= 2);
  CHECK(r.report.unpreconditioned_residual <= 1e-8);
}

TEST_CASE("Arnoldi basis stays orthonormal and residuals never increase") {
  std::mt19937_64 rng(3);
  const Real omega = 2 * std::numbers::pi * 3;
  const HelmholtzProblem p = make_problem(23, 2, omega, 0.0, BoundaryMode::PmlAllSides);
  const BlockTridiagonalSystem A = assemble_global(p);
  const LinearOperator a = [&](const CVector& x) { return A.apply(x); };
  // Weak preconditioner so many iterations are needed.
  const LinearOperator m = [&](const CVector& x) { return CVector(x * (p.grid.h * p.grid.h)); };
  GmresOptions opt;
  opt.tol = 1e-8;
  opt.max_iter = 60;
  opt.record_orthogonality = true;
  const GmresResult r = gmres_solve(a, m, oracle::random_vector(A.size(), rng), opt);
  CHECK(r.report.iterations == 60);
  CHECK_FALSE(r.report.converged);
  CHECK(r.orthogonality_defect <= 1e-10);
  check_monotone(r.report);
}

TEST_CASE("restarted GMRES still converges") {
  CVector d(200);
  for (int i = 0; i < 200; ++i) d[i] = Complex(1.0 + i % 7, 0.1 * (i % 3));
  const LinearOperator A = [&](const CVector& x) { return CVector(d.cwiseProduct(x)); };
  GmresOptions opt;
  opt.tol = 1e-10;
  opt.max_iter = 100;
  opt.restart = 4;
  const GmresResult r = gmres_solve(A, identity, CVector::Ones(200), opt);
  CHECK(r.report.converged);
  CHECK(r.report.iterations > 4);
  CHECK(r.report.unpreconditioned_residual <= 1e-9);
}

TEST_CASE("gmres error handling and breakdown") {
  const CVector f = CVector::Ones(4);
  const LinearOperator shrink = [](const CVector& x) { return CVector(x.head(2)); };
  CHECK_THROWS_AS(gmres_solve(shrink, identity, f), ShapeError);
  CHECK_THROWS_AS(gmres_solve(identity, identity, f, {0.0, 5}), DomainError);

  const LinearOperator zero = [](const CVector& x) { return CVector(CVector::Zero(x.size())); };
  const GmresResult r = gmres_solve(zero, identity, f);
  CHECK(r.report.breakdown);
  CHECK_FALSE(r.report.converged);

  const GmresResult z = gmres_solve(identity, identity, CVector::Zero(4));
  CHECK(z.report.converged);
  CHECK(z.report.iterations == 0);
}

TEST_CASE("unpreconditioned residual") {
  const CVector f = CVector::Ones(6);
  CHECK(unpreconditioned_residual(identity, CVector::Zero(6), f) == doctest::Approx(1.0));
  CHECK(unpreconditioned_residual(identity, f, f) <= 1e-15);
}

TEST_CASE("report serialization") {
  SolveReport r;
  r.iterations = 2;
  r.residual_history = {1.0, 0.1, 0.0005};
  r.converged = true;
  r.field = "lens";
  const auto j = r.to_json();
  CHECK(j["iterations"] == 2);
  CHECK(j["residual_history"].size() == 3);
  CHECK(j["field"] == "lens");
  const std::string csv = r.residual_csv();
  CHECK(csv.rfind("iteration,relative_residual\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}
