#include <doctest.h>

#include "oracles.hpp"
#include "sweep/exact_sweep.hpp"
#include "sweep/fields.hpp"
#include "sweep/sweep_preconditioner.hpp"

using namespace sweep;

namespace {

// Every layer is targeted by exactly one slab, every panel fits in the grid
// and contains its targets, and each chain link joins facing slabs.
void check_plan(const SweepPlan& plan, int n) {
  std::vector<int> hits(n + 1, 0);
  for (const auto& s : plan.slabs) {
    for (int l = s.lo; l <= s.hi; ++l) ++hits[l];
    CHECK(s.panel.target_lo == s.lo);
    CHECK(s.panel.target_hi == s.hi);
    CHECK(s.panel.bottom >= 1);
    CHECK(s.panel.top <= n);
    CHECK(s.panel.bottom <= s.lo);
    CHECK(s.panel.top >= s.hi);
  }
  for (int l = 1; l <= n; ++l) CHECK(hits[l] == 1);
  for (const auto& chain : plan.chains)
    for (std::size_t k = 0; k < chain.size(); ++k) {
      const auto& a = plan.slabs[chain[k]];
      const auto& b = plan.slabs[k + 1 < chain.size() ? chain[k + 1] : plan.terminal];
      CHECK((a.hi + 1 == b.lo || b.hi + 1 == a.lo));
    }
}

HelmholtzProblem lens_problem(int n, int dim, int pml_layers) {
  const Real omega = 2 * std::numbers::pi * (n + 1) / 8.0;
  HelmholtzProblem p = make_problem(n, dim, omega, 0.0, BoundaryMode::PmlAllSides, pml_layers);
  p.velocity = make_velocity(FieldKind::Lens, p.grid, omega);
  return p;
}

}  // namespace

TEST_CASE("sweep plans") {
  SweepConfig c;
  c.b = 4;
  c.d = 3;
  for (auto mode : {SweepMode::SingleFront, SweepMode::TwoFront})
    for (int n : {1, 3, 4, 8, 9, 10, 11, 12, 31, 64}) {
      c.mode = mode;
      const SweepPlan plan = plan_sweep(n, c);
      check_plan(plan, n);
      if (mode == SweepMode::TwoFront && n - 2 * c.b >= 1) CHECK(plan.chains.size() == 2);
    }

  c.mode = SweepMode::TwoFront;
  const SweepPlan p = plan_sweep(31, c);
  // fronts of b layers at both ends
  CHECK(p.slabs[0].lo == 1);
  CHECK(p.slabs[0].hi == 4);
  CHECK(p.slabs[1].lo == 28);
  CHECK(p.slabs[1].hi == 31);
  // the terminal slab has a ramp on each side and at most d layers
  const auto& mid = p.slabs[p.terminal];
  CHECK(mid.panel.ramp_below);
  CHECK(mid.panel.ramp_above);
  CHECK(mid.hi - mid.lo + 1 <= c.d);

  c.mode = SweepMode::SingleFront;
  const SweepPlan s = plan_sweep(20, c);
  CHECK(s.chains.size() == 1);
  CHECK(s.slabs[s.terminal].hi == 20);
  CHECK(plan_sweep(4, c).slabs.size() == 1);

  CHECK_THROWS_AS(plan_sweep(10, SweepConfig{1, 3}), DomainError);
  CHECK_THROWS_AS(plan_sweep(10, SweepConfig{4, 0}), DomainError);
  CHECK(parse_sweep_mode("single") == SweepMode::SingleFront);
  CHECK_THROWS_AS(parse_sweep_mode("sideways"), DomainError);
}

TEST_CASE("full half-space panels reproduce the exact sweep") {
  std::mt19937_64 rng(1);
  const int n = 31;
  for (auto mode : {SweepMode::SingleFront, SweepMode::TwoFront}) {
    SweepConfig c;
    c.b = 6;
    c.d = 4;
    c.alpha = 2.0;
    c.mode = mode;
    c.buffer_layers = n;
    const HelmholtzProblem p = lens_problem(n, 2, c.b);
    const SweepPreconditioner M(p, c);
    const ExactSweepFactorization exact(assemble_global(p.shifted(c.alpha)));
    const CVector f = oracle::random_vector(p.grid.N, rng);
    CHECK(oracle::rel_err(M.apply(f), exact.solve(f)) <= 1e-10);
  }
}

TEST_CASE("full half-space panels reproduce the exact sweep in 3D") {
  std::mt19937_64 rng(2);
  const int n = 9;
  SweepConfig c = SweepConfig::defaults_3d();
  c.b = 3;
  c.d = 2;
  c.buffer_layers = n;
  const HelmholtzProblem p = lens_problem(n, 3, c.b);
  const SweepPreconditioner M(p, c);
  const ExactSweepFactorization exact(assemble_global(p.shifted(c.alpha)));
  const CVector f = oracle::random_vector(p.grid.N, rng);
  CHECK(oracle::rel_err(M.apply(f), exact.solve(f)) <= 1e-10);
}

TEST_CASE("panel solver agrees with a dense panel solve") {
  std::mt19937_64 rng(4);
  for (int dim : {2, 3}) {
    const int n = dim == 2 ? 31 : 7;
    const HelmholtzProblem p = lens_problem(n, dim, 3).shifted(1.0);
    PanelSpec spec{2, 7, 5, 6, 3, true, true};
    const PanelSystem panel = assemble_panel(p, spec);
    const PanelSolver solver(panel, 4);
    const Index L = panel.layer_size;
    const CVector g = oracle::random_vector(2 * L, rng);
    CVector rhs = CVector::Zero(panel.size());
    rhs.segment(3 * L, 2 * L) = g;
    const CVector full = oracle::dense_solve(oracle::dense(panel.op), rhs);
    CHECK(oracle::rel_err(solver.apply(g), full.segment(3 * L, 2 * L)) <= 1e-10);
    CHECK_THROWS_AS(solver.apply(CVector::Zero(L)), ShapeError);
  }
}

TEST_CASE("preconditioner apply is linear and deterministic") {
  std::mt19937_64 rng(8);
  const HelmholtzProblem p = lens_problem(63, 2, 0);
  SweepConfig c;
  const SweepPreconditioner M(p, c);
  const CVector x = oracle::random_vector(p.grid.N, rng);
  const CVector y = oracle::random_vector(p.grid.N, rng);
  const Complex a(0.3, -1.2), b(2.0, 0.5);
  const CVector lhs = M.apply(a * x + b * y);
  const CVector rhs = a * M.apply(x) + b * M.apply(y);
  CHECK((lhs - rhs).norm() <= 1e-12 * rhs.norm());
  CHECK(M.apply(x) == M.apply(x));

  c.threads = 2;
  const SweepPreconditioner M2(p, c);
  CHECK(M2.apply(x) == M.apply(x));
  CHECK_THROWS_AS(M.apply(CVector::Zero(5)), ShapeError);

  const auto stats = M.stats_json();
  CHECK(stats["panel_count"].get<int>() == int(M.plan().slabs.size()));
  CHECK(stats["middle_split"] == "floor");
}

TEST_CASE("wider moving PML approximates the Schur complement better") {
  const HelmholtzProblem p = lens_problem(63, 2, 0);
  SweepConfig wide, narrow;
  narrow.b = 4;
  for (int m : {30, 45}) {
    const Real e12 = schur_approx_error(p, wide, m, 6);
    const Real e4 = schur_approx_error(p, narrow, m, 6);
    CHECK(e12 <= e4);
    CHECK(e12 < 0.1);
  }
  CHECK_THROWS_AS(schur_approx_error(p, wide, 0, 2), IndexError);
}
