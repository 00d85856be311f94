#include <doctest.h>

#include <set>

#include "oracles.hpp"
#include "sweep/assembly.hpp"
#include "sweep/fields.hpp"
#include "sweep/multifrontal.hpp"

using namespace sweep;

TEST_CASE("nested dissection covers every position once, children first") {
  for (auto [nx, ny] : {std::pair{1, 1}, {7, 7}, {16, 9}, {31, 31}}) {
    const DissectionOrdering ord = nested_dissection_order(nx, ny, 3, 8);
    std::vector<int> seen(Index(nx) * ny, 0);
    for (std::size_t g = 0; g < ord.groups.size(); ++g) {
      for (Index p : ord.groups[g].positions) ++seen[p];
      for (int c : ord.groups[g].children) CHECK(c < int(g));
      if (ord.groups[g].parent >= 0) CHECK(ord.groups[g].parent > int(g));
      if (ord.groups[g].children.empty()) CHECK(ord.groups[g].positions.size() <= 8u);
    }
    for (int s : seen) CHECK(s == 1);

    // Grid neighbours always sit in the same group or in an ancestor chain.
    const auto grp = ord.position_groups();
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x) {
        const int a = grp[y * nx + x];
        for (auto [dx, dy] : {std::pair{1, 0}, {0, 1}}) {
          if (x + dx >= nx || y + dy >= ny) continue;
          const int b = grp[(y + dy) * nx + x + dx];
          CHECK((a == b || ord.is_ancestor(a, b) || ord.is_ancestor(b, a)));
        }
      }
  }
  CHECK_THROWS_AS(nested_dissection_order(0, 4, 1), DomainError);
}

TEST_CASE("fill stays on ancestor separators") {
  HelmholtzProblem p = make_problem(15, 3, 2 * std::numbers::pi * 2, 1.0, BoundaryMode::PmlAllSides);
  const PanelSystem panel = assemble_panel(p, 6, 4, 4);
  const DissectionOrdering ord = nested_dissection_order(15, 15, 4, 8);
  const auto structure = symbolic_structure(panel.op, ord);
  const auto grp = ord.position_groups();
  const Index plane = ord.num_positions();
  for (std::size_t g = 0; g < ord.groups.size(); ++g)
    for (Index u : structure[g]) CHECK(ord.is_ancestor(grp[u % plane], int(g)));

  const MultifrontalFactor f(panel.op, ord);
  const auto sizes = f.update_sizes();
  for (std::size_t g = 0; g < sizes.size(); ++g) CHECK(sizes[g] == Index(structure[g].size()));
  CHECK(sizes.back() == 0);
}

TEST_CASE("quasi-2D panels against a dense solve") {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> side(4, 15), thick(1, 6), leaf(1, 12);
  Real worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = side(rng), b = std::min(thick(rng), n);
    const Real omega = 2 * std::numbers::pi * (n + 1) / 8.0;
    HelmholtzProblem p = make_problem(n, 3, omega, 1.0, BoundaryMode::PmlAllSides, 2);
    p.velocity = make_velocity(FieldKind::Random, p.grid, omega, trial);
    const PanelSystem panel = assemble_panel(p, n, b, b);
    const DissectionOrdering ord = nested_dissection_order(n, n, b, leaf(rng));
    const MultifrontalFactor f = mf_factorize(panel.op, ord);
    const CVector rhs = oracle::random_vector(panel.size(), rng);
    const CVector ref = oracle::dense_solve(oracle::dense(panel.op), rhs);
    worst = std::max(worst, oracle::rel_err(mf_solve(f, rhs), ref));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("multifrontal error paths") {
  HelmholtzProblem p = make_problem(5, 3, 8.0, 1.0, BoundaryMode::PmlAllSides);
  const PanelSystem panel = assemble_panel(p, 3, 2, 2);
  CHECK_THROWS_AS(MultifrontalFactor(panel.op, nested_dissection_order(5, 5, 3)), ShapeError);
  const MultifrontalFactor f(panel.op, nested_dissection_order(5, 5, 2));
  CHECK_THROWS_AS(f.solve(CVector::Zero(4)), ShapeError);

  SparseMatrix zero(8, 8);
  CHECK_THROWS_AS(MultifrontalFactor(zero, nested_dissection_order(2, 2, 2)), FactorizationError);
}
