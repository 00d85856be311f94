#include "sweep/assembly.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace sweep {

namespace {

// Stretch factors sampled at grid points (index i -> i*h) and at half points
// (index i -> (i - 1/2) * h) for a contiguous index range.
struct AxisStretch {
  int lo = 1;
  std::vector<Complex> at_grid;  // i in [lo, hi]
  std::vector<Complex> at_half;  // i in [lo, hi + 1]

  AxisStretch(int lo_, int hi, Real h, const std::function<Real(Real)>& sigma,
              Complex omega_eff)
      : lo(lo_) {
    at_grid.reserve(hi - lo + 1);
    at_half.reserve(hi - lo + 2);
    for (int i = lo; i <= hi; ++i)
      at_grid.push_back(stretch_factor(sigma(i * h), omega_eff));
    for (int i = lo; i <= hi + 1; ++i)
      at_half.push_back(stretch_factor(sigma((i - 0.5) * h), omega_eff));
  }

  Complex grid(int i) const { return at_grid[i - lo]; }
  Complex half(int i) const { return at_half[i - lo]; }  // (i - 1/2) h
};

using Triplet = Eigen::Triplet<Complex, Index>;

}  // namespace

SparseMatrix assemble_slab(const HelmholtzProblem& problem, int lo, int hi,
                           const SweepSigma& sweep_sigma) {
  const Grid& g = problem.grid;
  if (lo < 1 || hi > g.n || lo > hi)
    throw IndexError("slab layers [" + std::to_string(lo) + ", " +
                     std::to_string(hi) + "] outside the grid");
  if (problem.velocity.size() != g.N)
    throw ShapeError("velocity sample count does not match the grid");

  const Complex w = problem.omega_eff();
  const Complex w2 = w * w;
  const Real inv_h2 = 1.0 / (g.h * g.h);
  const auto lateral = [&](Real x) {
    return sigma_profile(x, problem.pml, ProfileKind::TwoSided);
  };
  const AxisStretch st(1, g.n, g.h, lateral, w);
  const AxisStretch ss(lo, hi, g.h, sweep_sigma, w);

  const Index L = g.layer_size();
  const int depth = hi - lo + 1;
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(L * depth * (2 * g.dim + 1)));
  const int n = g.n;

  if (g.dim == 2) {
    for (int j = lo; j <= hi; ++j) {
      const Complex s2 = ss.grid(j);
      for (int i = 1; i <= n; ++i) {
        const Complex s1 = st.grid(i);
        const Index row = Index(j - lo) * L + (i - 1);
        const Complex west = inv_h2 * st.half(i) / s2;
        const Complex east = inv_h2 * st.half(i + 1) / s2;
        const Complex south = inv_h2 * ss.half(j) / s1;
        const Complex north = inv_h2 * ss.half(j + 1) / s1;
        const Real c = problem.velocity[g.flat(i, j)];
        const Complex diag = w2 / (s1 * s2 * c * c) - (west + east + south + north);
        trip.emplace_back(row, row, diag);
        if (i > 1) trip.emplace_back(row, row - 1, west);
        if (i < n) trip.emplace_back(row, row + 1, east);
        if (j > lo) trip.emplace_back(row, row - L, south);
        if (j < hi) trip.emplace_back(row, row + L, north);
      }
    }
  } else {
    for (int k = lo; k <= hi; ++k) {
      const Complex s3 = ss.grid(k);
      for (int j = 1; j <= n; ++j) {
        const Complex s2 = st.grid(j);
        for (int i = 1; i <= n; ++i) {
          const Complex s1 = st.grid(i);
          const Index row = Index(k - lo) * L + Index(j - 1) * n + (i - 1);
          const Complex x_lo = inv_h2 * st.half(i) / (s2 * s3);
          const Complex x_hi = inv_h2 * st.half(i + 1) / (s2 * s3);
          const Complex y_lo = inv_h2 * st.half(j) / (s1 * s3);
          const Complex y_hi = inv_h2 * st.half(j + 1) / (s1 * s3);
          const Complex z_lo = inv_h2 * ss.half(k) / (s1 * s2);
          const Complex z_hi = inv_h2 * ss.half(k + 1) / (s1 * s2);
          const Real c = problem.velocity[g.flat(i, j, k)];
          const Complex diag = w2 / (s1 * s2 * s3 * c * c) -
                               (x_lo + x_hi + y_lo + y_hi + z_lo + z_hi);
          trip.emplace_back(row, row, diag);
          if (i > 1) trip.emplace_back(row, row - 1, x_lo);
          if (i < n) trip.emplace_back(row, row + 1, x_hi);
          if (j > 1) trip.emplace_back(row, row - n, y_lo);
          if (j < n) trip.emplace_back(row, row + n, y_hi);
          if (k > lo) trip.emplace_back(row, row - L, z_lo);
          if (k < hi) trip.emplace_back(row, row + L, z_hi);
        }
      }
    }
  }

  SparseMatrix a(L * depth, L * depth);
  a.setFromTriplets(trip.begin(), trip.end());
  return a;
}

SweepSigma global_sweep_sigma(const HelmholtzProblem& problem) {
  const PmlConfig pml = problem.pml;
  const ProfileKind kind = problem.sweep_profile();
  return [pml, kind](Real x) { return sigma_profile(x, pml, kind); };
}

CVector BlockTridiagonalSystem::apply(const CVector& x) const {
  if (x.size() != size()) throw ShapeError("operator/vector size mismatch");
  return matrix * x;
}

BlockTridiagonalSystem assemble_global(const HelmholtzProblem& problem) {
  problem.validate();
  const Grid& g = problem.grid;
  BlockTridiagonalSystem sys;
  sys.dim = g.dim;
  sys.n = g.n;
  sys.layer_size = g.layer_size();
  sys.matrix = assemble_slab(problem, 1, g.n, global_sweep_sigma(problem));

  const Index L = sys.layer_size;
  std::vector<std::vector<Triplet>> blocks(g.n);
  sys.couplings.assign(g.n > 1 ? g.n - 1 : 0, CVector::Zero(L));
  for (Index row = 0; row < sys.matrix.outerSize(); ++row) {
    const Index layer = row / L;
    for (SparseMatrix::InnerIterator it(sys.matrix, row); it; ++it) {
      const Index col_layer = it.col() / L;
      if (col_layer == layer) {
        blocks[layer].emplace_back(row - layer * L, it.col() - layer * L, it.value());
      } else if (col_layer == layer - 1) {
        sys.couplings[col_layer][row - layer * L] = it.value();
      }
    }
  }
  sys.diag_blocks.reserve(g.n);
  for (auto& t : blocks) {
    SparseMatrix b(L, L);
    b.setFromTriplets(t.begin(), t.end());
    sys.diag_blocks.push_back(std::move(b));
  }
  return sys;
}

SweepSigma panel_sweep_sigma(const HelmholtzProblem& problem, const PanelSpec& spec) {
  const SweepSigma global = global_sweep_sigma(problem);
  const Real h = problem.grid.h;
  const Real eta = spec.ramp_layers * h;
  const Real C = problem.pml.C;
  const Real below_edge = (spec.bottom - 1) * h;
  const Real above_edge = (spec.top + 1) * h;
  const bool below = spec.ramp_below && spec.ramp_layers > 0;
  const bool above = spec.ramp_above && spec.ramp_layers > 0;
  return [=](Real x) {
    Real s = global(x);
    if (below && x - below_edge < eta) s = std::max(s, quadratic_ramp(x - below_edge, eta, C));
    if (above && above_edge - x < eta) s = std::max(s, quadratic_ramp(above_edge - x, eta, C));
    return s;
  };
}

PanelSystem assemble_panel(const HelmholtzProblem& problem, const PanelSpec& spec) {
  const int n = problem.grid.n;
  if (spec.bottom < 1 || spec.top > n || spec.bottom > spec.top)
    throw IndexError("panel layers [" + std::to_string(spec.bottom) + ", " +
                     std::to_string(spec.top) + "] outside the grid");
  if (spec.target_lo < spec.bottom || spec.target_hi > spec.top ||
      spec.target_lo > spec.target_hi)
    throw IndexError("panel targets must lie inside the panel");
  PanelSystem p;
  p.spec = spec;
  p.dim = problem.grid.dim;
  p.layer_size = problem.grid.layer_size();
  p.op = assemble_slab(problem, spec.bottom, spec.top, panel_sweep_sigma(problem, spec));
  p.perm = layer_major_permutation(p.layer_size, spec.depth());
  return p;
}

PanelSystem assemble_panel(const HelmholtzProblem& problem, int m, int depth,
                           int ramp_layers) {
  if (depth < 1 || m < depth)
    throw IndexError("panel anchor " + std::to_string(m) + " is shallower than depth " +
                     std::to_string(depth));
  if (m > problem.grid.n) throw IndexError("panel anchor beyond the last layer");
  PanelSpec spec;
  spec.bottom = m - depth + 1;
  spec.top = m;
  spec.target_lo = m;
  spec.target_hi = m;
  spec.ramp_layers = ramp_layers;
  spec.ramp_below = true;
  return assemble_panel(problem, spec);
}

std::vector<Index> layer_major_permutation(Index n, int depth) {
  std::vector<Index> perm(static_cast<std::size_t>(n * depth));
  for (Index i = 0; i < n; ++i)
    for (int j = 0; j < depth; ++j) perm[i * depth + j] = Index(j) * n + i;
  return perm;
}

std::vector<Index> invert_permutation(const std::vector<Index>& perm) {
  std::vector<Index> inv(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) inv[perm[k]] = static_cast<Index>(k);
  return inv;
}

Index bandwidth(const SparseMatrix& a) {
  Index bw = 0;
  for (Index row = 0; row < a.outerSize(); ++row)
    for (SparseMatrix::InnerIterator it(a, row); it; ++it)
      if (it.value() != Complex(0.0)) bw = std::max(bw, std::abs(it.col() - row));
  return bw;
}

SparseMatrix permute_symmetric(const SparseMatrix& a, const std::vector<Index>& perm) {
  if (static_cast<Index>(perm.size()) != a.rows())
    throw ShapeError("permutation length does not match matrix");
  const auto inv = invert_permutation(perm);
  std::vector<Triplet> trip;
  trip.reserve(a.nonZeros());
  for (Index row = 0; row < a.outerSize(); ++row)
    for (SparseMatrix::InnerIterator it(a, row); it; ++it)
      trip.emplace_back(inv[row], inv[it.col()], it.value());
  SparseMatrix b(a.rows(), a.cols());
  b.setFromTriplets(trip.begin(), trip.end());
  return b;
}

Real symmetry_defect(const SparseMatrix& a) {
  const SparseMatrix t = a.transpose();
  const SparseMatrix d = a - t;
  Real worst = 0.0;
  for (Index k = 0; k < d.nonZeros(); ++k) worst = std::max(worst, std::abs(d.valuePtr()[k]));
  return worst;
}

}  // namespace sweep
