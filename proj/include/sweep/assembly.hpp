#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "sweep/pml.hpp"

namespace sweep {

// Damping along the sweep axis as a function of the physical coordinate.
using SweepSigma = std::function<Real(Real)>;

// Discrete operator in layer form. Layers run along the last axis; within a
// layer points are ordered with x1 fastest.
struct BlockTridiagonalSystem {
  int dim = 2;
  int n = 0;
  Index layer_size = 0;
  // diag_blocks[m] is A_{m,m} (0-based m).
  std::vector<SparseMatrix> diag_blocks;
  // couplings[m] is the diagonal of A_{m+1,m} == A_{m,m+1}.
  std::vector<CVector> couplings;
  // The same operator as a single sparse matrix.
  SparseMatrix matrix;

  Index size() const { return layer_size * n; }
  CVector apply(const CVector& x) const;
};

// Placement of one panel along the sweep axis. Layers are 1-based and
// inclusive. A moving PML ramp, when present, starts at the given coordinate
// (the panel's Dirichlet edge) and spans `ramp_layers` grid spacings inward;
// outside the ramps the global sweep-axis damping is used.
struct PanelSpec {
  int bottom = 1;
  int top = 1;
  int target_lo = 1;
  int target_hi = 1;
  int ramp_layers = 0;
  bool ramp_below = false;
  bool ramp_above = false;

  int depth() const { return top - bottom + 1; }
  int targets() const { return target_hi - target_lo + 1; }
};

struct PanelSystem {
  PanelSpec spec;
  int dim = 2;
  Index layer_size = 0;
  // Layer-major (x1 fastest, sweep axis slowest) operator on the panel.
  SparseMatrix op;
  // perm[new] = old; groups each transversal position's column of layers.
  std::vector<Index> perm;

  int depth() const { return spec.depth(); }
  Index size() const { return layer_size * spec.depth(); }
};

// Assembles the operator on layers [lo, hi] with the given sweep-axis damping
// and Dirichlet zero outside. Transversal damping and velocity come from the
// problem; the shift is taken from problem.alpha.
SparseMatrix assemble_slab(const HelmholtzProblem& problem, int lo, int hi,
                           const SweepSigma& sweep_sigma);

SweepSigma global_sweep_sigma(const HelmholtzProblem& problem);

BlockTridiagonalSystem assemble_global(const HelmholtzProblem& problem);

SweepSigma panel_sweep_sigma(const HelmholtzProblem& problem, const PanelSpec& spec);

PanelSystem assemble_panel(const HelmholtzProblem& problem, const PanelSpec& spec);

// Single anchor form: layers m-depth+1 .. m with a moving ramp of
// `ramp_layers` layers at the bottom and layer m as the target.
PanelSystem assemble_panel(const HelmholtzProblem& problem, int m, int depth,
                           int ramp_layers);

std::vector<Index> layer_major_permutation(Index n, int depth);
std::vector<Index> invert_permutation(const std::vector<Index>& perm);

// Largest |row - col| over the structural nonzeros.
Index bandwidth(const SparseMatrix& a);
SparseMatrix permute_symmetric(const SparseMatrix& a, const std::vector<Index>& perm);

// max |A - A^t| over all entries.
Real symmetry_defect(const SparseMatrix& a);

}  // namespace sweep
