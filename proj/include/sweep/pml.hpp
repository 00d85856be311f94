#pragma once

#include <cmath>
#include <numbers>

#include "sweep/core.hpp"

namespace sweep {

// Uniform Cartesian grid on the unit square/cube with n interior points per
// dimension and Dirichlet zero outside.
struct Grid {
  int n = 0;
  int dim = 2;
  Real h = 0.0;
  Index N = 0;

  Grid() = default;
  Grid(int n_, int dim_);

  Index layer_size() const { return dim == 2 ? Index(n) : Index(n) * n; }
  // 1-based grid indices to a layer-major (x1 fastest) flat index.
  Index flat(int i, int j) const { return Index(j - 1) * n + (i - 1); }
  Index flat(int i, int j, int k) const {
    return (Index(k - 1) * n + (j - 1)) * n + (i - 1);
  }
};

// PML width is stored both as a length (eta) and as a layer count (b); they
// always satisfy eta == b * h.
struct PmlConfig {
  Real eta = 0.0;
  Real C = 0.0;
  int b = 0;

  static PmlConfig with_layers(const Grid& grid, int b, Real C);
  // No damping at all: pure Dirichlet truncation. Test mode only.
  static PmlConfig none() { return {}; }
  bool disabled() const { return b == 0 && C == 0.0; }
  void validate(const Grid& grid) const;
};

enum class ProfileKind { TwoSided, OneSided };

// Damping constant giving a one-pass amplitude attenuation of 1e-3 for a
// normally incident plane wave: exp(-int_0^eta sigma) = exp(-C/3).
inline Real default_damping_constant() { return 3.0 * std::log(1000.0); }

// Layers needed for a PML one wavelength thick at frequency omega.
int default_pml_layers(const Grid& grid, Real omega);

// Quadratic ramp C/eta * ((s - eta)/eta)^2 for s in [0, eta], zero beyond.
// `s` is the distance from the outer (Dirichlet) edge of the layer.
Real quadratic_ramp(Real s, Real eta, Real C);

// The two damping profiles. Two-sided damps near t = 0 and t = 1; one-sided
// only near t = 0.
Real sigma_profile(Real t, const PmlConfig& cfg, ProfileKind kind);

// (1 + i sigma / omega_eff)^{-1}
Complex stretch_factor(Real sigma_val, Complex omega_eff);

enum class BoundaryMode { PmlThreeSidesDirichletTop, PmlAllSides };

struct HelmholtzProblem {
  Grid grid;
  Real omega = 0.0;
  Real alpha = 0.0;
  RVector velocity;
  PmlConfig pml;
  Real q = 0.0;
  BoundaryMode boundary = BoundaryMode::PmlAllSides;

  Complex omega_eff() const { return {omega, alpha}; }
  // Copy with a different complex shift; alpha = 0 is the physical operator.
  HelmholtzProblem shifted(Real new_alpha) const;
  // Damping profile on the sweep (last) axis of the global problem.
  ProfileKind sweep_profile() const {
    return boundary == BoundaryMode::PmlAllSides ? ProfileKind::TwoSided
                                                 : ProfileKind::OneSided;
  }
  void validate() const;
};

// Constant-velocity problem with default PML sizing; mostly for tests.
HelmholtzProblem make_problem(int n, int dim, Real omega, Real alpha,
                              BoundaryMode mode, int pml_layers = 0);

}  // namespace sweep
