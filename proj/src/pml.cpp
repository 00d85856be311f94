#include "sweep/pml.hpp"

#include <algorithm>
#include <string>

namespace sweep {

Grid::Grid(int n_, int dim_) : n(n_), dim(dim_) {
  if (n < 1) throw DomainError("grid needs at least one interior point");
  if (dim != 2 && dim != 3) throw DomainError("grid dimension must be 2 or 3");
  h = 1.0 / (n + 1);
  N = dim == 2 ? Index(n) * n : Index(n) * n * n;
}

PmlConfig PmlConfig::with_layers(const Grid& grid, int b, Real C) {
  PmlConfig cfg{b * grid.h, C, b};
  cfg.validate(grid);
  return cfg;
}

void PmlConfig::validate(const Grid& grid) const {
  if (disabled()) return;
  if (b < 2) throw DomainError("PML needs at least 2 layers, got " + std::to_string(b));
  if (!(C > 0.0)) throw DomainError("PML damping constant must be positive");
  if (std::abs(eta - b * grid.h) > 1e-12 * std::max(1.0, eta))
    throw DomainError("PML width must equal b * h");
}

int default_pml_layers(const Grid& grid, Real omega) {
  const Real wavelength = 2.0 * std::numbers::pi / omega;
  return std::max(2, static_cast<int>(std::lround(wavelength / grid.h)));
}

Real quadratic_ramp(Real s, Real eta, Real C) {
  if (s >= eta) return 0.0;
  const Real r = (s - eta) / eta;
  return C / eta * r * r;
}

Real sigma_profile(Real t, const PmlConfig& cfg, ProfileKind kind) {
  if (!(t >= 0.0 && t <= 1.0))
    throw DomainError("sigma_profile: coordinate " + std::to_string(t) +
                      " outside [0,1]");
  if (t <= cfg.eta) return quadratic_ramp(t, cfg.eta, cfg.C);
  if (kind == ProfileKind::TwoSided && t >= 1.0 - cfg.eta)
    return quadratic_ramp(1.0 - t, cfg.eta, cfg.C);
  return 0.0;
}

Complex stretch_factor(Real sigma_val, Complex omega_eff) {
  return 1.0 / (1.0 + kI * sigma_val / omega_eff);
}

HelmholtzProblem HelmholtzProblem::shifted(Real new_alpha) const {
  HelmholtzProblem copy = *this;
  copy.alpha = new_alpha;
  return copy;
}

void HelmholtzProblem::validate() const {
  if (velocity.size() != grid.N)
    throw ShapeError("velocity has " + std::to_string(velocity.size()) +
                     " samples, grid needs " + std::to_string(grid.N));
  if (velocity.size() > 0 && !(velocity.minCoeff() > 0.0))
    throw DomainError("velocity samples must be positive");
  if (!(alpha >= 0.0)) throw DomainError("shift alpha must be nonnegative");
  if (!(omega > 0.0)) throw DomainError("omega must be positive");
  pml.validate(grid);
}

HelmholtzProblem make_problem(int n, int dim, Real omega, Real alpha,
                              BoundaryMode mode, int pml_layers) {
  HelmholtzProblem p;
  p.grid = Grid(n, dim);
  p.omega = omega;
  p.alpha = alpha;
  p.velocity = RVector::Ones(p.grid.N);
  const int b = pml_layers > 0 ? pml_layers : default_pml_layers(p.grid, omega);
  p.pml = PmlConfig::with_layers(p.grid, b, default_damping_constant());
  p.q = (n + 1) * 2.0 * std::numbers::pi / omega;
  p.boundary = mode;
  p.validate();
  return p;
}

}  // namespace sweep
