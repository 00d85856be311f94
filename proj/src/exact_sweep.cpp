#include "sweep/exact_sweep.hpp"

#include <string>

namespace sweep {

namespace {

CMatrix invert_checked(const CMatrix& s, int layer) {
  const Real scale = s.cwiseAbs().maxCoeff();
  Eigen::PartialPivLU<CMatrix> lu(s);
  const Real min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(min_pivot > 1e-13 * scale))
    throw FactorizationError("singular Schur complement at layer " + std::to_string(layer + 1),
                             layer);
  return lu.inverse();
}

}  // namespace

ExactSweepFactorization::ExactSweepFactorization(const BlockTridiagonalSystem& system)
    : system_(system) {
  if (system.layer_size > kMaxLayerSize)
    throw DomainError("exact sweep oracle limited to layers of " +
                      std::to_string(kMaxLayerSize) + " points");
  schur_inverses_.reserve(system.n);
  for (int m = 0; m < system.n; ++m) {
    CMatrix s = CMatrix(system.diag_blocks[m]);
    if (m > 0) {
      const CVector& c = system.couplings[m - 1];
      s -= c.asDiagonal() * schur_inverses_.back() * c.asDiagonal();
    }
    schur_inverses_.push_back(invert_checked(s, m));
  }
}

CVector ExactSweepFactorization::solve(const CVector& f) const {
  const auto& sys = system_;
  if (f.size() != sys.size()) throw ShapeError("right-hand side does not match the system");
  const Index L = sys.layer_size;
  CVector u = f;
  std::vector<CVector> tu(sys.n);
  for (int m = 0; m < sys.n; ++m) {
    tu[m] = schur_inverses_[m] * u.segment(m * L, L);
    if (m + 1 < sys.n) u.segment((m + 1) * L, L) -= sys.couplings[m].cwiseProduct(tu[m]);
  }
  for (int m = 0; m < sys.n; ++m) u.segment(m * L, L) = tu[m];
  for (int m = sys.n - 2; m >= 0; --m) {
    const CVector rhs = sys.couplings[m].cwiseProduct(u.segment((m + 1) * L, L));
    u.segment(m * L, L) -= schur_inverses_[m] * rhs;
  }
  return u;
}

}  // namespace sweep
