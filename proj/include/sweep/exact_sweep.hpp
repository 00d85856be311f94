#pragma once

#include <vector>

#include "sweep/assembly.hpp"

namespace sweep {

// Dense-Schur sweeping factorization of a block tridiagonal operator. Holds
// T_m = S_m^{-1} for every layer, where S_1 = A_{1,1} and
// S_m = A_{m,m} - A_{m,m-1} T_{m-1} A_{m-1,m}. Only meant for small layers.
class ExactSweepFactorization {
 public:
  static constexpr Index kMaxLayerSize = 512;

  explicit ExactSweepFactorization(const BlockTridiagonalSystem& system);

  const BlockTridiagonalSystem& system() const { return system_; }
  const CMatrix& schur_inverse(int m) const { return schur_inverses_.at(m); }
  int layers() const { return static_cast<int>(schur_inverses_.size()); }

  // u = A^{-1} f by forward elimination, diagonal solve and back
  // substitution; T_m u_m from the forward pass is reused by the diagonal pass.
  CVector solve(const CVector& f) const;

 private:
  BlockTridiagonalSystem system_;
  std::vector<CMatrix> schur_inverses_;
};

inline ExactSweepFactorization exact_factorize(const BlockTridiagonalSystem& system) {
  return ExactSweepFactorization(system);
}

inline CVector exact_solve(const ExactSweepFactorization& fact, const CVector& f) {
  return fact.solve(f);
}

}  // namespace sweep
