#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sweep/core.hpp"

namespace sweep {

using LinearOperator = std::function<CVector(const CVector&)>;

struct SolveReport {
  int iterations = 0;
  // Relative preconditioned residual after each iteration; entry 0 is 1.
  std::vector<Real> residual_history;
  bool converged = false;
  bool breakdown = false;
  Real unpreconditioned_residual = -1.0;
  double setup_time = 0.0;
  double solve_time = 0.0;

  // Problem metadata.
  Real omega_over_2pi = 0.0;
  Real q = 0.0;
  int n = 0;
  int dim = 0;
  Index N = 0;
  int b = 0;
  int d = 0;
  Real alpha = 0.0;
  std::string field;
  std::string forcing;

  nlohmann::json to_json() const;
  std::string residual_csv() const;
};

struct GmresOptions {
  Real tol = 1e-3;
  int max_iter = 200;
  std::optional<int> restart;  // full memory when empty
  // Keep the basis orthonormality check around for tests.
  bool record_orthogonality = false;
};

struct GmresResult {
  CVector solution;
  SolveReport report;
  // max |<v_i, v_j> - delta_ij| over the final Arnoldi basis, when recorded.
  Real orthogonality_defect = 0.0;
};

// Left-preconditioned GMRES on M A u = M f with modified Gram-Schmidt and one
// conditional reorthogonalization pass.
GmresResult gmres_solve(const LinearOperator& apply_A, const LinearOperator& apply_M,
                        const CVector& f, const GmresOptions& options = {});

// |A u - f| / |f|
Real unpreconditioned_residual(const LinearOperator& apply_A, const CVector& u, const CVector& f);

}  // namespace sweep
