#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sweep/fields.hpp"
#include "sweep/gmres.hpp"
#include "sweep/sweep_preconditioner.hpp"

namespace sweep {

struct BenchmarkCase {
  FieldKind field = FieldKind::Lens;
  std::string field_path;  // for FieldKind::ExternalFile
  std::vector<ForcingKind> forcings{ForcingKind::PointSource, ForcingKind::WavePacket};
  Real omega_over_2pi = 16.0;
  Real q = 8.0;
  int dim = 2;
  BoundaryMode boundary = BoundaryMode::PmlAllSides;
  SweepConfig sweep = SweepConfig::defaults_2d();
  int pml_layers = 0;  // 0: one wavelength
  Real pml_C = default_damping_constant();
  Real tol = 1e-3;
  int max_iter = 100;
  std::optional<int> restart;
  std::uint64_t seed = 1;
  double memory_limit_gb = 8.0;

  // n = q * omega/2pi - 1, so that h = 1/(n+1) is exactly q points per
  // wavelength.
  int n() const;
  Real omega() const;
  void validate() const;

  nlohmann::json to_json() const;
  // Missing keys keep the values already in `base`.
  static BenchmarkCase from_json(const nlohmann::json& j, BenchmarkCase base);
  static BenchmarkCase from_json(const nlohmann::json& j);
};

struct CaseResult {
  std::vector<SolveReport> reports;  // one per forcing
  std::vector<CVector> solutions;
  double setup_time = 0.0;
  nlohmann::json preconditioner;
  int n = 0;
};

HelmholtzProblem make_case_problem(const BenchmarkCase& c);
double estimate_memory_gb(const BenchmarkCase& c);

CaseResult run_case(const BenchmarkCase& c);

enum class SweepKind { Omega, Q };

struct TableRow {
  Real omega_over_2pi = 0.0;
  Real q = 0.0;
  int n = 0;
  Index N = 0;
  double setup_time = 0.0;
  std::vector<int> iterations;
  std::vector<double> solve_times;
  std::vector<bool> converged;
  std::string error;
};

struct Table {
  std::vector<ForcingKind> forcings;
  std::vector<TableRow> rows;
  std::string to_csv() const;
};

// Runs the base case once per sweep value. Cases run on up to `workers`
// threads; rows come back in sweep order. A failing case becomes a row with
// the error text filled in.
Table run_table(SweepKind kind, const BenchmarkCase& base, const std::vector<Real>& values,
                int workers = 1);

// Raw grid dumps of the real and imaginary parts plus a JSON sidecar.
void write_solution(const std::string& dir, const std::string& stem, const Grid& grid,
                    const CVector& u, const nlohmann::json& meta);

}  // namespace sweep
