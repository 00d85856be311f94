#include "sweep/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>

namespace sweep {

int BenchmarkCase::n() const {
  return static_cast<int>(std::lround(q * omega_over_2pi)) - 1;
}

Real BenchmarkCase::omega() const { return 2.0 * std::numbers::pi * omega_over_2pi; }

void BenchmarkCase::validate() const {
  if (dim != 2 && dim != 3) throw DomainError("dim must be 2 or 3");
  if (!(omega_over_2pi > 0.0) || !(q > 0.0)) throw DomainError("omega and q must be positive");
  if (n() < 1) throw DomainError("q * omega/2pi too small for a grid");
  if (forcings.empty()) throw DomainError("at least one forcing is required");
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  sweep.validate();
}

namespace {

std::string boundary_name(BoundaryMode m) {
  return m == BoundaryMode::PmlAllSides ? "pml-all-sides" : "pml-three-sides-dirichlet-top";
}

BoundaryMode parse_boundary(const std::string& s) {
  if (s == "pml-all-sides") return BoundaryMode::PmlAllSides;
  if (s == "pml-three-sides-dirichlet-top") return BoundaryMode::PmlThreeSidesDirichletTop;
  throw DomainError("unknown boundary mode '" + s + "'");
}

}  // namespace

nlohmann::json BenchmarkCase::to_json() const {
  nlohmann::json j;
  j["field"] = to_string(field);
  j["field_version"] = kFieldFormulaVersion;
  if (!field_path.empty()) j["field_path"] = field_path;
  std::vector<std::string> fs;
  for (auto f : forcings) fs.push_back(to_string(f));
  j["forcings"] = fs;
  j["omega_over_2pi"] = omega_over_2pi;
  j["q"] = q;
  j["dim"] = dim;
  j["boundary"] = boundary_name(boundary);
  j["pml"] = {{"layers", pml_layers}, {"C", pml_C}};
  j["sweep"] = {{"b", sweep.b},
                {"d", sweep.d},
                {"alpha", sweep.alpha},
                {"mode", to_string(sweep.mode)},
                {"buffer_layers", sweep.buffer_layers},
                {"leaf_size", sweep.leaf_size},
                {"threads", sweep.threads}};
  j["tol"] = tol;
  j["max_iter"] = max_iter;
  if (restart) j["restart"] = *restart;
  j["seed"] = seed;
  j["memory_limit_gb"] = memory_limit_gb;
  return j;
}

BenchmarkCase BenchmarkCase::from_json(const nlohmann::json& j, BenchmarkCase c) {
  if (j.contains("dim")) {
    c.dim = j.at("dim").get<int>();
    if (!j.contains("sweep")) c.sweep = c.dim == 3 ? SweepConfig::defaults_3d() : SweepConfig::defaults_2d();
  }
  if (j.contains("field")) c.field = parse_field(j.at("field").get<std::string>());
  if (j.contains("field_version") && j.at("field_version").get<int>() != kFieldFormulaVersion)
    throw DomainError("config was written for velocity formula version " +
                      std::to_string(j.at("field_version").get<int>()));
  if (j.contains("field_path")) c.field_path = j.at("field_path").get<std::string>();
  if (j.contains("forcings")) {
    c.forcings.clear();
    for (const auto& f : j.at("forcings")) c.forcings.push_back(parse_forcing(f.get<std::string>()));
  }
  if (j.contains("omega_over_2pi")) c.omega_over_2pi = j.at("omega_over_2pi").get<Real>();
  if (j.contains("q")) c.q = j.at("q").get<Real>();
  if (j.contains("boundary")) c.boundary = parse_boundary(j.at("boundary").get<std::string>());
  if (j.contains("pml")) {
    const auto& p = j.at("pml");
    if (p.contains("layers")) c.pml_layers = p.at("layers").get<int>();
    if (p.contains("C")) c.pml_C = p.at("C").get<Real>();
  }
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    if (s.contains("b")) c.sweep.b = s.at("b").get<int>();
    if (s.contains("d")) c.sweep.d = s.at("d").get<int>();
    if (s.contains("alpha")) c.sweep.alpha = s.at("alpha").get<Real>();
    if (s.contains("mode")) c.sweep.mode = parse_sweep_mode(s.at("mode").get<std::string>());
    if (s.contains("buffer_layers")) c.sweep.buffer_layers = s.at("buffer_layers").get<int>();
    if (s.contains("leaf_size")) c.sweep.leaf_size = s.at("leaf_size").get<int>();
    if (s.contains("threads")) c.sweep.threads = s.at("threads").get<int>();
  }
  if (j.contains("tol")) c.tol = j.at("tol").get<Real>();
  if (j.contains("max_iter")) c.max_iter = j.at("max_iter").get<int>();
  if (j.contains("restart")) c.restart = j.at("restart").get<int>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("memory_limit_gb")) c.memory_limit_gb = j.at("memory_limit_gb").get<double>();
  return c;
}

BenchmarkCase BenchmarkCase::from_json(const nlohmann::json& j) {
  return from_json(j, BenchmarkCase{});
}

HelmholtzProblem make_case_problem(const BenchmarkCase& c) {
  c.validate();
  HelmholtzProblem p;
  p.grid = Grid(c.n(), c.dim);
  p.omega = c.omega();
  p.alpha = 0.0;
  p.q = c.q;
  p.boundary = c.boundary;
  const int layers = c.pml_layers > 0 ? c.pml_layers : default_pml_layers(p.grid, p.omega);
  p.pml = PmlConfig::with_layers(p.grid, layers, c.pml_C);
  p.velocity = make_velocity(c.field, p.grid, p.omega, c.seed, c.field_path);
  p.validate();
  return p;
}

double estimate_memory_gb(const BenchmarkCase& c) {
  const double n = c.n();
  const double depth = c.sweep.b + c.sweep.d - 1;
  const double panels = std::max(1.0, n / c.sweep.d);
  const double bytes_per = sizeof(Complex);
  double factor_values;
  if (c.dim == 2) {
    factor_values = panels * n * depth * (3.0 * depth + 1.0);
  } else {
    const double plane = n * depth;
    factor_values = panels * 6.0 * plane * plane;
  }
  const double N = c.dim == 2 ? n * n : n * n * n;
  const double krylov = (c.max_iter + 8.0) * N;
  return (factor_values + krylov + 12.0 * N) * bytes_per / 1e9;
}

CaseResult run_case(const BenchmarkCase& c) {
  c.validate();
  const double need = estimate_memory_gb(c);
  if (need > c.memory_limit_gb) {
    std::ostringstream msg;
    msg << "case needs an estimated " << need << " GB, above the " << c.memory_limit_gb
        << " GB limit";
    throw Error(msg.str());
  }
  const HelmholtzProblem problem = make_case_problem(c);
  const BlockTridiagonalSystem A = assemble_global(problem);

  const auto t0 = std::chrono::steady_clock::now();
  const SweepPreconditioner M(problem, c.sweep);
  CaseResult res;
  res.setup_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  res.preconditioner = M.stats_json();
  res.n = problem.grid.n;

  GmresOptions opt;
  opt.tol = c.tol;
  opt.max_iter = c.max_iter;
  opt.restart = c.restart;
  const LinearOperator apply_A = [&](const CVector& x) { return A.apply(x); };
  const LinearOperator apply_M = [&](const CVector& x) { return M.apply(x); };
  for (ForcingKind fk : c.forcings) {
    const CVector f = make_forcing(fk, problem.grid, problem.omega);
    GmresResult g = gmres_solve(apply_A, apply_M, f, opt);
    SolveReport& r = g.report;
    r.setup_time = res.setup_time;
    r.omega_over_2pi = c.omega_over_2pi;
    r.q = c.q;
    r.n = problem.grid.n;
    r.dim = c.dim;
    r.N = problem.grid.N;
    r.b = c.sweep.b;
    r.d = c.sweep.d;
    r.alpha = c.sweep.alpha;
    r.field = to_string(c.field);
    r.forcing = to_string(fk);
    res.reports.push_back(std::move(r));
    res.solutions.push_back(std::move(g.solution));
  }
  return res;
}

std::string Table::to_csv() const {
  std::ostringstream out;
  out << "omega_over_2pi,q,n,N,T_setup";
  for (auto f : forcings) out << ",N_iter_" << to_string(f) << ",T_solve_" << to_string(f);
  out << ",error\n";
  out.precision(6);
  for (const auto& r : rows) {
    out << r.omega_over_2pi << ',' << r.q << ',' << r.n << ',' << r.N << ',' << r.setup_time;
    for (std::size_t k = 0; k < forcings.size(); ++k) {
      if (k < r.iterations.size())
        out << ',' << r.iterations[k] << (r.converged[k] ? "" : "*") << ',' << r.solve_times[k];
      else
        out << ",,";
    }
    out << ',' << r.error << '\n';
  }
  return out.str();
}

Table run_table(SweepKind kind, const BenchmarkCase& base, const std::vector<Real>& values,
                int workers) {
  if (values.empty()) throw DomainError("sweep value list is empty");
  if (base.forcings.empty()) throw DomainError("at least one forcing is required");
  Table table;
  table.forcings = base.forcings;
  table.rows.resize(values.size());

  auto run_one = [&](std::size_t k) {
    BenchmarkCase c = base;
    if (kind == SweepKind::Omega)
      c.omega_over_2pi = values[k];
    else
      c.q = values[k];
    TableRow& row = table.rows[k];
    row.omega_over_2pi = c.omega_over_2pi;
    row.q = c.q;
    row.n = c.n();
    row.N = c.dim == 2 ? Index(row.n) * row.n : Index(row.n) * row.n * row.n;
    try {
      const CaseResult res = run_case(c);
      row.setup_time = res.setup_time;
      for (const auto& r : res.reports) {
        row.iterations.push_back(r.iterations);
        row.solve_times.push_back(r.solve_time);
        row.converged.push_back(r.converged);
      }
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  };

  const std::size_t pool = std::clamp<std::size_t>(workers, 1, values.size());
  if (pool == 1) {
    for (std::size_t k = 0; k < values.size(); ++k) run_one(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> threads;
    for (std::size_t w = 0; w < pool; ++w)
      threads.emplace_back([&] {
        for (std::size_t k = next++; k < values.size(); k = next++) run_one(k);
      });
  }
  return table;
}

void write_solution(const std::string& dir, const std::string& stem, const Grid& grid,
                    const CVector& u, const nlohmann::json& meta) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base = std::filesystem::path(dir) / stem;
  write_grid_file(base.string() + "_re.bin", grid.dim, grid.n, u.real());
  write_grid_file(base.string() + "_im.bin", grid.dim, grid.n, u.imag());
  nlohmann::json side = meta;
  side["dim"] = grid.dim;
  side["n"] = grid.n;
  side["h"] = grid.h;
  side["layout"] = "layer-major, x1 fastest, float64 little-endian after int64 dim, n";
  side["real_part"] = stem + "_re.bin";
  side["imag_part"] = stem + "_im.bin";
  std::ofstream(base.string() + ".json") << side.dump(2) << '\n';
}

}  // namespace sweep
