// sweepctl: benchmark driver for the moving-PML sweeping preconditioner.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sweep/bench.hpp"
#include "sweep/exact_sweep.hpp"

using namespace sweep;

namespace {

struct CommonFlags {
  std::string config;
  std::optional<int> dim;
  std::optional<double> omega;
  std::optional<double> q;
  std::optional<std::string> field;
  std::vector<std::string> forcings;
  std::optional<double> alpha;
  std::optional<int> pml_b;
  std::optional<int> panel_d;
  std::optional<std::string> sweep_mode;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::optional<int> max_iter;
  std::string out;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config, "JSON case file; flags override its keys");
  app->add_option("--dim", f.dim, "2 or 3")->check(CLI::IsMember({2, 3}));
  app->add_option("--omega", f.omega, "frequency omega/2pi");
  app->add_option("--q", f.q, "points per wavelength");
  app->add_option("--field", f.field, "lens | waveguide | random | constant | external-file:<path>");
  app->add_option("--forcing", f.forcings, "point-source | wave-packet (repeatable)");
  app->add_option("--alpha", f.alpha, "preconditioner shift");
  app->add_option("--pml-b", f.pml_b, "moving PML width in layers");
  app->add_option("--panel-d", f.panel_d, "layers eliminated per panel");
  app->add_option("--sweep", f.sweep_mode, "single | two-front");
  app->add_option("--tol", f.tol, "GMRES tolerance (default 1e-3)");
  app->add_option("--seed", f.seed, "random field seed");
  app->add_option("--max-iter", f.max_iter, "GMRES iteration cap");
  app->add_option("--out", f.out, "output directory");
}

BenchmarkCase resolve(const CommonFlags& f) {
  BenchmarkCase c;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw Error("cannot open " + f.config);
    c = BenchmarkCase::from_json(nlohmann::json::parse(in));
  }
  if (f.dim && *f.dim != c.dim) {
    c.dim = *f.dim;
    c.sweep = c.dim == 3 ? SweepConfig::defaults_3d() : SweepConfig::defaults_2d();
  }
  if (f.omega) c.omega_over_2pi = *f.omega;
  if (f.q) c.q = *f.q;
  if (f.field) {
    const std::string prefix = "external-file:";
    if (f.field->starts_with(prefix)) {
      c.field = FieldKind::ExternalFile;
      c.field_path = f.field->substr(prefix.size());
    } else {
      c.field = parse_field(*f.field);
    }
  }
  if (!f.forcings.empty()) {
    c.forcings.clear();
    for (const auto& s : f.forcings) c.forcings.push_back(parse_forcing(s));
  }
  if (f.alpha) c.sweep.alpha = *f.alpha;
  if (f.pml_b) c.sweep.b = *f.pml_b;
  if (f.panel_d) c.sweep.d = *f.panel_d;
  if (f.sweep_mode) c.sweep.mode = parse_sweep_mode(*f.sweep_mode);
  if (f.tol) c.tol = *f.tol;
  if (f.seed) c.seed = *f.seed;
  if (f.max_iter) c.max_iter = *f.max_iter;
  c.validate();
  return c;
}

void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p);
  if (!out) throw Error("cannot write " + p.string());
  out << s;
}

int cmd_solve(const CommonFlags& f, bool dump_fields) {
  const BenchmarkCase c = resolve(f);
  const CaseResult res = run_case(c);
  nlohmann::json all = nlohmann::json::array();
  for (std::size_t k = 0; k < res.reports.size(); ++k) {
    const auto& r = res.reports[k];
    std::cout << r.field << ' ' << r.forcing << ": n=" << r.n << " iterations=" << r.iterations
              << (r.converged ? "" : " (not converged)") << " setup=" << r.setup_time
              << "s solve=" << r.solve_time << "s residual=" << r.unpreconditioned_residual
              << '\n';
    all.push_back(r.to_json());
  }
  if (!f.out.empty()) {
    std::filesystem::create_directories(f.out);
    nlohmann::json doc{{"case", c.to_json()}, {"preconditioner", res.preconditioner},
                       {"reports", all}};
    write_text(std::filesystem::path(f.out) / "report.json", doc.dump(2) + "\n");
    for (std::size_t k = 0; k < res.reports.size(); ++k) {
      const auto& r = res.reports[k];
      write_text(std::filesystem::path(f.out) / ("residuals_" + r.forcing + ".csv"),
                 r.residual_csv());
      if (dump_fields) {
        const HelmholtzProblem p = make_case_problem(c);
        write_solution(f.out, "solution_" + r.forcing, p.grid, res.solutions[k], r.to_json());
      }
    }
  }
  for (const auto& r : res.reports)
    if (!r.converged) return 2;
  return 0;
}

int cmd_table(const CommonFlags& f, const std::string& kind, const std::vector<double>& values,
              int workers) {
  const BenchmarkCase c = resolve(f);
  const Table t = run_table(kind == "q" ? SweepKind::Q : SweepKind::Omega, c, values, workers);
  const std::string csv = t.to_csv();
  std::cout << csv;
  if (!f.out.empty()) {
    std::filesystem::create_directories(f.out);
    write_text(std::filesystem::path(f.out) / "table.csv", csv);
  }
  return 0;
}

int cmd_probe(const CommonFlags& f, const std::vector<int>& layers, int probes) {
  const BenchmarkCase c = resolve(f);
  const HelmholtzProblem p = make_case_problem(c);
  nlohmann::json rows = nlohmann::json::array();
  for (int m : layers) {
    const Real err = schur_approx_error(p, c.sweep, m, probes, c.seed);
    std::cout << "m=" << m << " b=" << c.sweep.b << " error=" << err << '\n';
    rows.push_back({{"m", m}, {"b", c.sweep.b}, {"error", err}});
  }
  if (!f.out.empty()) {
    std::filesystem::create_directories(f.out);
    write_text(std::filesystem::path(f.out) / "probe_schur.json", rows.dump(2) + "\n");
  }
  return 0;
}

int cmd_oracle(const CommonFlags& f) {
  const BenchmarkCase c = resolve(f);
  const HelmholtzProblem p = make_case_problem(c);
  if (p.grid.layer_size() > ExactSweepFactorization::kMaxLayerSize)
    throw DomainError("grid too large for the dense oracle");
  const HelmholtzProblem pa = p.shifted(c.sweep.alpha);
  const ExactSweepFactorization exact(assemble_global(pa));
  const SweepPreconditioner M(p, c.sweep);
  int status = 0;
  for (ForcingKind fk : c.forcings) {
    const CVector g = make_forcing(fk, p.grid, p.omega);
    const CVector ue = exact.solve(g);
    const CVector ua = M.apply(g);
    const Real err = (ua - ue).norm() / ue.norm();
    const Real res = unpreconditioned_residual(
        [&](const CVector& x) { return exact.system().apply(x); }, ue, g);
    std::cout << to_string(fk) << ": exact residual=" << res << " approximate vs exact=" << err
              << '\n';
    if (!(res < 1e-8)) status = 2;
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moving-PML sweeping preconditioner benchmarks"};
  app.require_subcommand(1);

  CommonFlags solve_f, table_f, probe_f, oracle_f;
  bool dump_fields = false;
  auto* solve = app.add_subcommand("solve", "run one case");
  add_common(solve, solve_f);
  solve->add_flag("--dump-fields", dump_fields, "write solution fields to --out");

  std::string kind = "omega";
  std::vector<double> values;
  int workers = 1;
  auto* table = app.add_subcommand("table", "run an omega or q sweep");
  add_common(table, table_f);
  table->add_option("--vary", kind, "omega | q")->check(CLI::IsMember({"omega", "q"}));
  table->add_option("--values", values, "sweep values")->required();
  table->add_option("--workers", workers, "cases run concurrently")->check(CLI::PositiveNumber);

  std::vector<int> layers;
  int probes = 8;
  auto* probe = app.add_subcommand("probe-schur", "measure the moving-PML Schur approximation");
  add_common(probe, probe_f);
  probe->add_option("--layer", layers, "layer index m (repeatable)")->required();
  probe->add_option("--probes", probes, "random probe vectors")->check(CLI::PositiveNumber);

  auto* oracle = app.add_subcommand("oracle-check", "compare against the dense sweeping oracle");
  add_common(oracle, oracle_f);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*solve) return cmd_solve(solve_f, dump_fields);
    if (*table) return cmd_table(table_f, kind, values, workers);
    if (*probe) return cmd_probe(probe_f, layers, probes);
    if (*oracle) return cmd_oracle(oracle_f);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
