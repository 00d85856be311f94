#include "sweep/sweep_preconditioner.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include "sweep/exact_sweep.hpp"

namespace sweep {

std::string to_string(SweepMode mode) {
  return mode == SweepMode::TwoFront ? "two-front" : "single";
}

SweepMode parse_sweep_mode(const std::string& s) {
  if (s == "two-front" || s == "two") return SweepMode::TwoFront;
  if (s == "single" || s == "single-front") return SweepMode::SingleFront;
  throw DomainError("unknown sweep mode '" + s + "'");
}

void SweepConfig::validate() const {
  if (b < 2) throw DomainError("moving PML needs b >= 2");
  if (d < 1) throw DomainError("panel step d must be >= 1");
  if (buffer_layers < 0) throw DomainError("buffer_layers must be >= 0");
  if (!(alpha >= 0.0)) throw DomainError("alpha must be >= 0");
  if (leaf_size < 1 || threads < 1) throw DomainError("leaf_size and threads must be >= 1");
}

PanelSolver::PanelSolver(const PanelSystem& panel, int leaf_size)
    : banded_(panel.dim == 2),
      layer_size_(panel.layer_size),
      depth_(panel.depth()),
      first_target_(panel.spec.target_lo - panel.spec.bottom),
      targets_(panel.spec.targets()) {
  if (banded_) {
    const SparseMatrix permuted = permute_symmetric(panel.op, panel.perm);
    factor_ = BandedFactor(BandedMatrix::from_sparse(permuted, depth_, depth_));
  } else {
    const int side = static_cast<int>(std::lround(std::sqrt(double(layer_size_))));
    factor_ = MultifrontalFactor(panel.op, nested_dissection_order(side, side, depth_, leaf_size));
  }
}

Index PanelSolver::stored_values() const {
  return std::visit([](const auto& f) { return f.stored_values(); }, factor_);
}

CVector PanelSolver::apply(const CVector& g) const {
  if (g.size() != Index(targets_) * layer_size_) throw ShapeError("slab data size mismatch");
  CVector x = CVector::Zero(layer_size_ * depth_);
  for (int t = 0; t < targets_; ++t)
    for (Index p = 0; p < layer_size_; ++p)
      x[local_index(first_target_ + t, p)] = g[Index(t) * layer_size_ + p];
  std::visit([&](const auto& f) { f.solve_in_place(x); }, factor_);
  CVector out(g.size());
  for (int t = 0; t < targets_; ++t)
    for (Index p = 0; p < layer_size_; ++p)
      out[Index(t) * layer_size_ + p] = x[local_index(first_target_ + t, p)];
  return out;
}

namespace {

PanelSpec exact_panel(int lo, int hi) {
  PanelSpec s;
  s.bottom = s.target_lo = lo;
  s.top = s.target_hi = hi;
  return s;
}

PanelSpec upward_panel(int lo, int hi, const SweepConfig& c) {
  PanelSpec s;
  s.target_lo = lo;
  s.target_hi = hi;
  s.top = hi;
  s.bottom = std::max(1, lo - c.buffer_layers - (c.b - 1));
  s.ramp_layers = c.b;
  s.ramp_below = true;
  return s;
}

PanelSpec downward_panel(int lo, int hi, int n, const SweepConfig& c) {
  PanelSpec s;
  s.target_lo = lo;
  s.target_hi = hi;
  s.bottom = lo;
  s.top = std::min(n, hi + c.buffer_layers + (c.b - 1));
  s.ramp_layers = c.b;
  s.ramp_above = true;
  return s;
}

}  // namespace

SweepPlan plan_sweep(int n, const SweepConfig& c) {
  c.validate();
  SweepPlan plan;
  auto add = [&](int lo, int hi, PanelSpec spec) {
    plan.slabs.push_back({lo, hi, spec});
    return static_cast<int>(plan.slabs.size()) - 1;
  };

  if (c.mode == SweepMode::SingleFront) {
    if (n <= c.b) {
      plan.terminal = add(1, n, exact_panel(1, n));
      return plan;
    }
    std::vector<int> chain{add(1, c.b, exact_panel(1, c.b))};
    for (int lo = c.b + 1; lo <= n; lo += c.d) {
      const int hi = std::min(n, lo + c.d - 1);
      chain.push_back(add(lo, hi, upward_panel(lo, hi, c)));
    }
    plan.terminal = chain.back();
    chain.pop_back();
    plan.chains.push_back(std::move(chain));
    return plan;
  }

  if (n - 2 * c.b < 1) {
    plan.terminal = add(1, n, exact_panel(1, n));
    return plan;
  }
  std::vector<int> up{add(1, c.b, exact_panel(1, c.b))};
  std::vector<int> down{add(n - c.b + 1, n, exact_panel(n - c.b + 1, n))};
  int lo = c.b + 1, hi = n - c.b;
  bool up_turn = true;
  while (hi - lo + 1 > c.d) {
    if (up_turn) {
      up.push_back(add(lo, lo + c.d - 1, upward_panel(lo, lo + c.d - 1, c)));
      lo += c.d;
    } else {
      down.push_back(add(hi - c.d + 1, hi, downward_panel(hi - c.d + 1, hi, n, c)));
      hi -= c.d;
    }
    up_turn = !up_turn;
  }
  PanelSpec mid = upward_panel(lo, hi, c);
  mid.top = std::min(n, hi + c.buffer_layers + (c.b - 1));
  mid.ramp_above = true;
  plan.terminal = add(lo, hi, mid);
  plan.chains.push_back(std::move(up));
  plan.chains.push_back(std::move(down));
  return plan;
}

SweepPreconditioner::SweepPreconditioner(const HelmholtzProblem& problem,
                                         const SweepConfig& config)
    : config_(config),
      dim_(problem.grid.dim),
      n_(problem.grid.n),
      layer_size_(problem.grid.layer_size()) {
  const auto t0 = std::chrono::steady_clock::now();
  config_.validate();
  const HelmholtzProblem shifted = problem.shifted(config_.alpha);
  shifted.validate();
  plan_ = plan_sweep(n_, config_);

  {
    const BlockTridiagonalSystem sys = assemble_global(shifted);
    couplings_ = sys.couplings;
  }

  const std::size_t count = plan_.slabs.size();
  solvers_.resize(count);
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&](std::size_t k) {
    try {
      const PanelSystem panel = assemble_panel(shifted, plan_.slabs[k].panel);
      solvers_[k] = PanelSolver(panel, config_.leaf_size);
    } catch (const FactorizationError& e) {
      std::lock_guard lock(failure_mutex);
      if (!failure)
        failure = std::make_exception_ptr(FactorizationError(
            "panel at layers " + std::to_string(plan_.slabs[k].lo) + "-" +
                std::to_string(plan_.slabs[k].hi) + ": " + e.what(),
            plan_.slabs[k].lo));
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };
  const std::size_t workers = std::min<std::size_t>(config_.threads, count);
  if (workers <= 1) {
    for (std::size_t k = 0; k < count; ++k) work(k);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t k = w; k < count; k += workers) work(k);
      });
  }
  if (failure) std::rethrow_exception(failure);

  stats_.panel_count = static_cast<int>(count);
  for (std::size_t k = 0; k < count; ++k) {
    stats_.panel_stored_values.push_back(solvers_[k].stored_values());
    stats_.panel_depths.push_back(plan_.slabs[k].panel.depth());
  }
  stats_.build_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void SweepPreconditioner::check_layout(const CVector& f) const {
  if (f.size() != size()) throw ShapeError("vector does not match the preconditioner grid");
}

CVector SweepPreconditioner::apply(const CVector& f) const {
  check_layout(f);
  const Index L = layer_size_;
  CVector u = f;
  auto slab_of = [&](int s) {
    const auto& sl = plan_.slabs[s];
    return u.segment(Index(sl.lo - 1) * L, Index(sl.hi - sl.lo + 1) * L);
  };
  // Facing layers between a slab and the next one towards the terminal.
  struct Link {
    int own_layer, next_layer;
  };
  auto link = [&](int s, int next) {
    const auto& a = plan_.slabs[s];
    const auto& b = plan_.slabs[next];
    return a.hi < b.lo ? Link{a.hi, b.lo} : Link{a.lo, b.hi};
  };
  auto coupling = [&](const Link& k) -> const CVector& {
    return couplings_[std::min(k.own_layer, k.next_layer) - 1];
  };

  std::vector<CVector> cached(plan_.slabs.size());
  for (const auto& chain : plan_.chains)
    for (std::size_t k = 0; k < chain.size(); ++k) {
      const int s = chain[k];
      const int next = k + 1 < chain.size() ? chain[k + 1] : plan_.terminal;
      cached[s] = solvers_[s].apply(slab_of(s));
      const Link lk = link(s, next);
      const auto& sl = plan_.slabs[s];
      const CVector facing = cached[s].segment(Index(lk.own_layer - sl.lo) * L, L);
      u.segment(Index(lk.next_layer - 1) * L, L) -= coupling(lk).cwiseProduct(facing);
    }

  slab_of(plan_.terminal) = solvers_[plan_.terminal].apply(slab_of(plan_.terminal));
  for (const auto& chain : plan_.chains)
    for (int s : chain) slab_of(s) = cached[s];

  for (const auto& chain : plan_.chains)
    for (std::size_t k = chain.size(); k-- > 0;) {
      const int s = chain[k];
      const int next = k + 1 < chain.size() ? chain[k + 1] : plan_.terminal;
      const Link lk = link(s, next);
      const auto& sl = plan_.slabs[s];
      CVector r = CVector::Zero(Index(sl.hi - sl.lo + 1) * L);
      r.segment(Index(lk.own_layer - sl.lo) * L, L) =
          coupling(lk).cwiseProduct(u.segment(Index(lk.next_layer - 1) * L, L));
      slab_of(s) -= solvers_[s].apply(r);
    }
  return u;
}

nlohmann::json SweepPreconditioner::stats_json() const {
  nlohmann::json j;
  j["panel_count"] = stats_.panel_count;
  j["panel_stored_values"] = stats_.panel_stored_values;
  j["panel_depths"] = stats_.panel_depths;
  j["build_seconds"] = stats_.build_seconds;
  j["b"] = config_.b;
  j["d"] = config_.d;
  j["alpha"] = config_.alpha;
  j["sweep"] = to_string(config_.mode);
  j["buffer_layers"] = config_.buffer_layers;
  nlohmann::json slabs = nlohmann::json::array();
  for (const auto& s : plan_.slabs)
    slabs.push_back({{"targets", {s.lo, s.hi}}, {"panel", {s.panel.bottom, s.panel.top}}});
  j["slabs"] = slabs;
  j["terminal"] = plan_.terminal;
  j["middle_split"] = "floor";
  return j;
}

Real schur_approx_error(const HelmholtzProblem& problem, const SweepConfig& config, int m,
                        int probe_count, unsigned long long seed) {
  config.validate();
  const HelmholtzProblem shifted = problem.shifted(config.alpha);
  const int n = shifted.grid.n;
  if (m < 1 || m > n) throw IndexError("layer index outside the grid");
  if (shifted.grid.layer_size() > ExactSweepFactorization::kMaxLayerSize)
    throw DomainError("layer too large for the exact sweep oracle");
  const BlockTridiagonalSystem sys = assemble_global(shifted);
  const ExactSweepFactorization exact(sys);
  const CMatrix& T = exact.schur_inverse(m - 1);

  PanelSpec spec;
  spec.target_lo = spec.target_hi = spec.top = m;
  spec.bottom = std::max(1, m - config.buffer_layers - (config.b - 1));
  spec.ramp_layers = config.b;
  spec.ramp_below = true;
  const PanelSolver solver(assemble_panel(shifted, spec), config.leaf_size);

  std::mt19937_64 rng(seed);
  std::normal_distribution<Real> normal;
  Real worst = 0.0;
  for (int k = 0; k < probe_count; ++k) {
    CVector g(T.rows());
    for (Index i = 0; i < g.size(); ++i) g[i] = Complex(normal(rng), normal(rng));
    g.normalize();
    const CVector exact_v = T * g;
    const CVector approx = solver.apply(g);
    worst = std::max(worst, (approx - exact_v).norm() / exact_v.norm());
  }
  return worst;
}

}  // namespace sweep
