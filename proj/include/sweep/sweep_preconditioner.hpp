#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "sweep/assembly.hpp"
#include "sweep/banded.hpp"
#include "sweep/multifrontal.hpp"

namespace sweep {

enum class SweepMode { SingleFront, TwoFront };

std::string to_string(SweepMode mode);
SweepMode parse_sweep_mode(const std::string& s);

struct SweepConfig {
  int b = 12;          // moving PML width in layers, also the front depth
  int d = 12;          // layers eliminated per step
  Real alpha = 2.0;    // shift of the operator the preconditioner factorizes
  SweepMode mode = SweepMode::TwoFront;
  int buffer_layers = 0;
  int leaf_size = 8;   // nested dissection leaves (3D panels)
  int threads = 1;     // panel factorizations run concurrently up to this

  void validate() const;
  static SweepConfig defaults_2d() { return {}; }
  static SweepConfig defaults_3d() {
    SweepConfig c;
    c.b = 6;
    c.d = 3;
    c.alpha = 1.0;
    return c;
  }
};

// Direct solver for one panel operator that maps data on the panel's target
// layers to the solution restricted to those layers, with zeros elsewhere on
// the right-hand side.
class PanelSolver {
 public:
  PanelSolver() = default;
  explicit PanelSolver(const PanelSystem& panel, int leaf_size = 8);

  Index layer_size() const { return layer_size_; }
  int depth() const { return depth_; }
  Index stored_values() const;
  // g has targets * layer_size entries, layer-major.
  CVector apply(const CVector& g) const;

 private:
  Index local_index(int layer, Index pos) const {
    return banded_ ? pos * depth_ + layer : Index(layer) * layer_size_ + pos;
  }

  bool banded_ = true;
  Index layer_size_ = 0;
  int depth_ = 0;
  int first_target_ = 0;  // local layer index
  int targets_ = 0;
  std::variant<BandedFactor, MultifrontalFactor> factor_;
};

// Layout of the elimination: slabs of consecutive layers, grouped into chains
// swept towards a terminal slab.
struct SweepPlan {
  struct Slab {
    int lo = 1, hi = 1;  // target layers, 1-based inclusive
    PanelSpec panel;
  };
  std::vector<Slab> slabs;
  // Each chain lists slab indices in elimination order; it feeds into the
  // terminal slab after its last entry.
  std::vector<std::vector<int>> chains;
  int terminal = 0;
};

SweepPlan plan_sweep(int n, const SweepConfig& config);

struct PreconditionerStats {
  int panel_count = 0;
  std::vector<Index> panel_stored_values;
  std::vector<int> panel_depths;
  double build_seconds = 0.0;
};

// Approximate block LDL^t inverse of the shifted operator built from moving
// PML panels. Immutable after construction; apply() is reentrant.
class SweepPreconditioner {
 public:
  SweepPreconditioner(const HelmholtzProblem& problem, const SweepConfig& config);

  const SweepConfig& config() const { return config_; }
  const SweepPlan& plan() const { return plan_; }
  const PreconditionerStats& stats() const { return stats_; }
  Index size() const { return layer_size_ * n_; }

  CVector apply(const CVector& f) const;
  // T~ for one slab, on data laid out over its target layers.
  CVector apply_slab(int slab, const CVector& g) const { return solvers_.at(slab).apply(g); }

  nlohmann::json stats_json() const;

 private:
  void check_layout(const CVector& f) const;

  SweepConfig config_;
  int dim_ = 2;
  int n_ = 0;
  Index layer_size_ = 0;
  SweepPlan plan_;
  std::vector<PanelSolver> solvers_;
  std::vector<CVector> couplings_;  // couplings_[p-1] joins layers p and p+1
  PreconditionerStats stats_;
};

inline SweepPreconditioner build(const HelmholtzProblem& problem, const SweepConfig& config) {
  return SweepPreconditioner(problem, config);
}

// max over random unit probes g of |T~_m g - T_m g| / |T_m g| at layer m
// (1-based), both operators taken from the problem shifted by config.alpha.
Real schur_approx_error(const HelmholtzProblem& problem, const SweepConfig& config, int m,
                        int probe_count, unsigned long long seed = 7);

}  // namespace sweep
