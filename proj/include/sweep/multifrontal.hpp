#pragma once

#include <vector>

#include "sweep/core.hpp"

namespace sweep {

// Hierarchical partition of an nx-by-ny plane of positions, each carrying a
// column of `depth` unknowns. Unknown (position p, layer l) has flat index
// l * nx * ny + p with p = y * nx + x.
struct DissectionOrdering {
  struct Box {
    int x0 = 0, x1 = 0, y0 = 0, y1 = 0;  // half-open
  };
  struct Group {
    std::vector<Index> positions;
    int parent = -1;
    std::vector<int> children;
    bool separator = false;
    int level = 0;
    Box box;  // for a separator, the box it splits
  };

  int nx = 0;
  int ny = 0;
  int depth = 1;
  // Groups in elimination order; children always precede their parent.
  std::vector<Group> groups;

  Index num_positions() const { return Index(nx) * ny; }
  Index num_unknowns() const { return num_positions() * depth; }
  std::vector<Index> unknowns(int g) const;
  bool is_ancestor(int ancestor, int g) const;
  // group_of[position]
  std::vector<int> position_groups() const;
};

// Recursive bisection by separator lines, longer axis first; boxes with at
// most leaf_size positions become leaves.
DissectionOrdering nested_dissection_order(int nx, int ny, int depth, int leaf_size = 8);

// Per group, the not-yet-eliminated unknowns its elimination couples to.
std::vector<std::vector<Index>> symbolic_structure(const SparseMatrix& a,
                                                   const DissectionOrdering& ordering);

// Multifrontal LU over the dissection tree. Each front is split as
// [F11 F12; F21 F22] on (own, boundary) unknowns; F11 is factorized with
// partial pivoting, and S = F22 - F21 F11^{-1} F12 is handed to the parent.
class MultifrontalFactor {
 public:
  MultifrontalFactor() = default;
  MultifrontalFactor(const SparseMatrix& a, DissectionOrdering ordering);

  Index size() const { return size_; }
  const DissectionOrdering& ordering() const { return ordering_; }
  // Dimension of each group's update matrix (0 when nothing is passed up).
  std::vector<Index> update_sizes() const;
  Index stored_values() const;

  CVector solve(const CVector& rhs) const;
  void solve_in_place(Eigen::Ref<CVector> x) const;

 private:
  struct Front {
    std::vector<Index> own;
    std::vector<Index> boundary;
    Eigen::PartialPivLU<CMatrix> lu;  // F11
    CMatrix lower;                    // F21
    CMatrix upper;                    // F11^{-1} F12
  };

  Index size_ = 0;
  DissectionOrdering ordering_;
  std::vector<Front> fronts_;
};

inline MultifrontalFactor mf_factorize(const SparseMatrix& a, DissectionOrdering ordering) {
  return MultifrontalFactor(a, std::move(ordering));
}
inline CVector mf_solve(const MultifrontalFactor& f, const CVector& rhs) { return f.solve(rhs); }

}  // namespace sweep
