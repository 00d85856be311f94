#include "sweep/multifrontal.hpp"

#include <algorithm>
#include <string>

namespace sweep {

std::vector<Index> DissectionOrdering::unknowns(int g) const {
  const auto& pos = groups.at(g).positions;
  std::vector<Index> out;
  out.reserve(pos.size() * depth);
  const Index plane = num_positions();
  for (int l = 0; l < depth; ++l)
    for (Index p : pos) out.push_back(l * plane + p);
  return out;
}

bool DissectionOrdering::is_ancestor(int ancestor, int g) const {
  for (int p = groups.at(g).parent; p >= 0; p = groups[p].parent)
    if (p == ancestor) return true;
  return false;
}

std::vector<int> DissectionOrdering::position_groups() const {
  std::vector<int> owner(static_cast<std::size_t>(num_positions()), -1);
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (Index p : groups[g].positions) owner[p] = static_cast<int>(g);
  return owner;
}

namespace {

struct Dissector {
  DissectionOrdering& ord;
  int leaf_size;

  // Returns the index of the group created for this box, or -1 if empty.
  int split(DissectionOrdering::Box box, int level) {
    const int w = box.x1 - box.x0;
    const int h = box.y1 - box.y0;
    if (w <= 0 || h <= 0) return -1;
    if (Index(w) * h <= leaf_size) {
      DissectionOrdering::Group g;
      g.box = box;
      g.level = level;
      for (int y = box.y0; y < box.y1; ++y)
        for (int x = box.x0; x < box.x1; ++x) g.positions.push_back(Index(y) * ord.nx + x);
      ord.groups.push_back(std::move(g));
      return static_cast<int>(ord.groups.size()) - 1;
    }
    const bool cut_x = w > h || (w == h && level % 2 == 0);
    DissectionOrdering::Box a = box, b = box;
    DissectionOrdering::Group sep;
    sep.separator = true;
    sep.box = box;
    sep.level = level;
    if (cut_x) {
      const int mid = box.x0 + w / 2;
      a.x1 = mid;
      b.x0 = mid + 1;
      for (int y = box.y0; y < box.y1; ++y) sep.positions.push_back(Index(y) * ord.nx + mid);
    } else {
      const int mid = box.y0 + h / 2;
      a.y1 = mid;
      b.y0 = mid + 1;
      for (int x = box.x0; x < box.x1; ++x) sep.positions.push_back(Index(mid) * ord.nx + x);
    }
    const int ca = split(a, level + 1);
    const int cb = split(b, level + 1);
    ord.groups.push_back(std::move(sep));
    const int self = static_cast<int>(ord.groups.size()) - 1;
    for (int c : {ca, cb})
      if (c >= 0) {
        ord.groups[c].parent = self;
        ord.groups[self].children.push_back(c);
      }
    return self;
  }
};

}  // namespace

DissectionOrdering nested_dissection_order(int nx, int ny, int depth, int leaf_size) {
  if (nx < 1 || ny < 1 || depth < 1 || leaf_size < 1)
    throw DomainError("nested dissection needs positive sizes");
  DissectionOrdering ord;
  ord.nx = nx;
  ord.ny = ny;
  ord.depth = depth;
  Dissector d{ord, leaf_size};
  d.split({0, nx, 0, ny}, 0);
  return ord;
}

std::vector<std::vector<Index>> symbolic_structure(const SparseMatrix& a,
                                                   const DissectionOrdering& ord) {
  if (a.rows() != ord.num_unknowns() || a.cols() != a.rows())
    throw ShapeError("matrix size does not match the dissection ordering");
  const Index plane = ord.num_positions();
  const auto owner_pos = ord.position_groups();
  auto owner = [&](Index v) { return owner_pos[v % plane]; };

  std::vector<std::vector<Index>> structs(ord.groups.size());
  std::vector<int> mark(static_cast<std::size_t>(a.rows()), -1);
  for (std::size_t gi = 0; gi < ord.groups.size(); ++gi) {
    const int g = static_cast<int>(gi);
    auto& st = structs[gi];
    auto add = [&](Index v) {
      const int og = owner(v);
      if (og == g || mark[v] == g) return;
      if (og < g && ord.is_ancestor(g, og)) return;  // eliminated descendant
      if (!ord.is_ancestor(og, g))
        throw DomainError("sparsity couples group " + std::to_string(g) + " to non-ancestor group " +
                          std::to_string(og));
      mark[v] = g;
      st.push_back(v);
    };
    for (Index v : ord.unknowns(g))
      for (SparseMatrix::InnerIterator it(a, v); it; ++it) add(it.col());
    for (int c : ord.groups[gi].children)
      for (Index v : structs[c]) add(v);
    std::sort(st.begin(), st.end());
  }
  return structs;
}

MultifrontalFactor::MultifrontalFactor(const SparseMatrix& a, DissectionOrdering ordering)
    : size_(a.rows()), ordering_(std::move(ordering)) {
  const auto structs = symbolic_structure(a, ordering_);
  const std::size_t ng = ordering_.groups.size();
  fronts_.resize(ng);
  std::vector<CMatrix> updates(ng);
  std::vector<Index> local(static_cast<std::size_t>(size_), -1);

  for (std::size_t g = 0; g < ng; ++g) {
    Front& fr = fronts_[g];
    fr.own = ordering_.unknowns(static_cast<int>(g));
    fr.boundary = structs[g];
    const Index no = static_cast<Index>(fr.own.size());
    const Index nb = static_cast<Index>(fr.boundary.size());
    for (Index k = 0; k < no; ++k) local[fr.own[k]] = k;
    for (Index k = 0; k < nb; ++k) local[fr.boundary[k]] = no + k;

    CMatrix F = CMatrix::Zero(no + nb, no + nb);
    for (Index k = 0; k < no; ++k)
      for (SparseMatrix::InnerIterator it(a, fr.own[k]); it; ++it) {
        const Index c = local[it.col()];
        if (c >= 0) F(k, c) = it.value();
      }
    for (Index k = 0; k < nb; ++k)
      for (SparseMatrix::InnerIterator it(a, fr.boundary[k]); it; ++it) {
        const Index c = local[it.col()];
        if (c >= 0 && c < no) F(no + k, c) = it.value();
      }
    for (int c : ordering_.groups[g].children) {
      const auto& cb = fronts_[c].boundary;
      const CMatrix& U = updates[c];
      std::vector<Index> map(cb.size());
      for (std::size_t k = 0; k < cb.size(); ++k) map[k] = local[cb[k]];
      for (std::size_t j = 0; j < cb.size(); ++j)
        for (std::size_t i = 0; i < cb.size(); ++i) F(map[i], map[j]) += U(i, j);
      updates[c] = CMatrix();
    }

    const Real scale = F.cwiseAbs().maxCoeff();
    fr.lu.compute(F.topLeftCorner(no, no));
    const Real min_pivot = no > 0 ? fr.lu.matrixLU().diagonal().cwiseAbs().minCoeff() : 1.0;
    if (!(min_pivot > 1e-13 * scale))
      throw FactorizationError("singular frontal pivot in group " + std::to_string(g),
                               static_cast<Index>(g));
    if (nb > 0) {
      fr.lower = F.bottomLeftCorner(nb, no);
      fr.upper = fr.lu.solve(F.topRightCorner(no, nb));
      updates[g].noalias() = F.bottomRightCorner(nb, nb) - fr.lower * fr.upper;
    }
    for (Index v : fr.own) local[v] = -1;
    for (Index v : fr.boundary) local[v] = -1;
  }
}

std::vector<Index> MultifrontalFactor::update_sizes() const {
  std::vector<Index> s;
  s.reserve(fronts_.size());
  for (const auto& f : fronts_) s.push_back(static_cast<Index>(f.boundary.size()));
  return s;
}

Index MultifrontalFactor::stored_values() const {
  Index total = 0;
  for (const auto& f : fronts_)
    total += f.lu.matrixLU().size() + f.lower.size() + f.upper.size();
  return total;
}

void MultifrontalFactor::solve_in_place(Eigen::Ref<CVector> x) const {
  if (x.size() != size_) throw ShapeError("multifrontal solve size mismatch");
  CVector own, bnd;
  for (const auto& f : fronts_) {
    const Index no = static_cast<Index>(f.own.size());
    own.resize(no);
    for (Index k = 0; k < no; ++k) own[k] = x[f.own[k]];
    own = f.lu.solve(own);
    for (Index k = 0; k < no; ++k) x[f.own[k]] = own[k];
    if (!f.boundary.empty()) {
      bnd.noalias() = f.lower * own;
      for (std::size_t k = 0; k < f.boundary.size(); ++k) x[f.boundary[k]] -= bnd[k];
    }
  }
  for (auto it = fronts_.rbegin(); it != fronts_.rend(); ++it) {
    const auto& f = *it;
    if (f.boundary.empty()) continue;
    bnd.resize(static_cast<Index>(f.boundary.size()));
    for (std::size_t k = 0; k < f.boundary.size(); ++k) bnd[k] = x[f.boundary[k]];
    own.noalias() = f.upper * bnd;
    for (std::size_t k = 0; k < f.own.size(); ++k) x[f.own[k]] -= own[k];
  }
}

CVector MultifrontalFactor::solve(const CVector& rhs) const {
  CVector x = rhs;
  solve_in_place(x);
  return x;
}

}  // namespace sweep
