#include "sweep/gmres.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace sweep {

namespace {

struct Givens {
  Real c = 1.0;
  Complex s = 0.0;

  static Givens make(Complex a, Complex b) {
    if (b == Complex(0.0)) return {1.0, 0.0};
    if (a == Complex(0.0)) return {0.0, 1.0};
    const Real t = std::hypot(std::abs(a), std::abs(b));
    const Complex phase = a / std::abs(a);
    return {std::abs(a) / t, phase * std::conj(b) / t};
  }
  void apply(Complex& a, Complex& b) const {
    const Complex ta = c * a + s * b;
    b = -std::conj(s) * a + c * b;
    a = ta;
  }
};

}  // namespace

Real unpreconditioned_residual(const LinearOperator& apply_A, const CVector& u, const CVector& f) {
  const CVector au = apply_A(u);
  if (au.size() != f.size()) throw ShapeError("operator/vector size mismatch");
  const Real fn = f.norm();
  return fn > 0.0 ? (au - f).norm() / fn : au.norm();
}

GmresResult gmres_solve(const LinearOperator& apply_A, const LinearOperator& apply_M,
                        const CVector& f, const GmresOptions& opt) {
  if (!(opt.tol > 0.0)) throw DomainError("GMRES tolerance must be positive");
  const auto t0 = std::chrono::steady_clock::now();
  const Index N = f.size();
  auto op = [&](const CVector& x) {
    CVector ax = apply_A(x);
    if (ax.size() != N) throw ShapeError("operator A changes the vector length");
    CVector max = apply_M(ax);
    if (max.size() != N) throw ShapeError("operator M changes the vector length");
    return max;
  };

  GmresResult out;
  SolveReport& rep = out.report;
  out.solution = CVector::Zero(N);
  CVector mf = apply_M(f);
  if (mf.size() != N) throw ShapeError("operator M changes the vector length");
  const Real ref = mf.norm();
  rep.residual_history.push_back(ref > 0.0 ? 1.0 : 0.0);
  if (ref == 0.0) {
    rep.converged = true;
    rep.solve_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
  }

  const int cycle_len = opt.restart ? std::max(1, *opt.restart) : opt.max_iter;
  CVector r = mf;
  std::vector<CVector> V;
  while (rep.iterations < opt.max_iter && !rep.converged && !rep.breakdown) {
    const Real beta = r.norm();
    const int m = std::min(cycle_len, opt.max_iter - rep.iterations);
    V.clear();
    V.push_back(r / beta);
    CMatrix H = CMatrix::Zero(m + 1, m);
    std::vector<Givens> rot;
    CVector g = CVector::Zero(m + 1);
    g[0] = beta;
    int j = 0;
    for (; j < m; ++j) {
      CVector w = op(V[j]);
      const Real w_before = w.norm();
      for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i <= j; ++i) {
          const Complex hij = V[i].dot(w);
          H(i, j) += hij;
          w -= hij * V[i];
        }
        if (w.norm() > 0.7 * w_before) break;
      }
      const Real hnext = w.norm();
      H(j + 1, j) = hnext;
      for (int i = 0; i < j; ++i) rot[i].apply(H(i, j), H(i + 1, j));
      rot.push_back(Givens::make(H(j, j), H(j + 1, j)));
      rot[j].apply(H(j, j), H(j + 1, j));
      rot[j].apply(g[j], g[j + 1]);
      ++rep.iterations;
      if (std::abs(H(j, j)) == 0.0) {
        // Singular Hessenberg column: A M v_j is already in span(V_<j).
        rep.residual_history.push_back(rep.residual_history.back());
        rep.breakdown = true;
        break;
      }
      const Real res = std::abs(g[j + 1]) / ref;
      rep.residual_history.push_back(res);
      if (res <= opt.tol) {
        rep.converged = true;
        ++j;
        break;
      }
      if (hnext <= 1e-14 * w_before) {
        rep.breakdown = true;
        ++j;
        break;
      }
      V.push_back(w / hnext);
    }
    // Solve the j-by-j triangular system and update the iterate.
    CVector y = H.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(g.head(j));
    for (int i = 0; i < j; ++i) out.solution += y[i] * V[i];
    if (opt.record_orthogonality) {
      Real defect = 0.0;
      for (std::size_t a = 0; a < V.size(); ++a)
        for (std::size_t b = 0; b < V.size(); ++b) {
          const Complex ip = V[a].dot(V[b]);
          defect = std::max(defect, std::abs(ip - Complex(a == b ? 1.0 : 0.0)));
        }
      out.orthogonality_defect = std::max(out.orthogonality_defect, defect);
    }
    if (!rep.converged && !rep.breakdown) r = mf - op(out.solution);
  }
  rep.unpreconditioned_residual = unpreconditioned_residual(apply_A, out.solution, f);
  rep.solve_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

nlohmann::json SolveReport::to_json() const {
  nlohmann::json j;
  j["iterations"] = iterations;
  j["converged"] = converged;
  j["breakdown"] = breakdown;
  j["residual_history"] = residual_history;
  j["unpreconditioned_residual"] = unpreconditioned_residual;
  j["setup_time"] = setup_time;
  j["solve_time"] = solve_time;
  j["omega_over_2pi"] = omega_over_2pi;
  j["q"] = q;
  j["n"] = n;
  j["dim"] = dim;
  j["N"] = N;
  j["b"] = b;
  j["d"] = d;
  j["alpha"] = alpha;
  j["field"] = field;
  j["forcing"] = forcing;
  return j;
}

std::string SolveReport::residual_csv() const {
  std::ostringstream out;
  out << "iteration,relative_residual\n";
  out.precision(10);
  for (std::size_t k = 0; k < residual_history.size(); ++k)
    out << k << ',' << residual_history[k] << '\n';
  return out.str();
}

}  // namespace sweep
