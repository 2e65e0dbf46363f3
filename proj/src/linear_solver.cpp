#include "embedfem/linear_solver.hpp"

#include "embedfem/errors.hpp"

#include "cholmod_backend.hpp"

#include <Eigen/Dense>
#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <cmath>
#include <limits>
#include <functional>
#include <string>
#include <vector>

namespace embedfem {

namespace {

// Symmetric Ruiz scaling: D K D with rows and columns of unit max-norm.
Vector ruiz_scaling(const SparseMatrix& k, int sweeps) {
  const Index n = k.rows();
  Vector d = Vector::Ones(n);
  SparseMatrix s = k;
  for (int it = 0; it < sweeps; ++it) {
    Vector colmax = Vector::Zero(n);
    for (Index c = 0; c < s.outerSize(); ++c) {
      for (SparseMatrix::InnerIterator i(s, c); i; ++i) colmax[c] = std::max(colmax[c], std::abs(i.value()));
    }
    Vector step(n);
    for (Index i = 0; i < n; ++i) step[i] = colmax[i] > 0.0 ? 1.0 / std::sqrt(colmax[i]) : 1.0;
    s = step.asDiagonal() * s * step.asDiagonal();
    d = d.cwiseProduct(step);
  }
  return d;
}

double rel_residual(const SparseMatrix& k, const Vector& x, const Vector& b) {
  const double bn = b.norm();
  const double rn = (k * x - b).norm();
  return bn > 0.0 ? rn / bn : rn;
}

// Iterative refinement of x against k with an approximate inverse.
double refine(const SparseMatrix& k, const Vector& b, const std::function<Vector(const Vector&)>& inverse,
              int max_steps, double target, Vector& x, int& steps) {
  double res = rel_residual(k, x, b);
  for (int it = 0; it < max_steps && res > target; ++it) {
    const Vector x2 = x + inverse(b - k * x);
    const double res2 = rel_residual(k, x2, b);
    if (!(res2 < res)) break;
    x = x2;
    res = res2;
    ++steps;
  }
  return res;
}

Vector spd_simplicial(const SparseMatrix& k, const Vector& b, const SolverOptions& options, SolveStats& local) {
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(k);
  // An exactly zero pivot aborts LDL^T; the LU path locates the unknown.
  if (ldlt.info() != Eigen::Success) return solve_sparse(k, b, options, &local);
  const Vector diag = ldlt.vectorD();
  const double dmax = diag.cwiseAbs().maxCoeff();
  Index jmin = 0;
  const double dmin = diag.minCoeff(&jmin);
  local.min_pivot_ratio = dmax > 0.0 ? dmin / dmax : 0.0;
  if (!(local.min_pivot_ratio >= options.pivot_tol)) {
    const Index original = ldlt.permutationPinv().indices()[jmin];
    throw WellPosednessError("singular SPD system at unknown " + std::to_string(original),
                             static_cast<long>(original));
  }
  Vector x = ldlt.solve(b);
  local.residual = refine(k, b, [&](const Vector& r) { return Vector(ldlt.solve(r)); }, options.max_refinement,
                          0.01 * options.residual_tol, x, local.refinement_steps);
  return x;
}

}  // namespace

Vector solve_sparse(const SparseMatrix& k, const Vector& b, const SolverOptions& options, SolveStats* stats) {
  if (k.rows() != k.cols() || k.rows() != b.size()) throw InvalidArgument("solve_sparse: dimension mismatch");
  const Index n = k.rows();
  SolveStats local;
  local.size = n;
  if (n == 0) {
    if (stats) *stats = local;
    return Vector();
  }
  const Vector d = ruiz_scaling(k, 6);
  SparseMatrix ks = d.asDiagonal() * k * d.asDiagonal();
  ks.makeCompressed();

  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(ks);
  lu.factorize(ks);
  if (lu.info() != Eigen::Success) {
    // The message ends with the (1-based) permuted column of the zero pivot.
    const std::string msg = lu.lastErrorMessage();
    long original = -1;
    const auto pos = msg.find_last_not_of("0123456789");
    if (pos != std::string::npos && pos + 1 < msg.size()) {
      const long col = std::stol(msg.substr(pos + 1)) - 1;
      const auto& pc = lu.colsPermutation().indices();
      for (Index i = 0; i < pc.size(); ++i) {
        if (pc[i] == col) original = static_cast<long>(i);
      }
    }
    throw WellPosednessError("singular system: " + msg, original);
  }

  // Pivots are the diagonal of U, stored in the supernodal L blocks.
  double pmax = 0.0;
  double pmin = std::numeric_limits<double>::infinity();
  Index jmin = 0;
  const auto& mapl = lu.matrixL().m_mapL;
  using SCMatrix = std::remove_cv_t<std::remove_reference_t<decltype(mapl)>>;
  for (Index j = 0; j < n; ++j) {
    for (typename SCMatrix::InnerIterator it(mapl, j); it; ++it) {
      if (it.row() == j) {
        const double p = std::abs(it.value());
        pmax = std::max(pmax, p);
        if (p < pmin) {
          pmin = p;
          jmin = j;
        }
        break;
      }
    }
  }
  local.min_pivot_ratio = pmax > 0.0 ? pmin / pmax : 0.0;
  if (!(local.min_pivot_ratio >= options.pivot_tol)) {
    const auto& pc = lu.colsPermutation().indices();
    Index original = jmin;
    for (Index i = 0; i < pc.size(); ++i) {
      if (pc[i] == jmin) original = i;
    }
    throw WellPosednessError("singular system: pivot ratio " + std::to_string(local.min_pivot_ratio) +
                                 " at unknown " + std::to_string(original),
                             static_cast<long>(original));
  }

  const Vector bs = d.cwiseProduct(b);
  Vector y = lu.solve(bs);
  double res = rel_residual(ks, y, bs);
  for (int it = 0; it < options.max_refinement && res > 0.01 * options.residual_tol; ++it) {
    const Vector r = bs - ks * y;
    const Vector y2 = y + lu.solve(r);
    const double res2 = rel_residual(ks, y2, bs);
    if (!(res2 < res)) break;
    y = y2;
    res = res2;
    ++local.refinement_steps;
  }
  Vector x = d.cwiseProduct(y);
  local.residual = rel_residual(k, x, b);
  if (!x.allFinite() || !(local.residual <= 1e3 * options.residual_tol)) {
    throw WellPosednessError("solve failed: relative residual " + std::to_string(local.residual), -1);
  }
  if (stats) *stats = local;
  return x;
}

Vector solve_spd(const SparseMatrix& k, const Vector& b, const SolverOptions& options, SolveStats* stats) {
  if (k.rows() != k.cols() || k.rows() != b.size()) throw InvalidArgument("solve_spd: dimension mismatch");
  SolveStats local;
  local.size = k.rows();
  if (k.rows() == 0) {
    if (stats) *stats = local;
    return Vector();
  }
  Vector x;
  bool done = false;
  if (detail::have_spd_factor()) {
    const Vector d = ruiz_scaling(k, 6);
    const SparseMatrix ks = d.asDiagonal() * k * d.asDiagonal();
    detail::SpdFactor chol;
    if (chol.factor(ks)) {
      local.min_pivot_ratio = chol.rcond();
      if (local.min_pivot_ratio >= options.pivot_tol) {
        const Vector bs = d.cwiseProduct(b);
        Vector y = chol.solve(bs);
        refine(ks, bs, [&](const Vector& r) { return chol.solve(r); }, options.max_refinement,
               0.01 * options.residual_tol, y, local.refinement_steps);
        x = d.cwiseProduct(y);
        local.residual = rel_residual(k, x, b);
        done = true;
      }
    }
  }
  // The simplicial path also locates the offending unknown.
  if (!done) x = spd_simplicial(k, b, options, local);
  if (!x.allFinite()) throw WellPosednessError("SPD solve produced non-finite values", -1);
  if (stats) *stats = local;
  return x;
}

Vector solve_kkt(const SparseMatrix& a, const SparseMatrix& b, const Vector& f, const Vector& g,
                 const SolverOptions& options, SolveStats* stats) {
  const Index np = a.rows();
  const Index m = b.rows();
  if (a.cols() != np || b.cols() != np || f.size() != np || g.size() != m) {
    throw InvalidArgument("solve_kkt: dimension mismatch");
  }
  if (m == 0) return solve_spd(a, f, options, stats);
  std::vector<Triplet> t;
  auto append = [&t](const SparseMatrix& s, Index r0, Index c0) {
    for (Index c = 0; c < s.outerSize(); ++c) {
      for (SparseMatrix::InnerIterator i(s, c); i; ++i) t.emplace_back(r0 + i.row(), c0 + i.col(), i.value());
    }
  };
  auto assemble = [&](const SparseMatrix& a11, const SparseMatrix& b21, double shift) {
    t.clear();
    t.reserve(static_cast<size_t>(a11.nonZeros() + 2 * b21.nonZeros() + m));
    append(a11, 0, 0);
    append(b21, np, 0);
    append(SparseMatrix(b21.transpose()), 0, np);
    if (shift != 0.0) {
      for (Index i = 0; i < m; ++i) t.emplace_back(np + i, np + i, shift);
    }
    SparseMatrix out(np + m, np + m);
    out.setFromTriplets(t.begin(), t.end());
    return out;
  };
  const SparseMatrix kkt = assemble(a, b, 0.0);
  Vector rhs(np + m);
  rhs << f, g;

  // Equilibrate and add the augmented-Lagrangian term r B^T B, which leaves
  // the solution unchanged because B x = g and makes the primal block
  // definite whenever the problem is well posed.
  const Vector d = ruiz_scaling(kkt, 6);
  const Vector dp = d.head(np);
  const Vector dm = d.tail(m);
  const SparseMatrix as = dp.asDiagonal() * a * dp.asDiagonal();
  const SparseMatrix bs = dm.asDiagonal() * b * dp.asDiagonal();
  const SparseMatrix bst = bs.transpose();
  const SparseMatrix btb = bst * bs;
  const double amax = as.diagonal().cwiseAbs().maxCoeff();
  const double bmax = btb.diagonal().cwiseAbs().maxCoeff();
  const double r = bmax > 0.0 ? amax / bmax : 0.0;
  const SparseMatrix ar = as + r * btb;
  const SparseMatrix ks = assemble(ar, bs, 0.0);
  Vector bsc(np + m);
  bsc << dp.cwiseProduct(f) + r * (bst * dm.cwiseProduct(g)), dm.cwiseProduct(g);

  SolveStats local;
  local.size = np + m;
  std::function<Vector(const Vector&)> inverse;
  // Factors referenced by `inverse`.
  detail::SpdFactor chol;
  Eigen::LDLT<Matrix> schur;
  Eigen::SimplicialLDLT<SparseMatrix> qd;

  constexpr Index kMaxDenseSchur = 4000;
  if (detail::have_spd_factor() && m <= kMaxDenseSchur) {
    // Block elimination: S = B Ar^{-1} B^T is dense but small.
    if (chol.factor(ar) && chol.rcond() >= options.pivot_tol) {
      Matrix s(m, m);
      constexpr Index kBatch = 64;
      for (Index j = 0; j < m; j += kBatch) {
        const Index c = std::min(kBatch, m - j);
        const Matrix w = chol.solve(Matrix(bst.middleCols(j, c)));
        s.middleCols(j, c) = bs * w;
      }
      s = 0.5 * (s + s.transpose()).eval();
      schur.compute(s);
      const Vector sd = schur.vectorD().cwiseAbs();
      const double ratio = sd.maxCoeff() > 0.0 ? sd.minCoeff() / sd.maxCoeff() : 0.0;
      if (schur.info() == Eigen::Success && ratio >= options.pivot_tol) {
        local.min_pivot_ratio = std::min(chol.rcond(), ratio);
        inverse = [&](const Vector& v) {
          const Vector x0 = chol.solve(Vector(v.head(np)));
          const Vector y = schur.solve(bs * x0 - v.tail(m));
          Vector out(np + m);
          out << x0 - chol.solve(Vector(bst * y)), y;
          return out;
        };
      }
    }
  } else {
    // A small negative shift on the multiplier block makes the matrix
    // quasi-definite, so LDL^T exists under any fill-reducing ordering;
    // refinement against the unshifted system removes the shift.
    qd.compute(assemble(ar, bs, -1e-8));
    if (qd.info() == Eigen::Success) {
      const Vector diag = qd.vectorD();
      const auto& pinv = qd.permutationPinv().indices();
      bool signs = true;
      for (Index j = 0; j < diag.size(); ++j) {
        if (!(pinv[j] < np ? diag[j] > 0.0 : diag[j] < 0.0)) signs = false;
      }
      if (signs) {
        local.min_pivot_ratio = diag.cwiseAbs().minCoeff() / diag.cwiseAbs().maxCoeff();
        inverse = [&](const Vector& v) { return Vector(qd.solve(v)); };
      }
    }
  }
  if (inverse) {
    Vector y = inverse(bsc);
    refine(ks, bsc, inverse, 4 * options.max_refinement, 0.01 * options.residual_tol, y, local.refinement_steps);
    const Vector x = d.cwiseProduct(y);
    local.residual = rel_residual(kkt, x, rhs);
    if (x.allFinite() && local.residual <= options.residual_tol) {
      if (stats) *stats = local;
      return x;
    }
  }
  // Rank-deficient or badly conditioned: the pivoting LU path either
  // recovers or reports the offending unknown.
  return solve_sparse(kkt, rhs, options, stats);
}

}  // namespace embedfem
