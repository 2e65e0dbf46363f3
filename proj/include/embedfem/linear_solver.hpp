#pragma once

#include "embedfem/types.hpp"

namespace embedfem {

struct SolverOptions {
  double residual_tol = 1e-10;
  /// Factorizations whose smallest/largest pivot ratio (after equilibration)
  /// falls below this are reported singular.
  double pivot_tol = 1e-13;
  int max_refinement = 8;
};

struct SolveStats {
  Index size = 0;
  double residual = 0.0;  // ||K x - b|| / ||b||
  double min_pivot_ratio = 1.0;
  int refinement_steps = 0;
};

/// Direct solve of a square (possibly indefinite) system: Ruiz
/// equilibration, SparseLU with COLAMD ordering, iterative refinement.
/// Throws WellPosednessError with the offending unknown on singularity.
Vector solve_sparse(const SparseMatrix& k, const Vector& b, const SolverOptions& options = {},
                    SolveStats* stats = nullptr);

/// Sparse Cholesky (LDL^T) for symmetric positive definite systems.
Vector solve_spd(const SparseMatrix& k, const Vector& b, const SolverOptions& options = {},
                 SolveStats* stats = nullptr);

/// Saddle system [[A, B^T], [B, 0]] [x; y] = [f; g] with symmetric A.
/// Uses a regularized LDL^T with refinement and falls back to
/// solve_sparse when that does not reach the tolerance.
Vector solve_kkt(const SparseMatrix& a, const SparseMatrix& b, const Vector& f, const Vector& g,
                 const SolverOptions& options = {}, SolveStats* stats = nullptr);

}  // namespace embedfem
