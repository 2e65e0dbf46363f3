#pragma once

#include "embedfem/coupling.hpp"
#include "embedfem/dof_map.hpp"
#include "embedfem/linear_solver.hpp"
#include "embedfem/types.hpp"

#include <vector>

namespace embedfem {

/// One structure's contribution to the saddle system. `coupling` may be
/// null (an uncoupled structure).
struct SaddleStructure {
  const SparseSym* stiffness = nullptr;
  const DofMap* dofs = nullptr;
  Vector load;
  const CouplingOperator* coupling = nullptr;
};

/// Unknown ordering: [u | structure 0 | structure 1 | ... | multipliers 0 | ...],
/// all primal blocks restricted to free DOFs.
struct SaddleLayout {
  Index solid_size = 0;
  std::vector<Index> structure_offset;
  std::vector<Index> structure_size;
  std::vector<Index> multiplier_offset;  // relative to the multiplier block
  std::vector<Index> multiplier_size;
  Index primal = 0;
  Index multipliers = 0;
};

/// [[A, B^T], [B, 0]] [x; lambda] = [f; g].
///
/// g is zero unless prescribed or periodic offsets enter coupled DOFs.
struct SaddleSystem {
  SparseMatrix a;
  SparseMatrix b;
  Vector f;
  Vector g;
  SaddleLayout layout;

  [[nodiscard]] Index size() const { return layout.primal + layout.multipliers; }
  [[nodiscard]] SparseMatrix kkt() const;
  [[nodiscard]] Vector rhs() const;
};

SaddleSystem assemble_saddle(const SparseSym& solid_k, const DofMap& solid_dofs, const Vector& solid_load,
                             const std::vector<SaddleStructure>& structures);

struct SaddleSolution {
  Vector x;
  Vector lambda;
  SolveStats stats;
};

/// Direct factorization of the full KKT matrix (LDL^T when there are no
/// multipliers). Throws WellPosednessError on singular systems.
SaddleSolution solve(const SaddleSystem& system, const SolverOptions& options = {});

}  // namespace embedfem
