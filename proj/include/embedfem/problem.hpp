#pragma once

#include "embedfem/coupling.hpp"
#include "embedfem/dof_map.hpp"
#include "embedfem/linear_solver.hpp"
#include "embedfem/mesh.hpp"
#include "embedfem/saddle.hpp"
#include "embedfem/solid_fem.hpp"
#include "embedfem/structural_models.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace embedfem {

struct StructureInstance {
  std::string name;
  StructureModel model;
  DofMap dofs;
  Vector load;
  bool coupled = true;
  int fiber_points = 2;
  CouplingOptions coupling_options;
  std::optional<PeriodicWrap> wrap;
};

/// A solid with embedded structures, ready to assemble. Solid and
/// structure DOF maps must be finalized.
struct CoupledProblem {
  SolidMesh mesh;
  std::vector<IsotropicMaterial> materials;  // one per hexahedron
  DofMap solid_dofs;
  Vector solid_load;
  std::vector<StructureInstance> structures;
};

struct Diagnostics {
  Index unknowns = 0;
  Index solid_unknowns = 0;
  Index structure_unknowns = 0;
  Index multiplier_unknowns = 0;
  double constraint_residual = 0.0;  // max kernel residual over couplings
  double energy = 0.0;               // x^T A x (free DOFs)
  double work = 0.0;                 // f^T x - lambda^T g
  double energy_identity_error = 0.0;
  Index dropped_points = 0;
  SolveStats stats;
};

struct Solution {
  Vector u;                        // full solid DOF vector
  std::vector<Vector> fields;      // full structure DOF vectors
  std::vector<Vector> multipliers;
  std::vector<CouplingOperator> couplings;  // empty operator for uncoupled structures
  Diagnostics diagnostics;
};

/// Marks components (mask over x, y, z) of the listed nodes as prescribed.
void fix_nodes(DofMap& dofs, const std::vector<Index>& nodes, const std::array<bool, 3>& components,
               const Vec3& value);

struct AssembledProblem {
  std::vector<SparseSym> structure_k;
  std::vector<CouplingOperator> couplings;  // empty operator for uncoupled structures
  SaddleSystem system;
  Index dropped_points = 0;
};

/// Builds stiffness, coupling and the reduced saddle system.
AssembledProblem assemble_problem(const CoupledProblem& problem);

/// Assembles the saddle system, solves it and expands all fields.
Solution solve_problem(const CoupledProblem& problem, const SolverOptions& options = {});

/// Convenience: builds a coupling operator for one structure instance.
CouplingOperator build_coupling(const StructureInstance& s, const SolidMesh& mesh);

}  // namespace embedfem
