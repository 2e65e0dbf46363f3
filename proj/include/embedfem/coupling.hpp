#pragma once

#include "embedfem/mesh.hpp"
#include "embedfem/structural_models.hpp"
#include "embedfem/types.hpp"

#include <optional>
#include <vector>

namespace embedfem {

/// Periodic cell used to wrap quadrature points that leave the solid box.
/// A point x maps to x' inside [lo, hi) and the solid displacement there is
/// taken as u(x') + macro_gradient * (x - x').
struct PeriodicWrap {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Ones();
  Mat3 macro_gradient = Mat3::Zero();
};

struct FiberQuadraturePoint {
  Index base_element = 0;
  Vec2 base_ref = Vec2::Zero();
  Vec2 sigma = Vec2::Zero();
  Vec3 xi = Vec3::Zero();
  double weight = 0.0;
  Vec3 x = Vec3::Zero();          // embedded position, possibly wrapped
  Vec3 shift = Vec3::Zero();      // global displacement added to u(x)
  LocalPoint solid;
};

struct FiberQuadrature {
  std::vector<FiberQuadraturePoint> points;
  Index dropped = 0;
  double dropped_weight = 0.0;
  int fiber_points = 0;
};

/// Base points follow the structure stiffness rule (beam: 1 per element,
/// shell: 2 x 2, rigid: the single node); fiber points are Gauss rules with
/// n per fiber axis (circle: n radial x 2n angular). Points outside the
/// solid are dropped. Throws ConfigurationError if none remain.
FiberQuadrature build_fiber_quadrature(const StructureModel& model, const SolidMesh& solid, int n_fiber,
                                       const std::optional<PeriodicWrap>& wrap = std::nullopt);

/// Multipliers live on the embedded base nodes, with the same layout as the
/// structure field restricted to those nodes: [gamma (3 per node) | mu (r per node)].
struct MultiplierSpace {
  std::vector<Index> nodes;
  int rotation_dofs = 0;
  bool rotation_rows = true;

  [[nodiscard]] Index size() const {
    return static_cast<Index>(nodes.size()) * (3 + (rotation_rows ? rotation_dofs : 0));
  }
};

struct CouplingOptions {
  double ell_c = -1.0;  // <= 0: use the structural ell
  bool rotation_rows = true;
};

/// Discrete coupling form: rows are multiplier DOFs, constraint
/// B_structure * Sigma + B_solid * u = rhs. B_solid carries the minus sign.
struct CouplingOperator {
  MultiplierSpace space;
  SparseMatrix b_structure;
  SparseMatrix b_solid;
  Vector rhs;
  double ell_c = 0.0;
  Index dropped_points = 0;

  [[nodiscard]] Index rows() const { return b_structure.rows(); }
  [[nodiscard]] Vector apply(const Vector& structure, const Vector& solid) const;
};

CouplingOperator assemble_coupling(const FiberQuadrature& quad, const SolidMesh& solid, const StructureModel& model,
                                   const CouplingOptions& options = {});

/// ||B x - rhs||_inf / (||B||_inf ||x||_inf), x = [structure; solid].
double kernel_residual(const CouplingOperator& op, const Vector& structure, const Vector& solid);

}  // namespace embedfem
