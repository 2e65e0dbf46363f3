#pragma once

#include "embedfem/dof_map.hpp"
#include "embedfem/mesh.hpp"
#include "embedfem/types.hpp"

#include <functional>
#include <string>
#include <vector>

namespace embedfem {

struct IsotropicMaterial {
  double E = 1.0;
  double nu = 0.0;

  /// Throws InvalidArgument unless E > 0 and -1 < nu < 0.5.
  void validate() const;
  [[nodiscard]] double lambda() const { return E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)); }
  [[nodiscard]] double mu() const { return E / (2.0 * (1.0 + nu)); }
  /// Voigt order xx, yy, zz, yz, xz, xy with engineering shear strains.
  [[nodiscard]] Eigen::Matrix<double, 6, 6> elasticity() const;
};

using ElementMatrix = Eigen::Matrix<double, 24, 24>;
using ElementVector = Eigen::Matrix<double, 24, 1>;

/// Element DOF ordering: 3 * local_node + component.
ElementMatrix hex8_stiffness(const hex8::Coords& coords, const IsotropicMaterial& mat);

/// Element Gram matrix of int (u.v + ell^2 Du:Dv).
ElementMatrix hex8_h1_gram(const hex8::Coords& coords, double ell);

/// Strain-displacement matrix (Voigt, engineering shear) at `xi`.
Eigen::Matrix<double, 6, 24> hex8_strain_matrix(const hex8::Coords& coords, const Vec3& xi, double* det_j = nullptr);

/// Global DOF of (node, component).
inline Index solid_dof(Index node, int component) { return 3 * node + component; }

/// Stiffness over all solid DOFs, one material per hexahedron.
SparseSym assemble_solid(const SolidMesh& mesh, const std::vector<IsotropicMaterial>& materials);
SparseSym assemble_solid(const SolidMesh& mesh, const IsotropicMaterial& mat);
/// Stiffness restricted to the free DOFs of `dofs`.
SparseSym assemble_solid(const SolidMesh& mesh, const IsotropicMaterial& mat, const DofMap& dofs);

using VectorField = std::function<Vec3(const Vec3&)>;

/// Consistent nodal loads of a surface traction, 2x2 Gauss per facet.
Vector traction_load(const SolidMesh& mesh, const std::string& face_set, const VectorField& t);
Vector traction_load(const SolidMesh& mesh, const std::vector<Facet>& facets, const VectorField& t);

/// Consistent nodal loads of a body force, 2x2x2 Gauss per element.
Vector body_force_load(const SolidMesh& mesh, const VectorField& b);

/// Gram matrix of int (u.v + ell^2 Du:Dv) over the mesh.
SparseSym solid_h1_gram(const SolidMesh& mesh, double ell);

/// Geometry of a facet quadrature point: position and area weight.
struct FacetPoint {
  Vec3 x;
  Vec3 xi;
  double weight = 0.0;
};
std::vector<FacetPoint> facet_quadrature(const SolidMesh& mesh, const Facet& facet, int n);

/// Field evaluation from a full nodal displacement vector.
Vec3 eval_displacement(const SolidMesh& mesh, const Vector& u, const LocalPoint& p);
/// Du (rows: displacement components, cols: x derivatives).
Mat3 eval_gradient(const SolidMesh& mesh, const Vector& u, const LocalPoint& p);
Eigen::Matrix<double, 6, 1> eval_stress(const SolidMesh& mesh, const Vector& u, const LocalPoint& p,
                                        const IsotropicMaterial& mat);

/// int sigma dV (Voigt) with one material per hexahedron.
Eigen::Matrix<double, 6, 1> integrate_stress(const SolidMesh& mesh, const Vector& u,
                                             const std::vector<IsotropicMaterial>& materials);

}  // namespace embedfem
