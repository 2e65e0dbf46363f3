#pragma once

#include "embedfem/mesh.hpp"
#include "embedfem/solid_fem.hpp"
#include "embedfem/types.hpp"

#include <optional>
#include <vector>

namespace embedfem {

enum class StructureKind { rigid, beam, shell };
enum class FiberShape { segment, rectangle, circle, box };

/// Cross-section (beam), thickness segment (shell) or body (rigid), centered
/// at the fiber origin. Sizes: segment {t}, rectangle {b, h} along the first
/// two fiber axes, circle {r}, box {a, b, c}.
struct FiberSpec {
  FiberShape shape = FiberShape::rectangle;
  Vec3 size = Vec3::Zero();

  [[nodiscard]] int dim() const;
  [[nodiscard]] double measure() const;
  /// int xi_i^2 over the fiber, listed per fiber axis.
  [[nodiscard]] Vec3 second_moments() const;
  /// Saint-Venant torsion constant (beam cross-sections only).
  [[nodiscard]] double torsion_constant() const;
  /// Whether fiber coordinates `xi` (first dim() entries) lie in the fiber.
  [[nodiscard]] bool contains(const Vec3& xi, double tol) const;
  void validate() const;
};

/// A reduced structure placed by an affine isometric frame.
///
/// Local frame coordinates y = R^T (x - origin) split into base and fiber
/// coordinates:
///
///     beam   y = (xi1, xi2, sigma)     base along E3
///     shell  y = (sigma1, sigma2, xi)  normal E3
///     rigid  y = xi                    base is the frame origin
///
/// DOF vectors hold [Sigma of all nodes (3 per node) | theta of all nodes
/// (r per node)], components in the structure frame. The displacement
/// ansatz is U = Sigma + theta_vec x xi_vec, where theta_vec = theta for
/// beams and rigid bodies and theta_1 E1 + theta_2 E2 for shells.
///
/// Shell sign convention: theta = (beta, 0), xi = zeta gives
/// U = (0, -beta zeta, 0), a rotation about E1.
struct StructureModel {
  StructureKind kind = StructureKind::beam;
  BaseMesh base;
  FiberSpec fiber;
  IsotropicMaterial material;
  double ell = 0.0;
  double shear_factor = 5.0 / 6.0;

  [[nodiscard]] const Frame& frame() const { return base.placement; }
  [[nodiscard]] int rotation_dofs() const { return kind == StructureKind::shell ? 2 : 3; }
  [[nodiscard]] Index num_nodes() const { return base.num_nodes(); }
  [[nodiscard]] Index num_dofs() const { return (3 + rotation_dofs()) * num_nodes(); }
  [[nodiscard]] Index sigma_dof(Index node, int c) const { return 3 * node + c; }
  [[nodiscard]] Index theta_dof(Index node, int c) const { return 3 * num_nodes() + rotation_dofs() * node + c; }

  /// Local axis index of base coordinate alpha and fiber coordinate i.
  [[nodiscard]] int base_axis(int alpha) const { return kind == StructureKind::beam ? 2 : alpha; }
  [[nodiscard]] int fiber_axis(int i) const { return kind == StructureKind::shell ? 2 : i; }

  [[nodiscard]] Vec3 local_coords(const Vec2& sigma, const Vec3& xi) const;
  /// Embedding x = origin + R * y(sigma, xi).
  [[nodiscard]] Vec3 embed(const Vec2& sigma, const Vec3& xi) const;
  /// theta_vec = P theta with P = 3 x r.
  [[nodiscard]] Eigen::Matrix<double, 3, Eigen::Dynamic> rotation_basis() const;
  /// xi_vec in local components.
  [[nodiscard]] Vec3 fiber_vector(const Vec3& xi) const;
  /// int (|xi|^2 I - xi (x) xi) over the fiber, local components.
  [[nodiscard]] Mat3 fiber_inertia() const;
  /// Number of fiber dimensions m times I minus the fiber-axis projector.
  [[nodiscard]] Mat3 rotation_gradient_tensor() const;

  void validate() const;
};

/// Straight beam of length `length` along frame E3, starting at the origin.
StructureModel make_beam(const Frame& frame, double length, int divisions, const FiberSpec& section,
                         const IsotropicMaterial& mat, std::optional<double> ell = std::nullopt);
/// Flat shell over [0, extent] in the frame E1-E2 plane, thickness t.
StructureModel make_shell(const Frame& frame, const Vec2& extent, const std::array<int, 2>& divisions,
                          double thickness, const IsotropicMaterial& mat, std::optional<double> ell = std::nullopt);
/// Rigid box body centered at the frame origin.
StructureModel make_rigid(const Frame& frame, const Vec3& extents, const IsotropicMaterial& mat,
                          std::optional<double> ell = std::nullopt);

/// sqrt(int |xi|^2 / |F|): radius of gyration of the fiber.
double default_ell(const FiberSpec& fiber);

struct ProjectedPoint {
  Vec2 sigma = Vec2::Zero();
  Vec3 xi = Vec3::Zero();
};

/// Base and fiber coordinates of a global point. Throws NotFound if x is
/// outside the structure volume by more than `tol` (absolute).
ProjectedPoint project(const StructureModel& model, const Vec3& x, double tol = 1e-10);

/// Linear maps from the DOFs of one base element to the ansatz value (3 x n)
/// and its local-frame gradient (9 x n, entry (i, j) at row i + 3 j, i.e.
/// column-major dU_i/dy_j).
struct AnsatzOperator {
  std::vector<Index> dofs;
  Matrix value;
  Matrix gradient;
};
AnsatzOperator ansatz_operator(const StructureModel& model, Index element, const Vec2& base_ref, const Vec3& xi);

/// Locates sigma in the base mesh and evaluates the ansatz there.
Vec3 ansatz_eval(const StructureModel& model, const Vector& field, const Vec2& sigma, const Vec3& xi);
Mat3 ansatz_gradient(const StructureModel& model, const Vector& field, const Vec2& sigma, const Vec3& xi);

/// Gram matrix of the structural inner product
///
///     int_C [ |F| (Sigma.Y + l^2 dSigma.dY) + theta.i_F lambda
///             + l^2 dtheta.i_F dlambda + |F| l^2 theta.T lambda ]
///
/// with T = rotation_gradient_tensor(). Elements with region[e] == false
/// are skipped (empty region = all elements).
SparseSym structure_gram(const StructureModel& model, double ell, const std::vector<bool>& region = {});

double structural_inner_product(const StructureModel& model, const Vector& f1, const Vector& f2,
                                const std::vector<bool>& region = {});

/// Stiffness over all structure DOFs (zero for rigid bodies).
SparseSym structure_stiffness(const StructureModel& model);

/// Generalized field of the rigid motion u = c + omega x (x - origin).
Vector rigid_motion_field(const StructureModel& model, const Vec3& c_local, const Vec3& omega_local);

/// Axial force per beam element (beam models only).
std::vector<double> beam_axial_forces(const StructureModel& model, const Vector& field);

/// Section forces (Q1, Q2, N) per beam element in the local frame.
std::vector<Vec3> beam_section_forces(const StructureModel& model, const Vector& field);

}  // namespace embedfem
