#include "embedfem/structural_models.hpp"

#include "embedfem/errors.hpp"
#include "embedfem/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace embedfem {

int FiberSpec::dim() const {
  switch (shape) {
    case FiberShape::segment: return 1;
    case FiberShape::rectangle:
    case FiberShape::circle: return 2;
    case FiberShape::box: return 3;
  }
  return 0;
}

double FiberSpec::measure() const {
  switch (shape) {
    case FiberShape::segment: return size[0];
    case FiberShape::rectangle: return size[0] * size[1];
    case FiberShape::circle: return std::numbers::pi * size[0] * size[0];
    case FiberShape::box: return size[0] * size[1] * size[2];
  }
  return 0.0;
}

Vec3 FiberSpec::second_moments() const {
  const double m = measure();
  switch (shape) {
    case FiberShape::segment: return Vec3(m * size[0] * size[0] / 12.0, 0.0, 0.0);
    case FiberShape::rectangle: return Vec3(m * size[0] * size[0] / 12.0, m * size[1] * size[1] / 12.0, 0.0);
    case FiberShape::circle: {
      const double r2 = size[0] * size[0];
      return Vec3(m * r2 / 4.0, m * r2 / 4.0, 0.0);
    }
    case FiberShape::box: return m / 12.0 * size.cwiseProduct(size);
  }
  return Vec3::Zero();
}

double FiberSpec::torsion_constant() const {
  if (shape == FiberShape::circle) return 0.5 * std::numbers::pi * std::pow(size[0], 4);
  if (shape != FiberShape::rectangle) throw InvalidArgument("torsion constant needs a beam cross-section");
  const double a = std::max(size[0], size[1]);
  const double c = std::min(size[0], size[1]);
  double sum = 0.0;
  for (int n = 1; n < 200; n += 2) sum += std::tanh(n * std::numbers::pi * a / (2.0 * c)) / std::pow(n, 5);
  return a * c * c * c / 3.0 * (1.0 - 192.0 / std::pow(std::numbers::pi, 5) * (c / a) * sum);
}

bool FiberSpec::contains(const Vec3& xi, double tol) const {
  switch (shape) {
    case FiberShape::segment: return std::abs(xi[0]) <= 0.5 * size[0] + tol;
    case FiberShape::rectangle:
      return std::abs(xi[0]) <= 0.5 * size[0] + tol && std::abs(xi[1]) <= 0.5 * size[1] + tol;
    case FiberShape::circle: return std::hypot(xi[0], xi[1]) <= size[0] + tol;
    case FiberShape::box:
      return (xi.cwiseAbs().array() <= 0.5 * size.array() + tol).all();
  }
  return false;
}

void FiberSpec::validate() const {
  for (int i = 0; i < (shape == FiberShape::circle ? 1 : dim()); ++i) {
    if (!(size[i] > 0.0)) throw InvalidArgument("fiber sizes must be positive");
  }
}

// ---------------------------------------------------------------------------

Vec3 StructureModel::local_coords(const Vec2& sigma, const Vec3& xi) const {
  switch (kind) {
    case StructureKind::beam: return Vec3(xi[0], xi[1], sigma[0]);
    case StructureKind::shell: return Vec3(sigma[0], sigma[1], xi[0]);
    case StructureKind::rigid: return xi;
  }
  return Vec3::Zero();
}

Vec3 StructureModel::embed(const Vec2& sigma, const Vec3& xi) const {
  return frame().to_global(local_coords(sigma, xi));
}

Eigen::Matrix<double, 3, Eigen::Dynamic> StructureModel::rotation_basis() const {
  const int r = rotation_dofs();
  Eigen::Matrix<double, 3, Eigen::Dynamic> p = Eigen::Matrix<double, 3, Eigen::Dynamic>::Zero(3, r);
  for (int i = 0; i < r; ++i) p(i, i) = 1.0;
  return p;
}

Vec3 StructureModel::fiber_vector(const Vec3& xi) const {
  switch (kind) {
    case StructureKind::beam: return Vec3(xi[0], xi[1], 0.0);
    case StructureKind::shell: return Vec3(0.0, 0.0, xi[0]);
    case StructureKind::rigid: return xi;
  }
  return Vec3::Zero();
}

Mat3 StructureModel::fiber_inertia() const {
  const Vec3 sm = fiber.second_moments();
  Vec3 local = Vec3::Zero();
  for (int i = 0; i < fiber.dim(); ++i) local[fiber_axis(i)] = sm[i];
  Mat3 inertia = Mat3::Zero();
  for (int k = 0; k < 3; ++k) inertia(k, k) = local.sum() - local[k];
  return inertia;
}

Mat3 StructureModel::rotation_gradient_tensor() const {
  Mat3 t = fiber.dim() * Mat3::Identity();
  for (int i = 0; i < fiber.dim(); ++i) t(fiber_axis(i), fiber_axis(i)) -= 1.0;
  return t;
}

void StructureModel::validate() const {
  validate_frame(frame());
  fiber.validate();
  material.validate();
  if (base.dim + fiber.dim() != 3) throw InvalidArgument("structure: base and fiber dimensions must add to 3");
  const int expected_fiber = kind == StructureKind::beam ? 2 : (kind == StructureKind::shell ? 1 : 3);
  if (fiber.dim() != expected_fiber) throw InvalidArgument("structure: fiber shape does not match the kind");
  if (!(ell > 0.0)) throw InvalidArgument("structure: ell must be positive");
  if (!(shear_factor > 0.0)) throw InvalidArgument("structure: shear factor must be positive");
}

double default_ell(const FiberSpec& fiber) { return std::sqrt(fiber.second_moments().sum() / fiber.measure()); }

StructureModel make_beam(const Frame& frame, double length, int divisions, const FiberSpec& section,
                         const IsotropicMaterial& mat, std::optional<double> ell) {
  StructureModel m;
  m.kind = StructureKind::beam;
  m.base = build_base_mesh(BaseKind::line, frame, Vec2(length, 0.0), {divisions, 0});
  m.fiber = section;
  m.material = mat;
  m.fiber.validate();
  m.ell = ell.value_or(default_ell(section));
  m.validate();
  return m;
}

StructureModel make_shell(const Frame& frame, const Vec2& extent, const std::array<int, 2>& divisions,
                          double thickness, const IsotropicMaterial& mat, std::optional<double> ell) {
  StructureModel m;
  m.kind = StructureKind::shell;
  m.base = build_base_mesh(BaseKind::quad_grid, frame, extent, divisions);
  m.fiber = FiberSpec{FiberShape::segment, Vec3(thickness, 0.0, 0.0)};
  m.material = mat;
  m.fiber.validate();
  m.ell = ell.value_or(default_ell(m.fiber));
  m.validate();
  return m;
}

StructureModel make_rigid(const Frame& frame, const Vec3& extents, const IsotropicMaterial& mat,
                          std::optional<double> ell) {
  StructureModel m;
  m.kind = StructureKind::rigid;
  m.base = build_base_mesh(BaseKind::point, frame, Vec2::Zero(), {0, 0});
  m.fiber = FiberSpec{FiberShape::box, extents};
  m.material = mat;
  m.fiber.validate();
  m.ell = ell.value_or(default_ell(m.fiber));
  m.validate();
  return m;
}

ProjectedPoint project(const StructureModel& model, const Vec3& x, double tol) {
  const Vec3 y = model.frame().to_local(x);
  ProjectedPoint p;
  bool inside = true;
  switch (model.kind) {
    case StructureKind::beam:
      p.sigma = Vec2(y[2], 0.0);
      p.xi = Vec3(y[0], y[1], 0.0);
      inside = y[2] >= -tol && y[2] <= model.base.extent[0] + tol;
      break;
    case StructureKind::shell:
      p.sigma = Vec2(y[0], y[1]);
      p.xi = Vec3(y[2], 0.0, 0.0);
      inside = y[0] >= -tol && y[0] <= model.base.extent[0] + tol && y[1] >= -tol &&
               y[1] <= model.base.extent[1] + tol;
      break;
    case StructureKind::rigid:
      p.xi = y;
      break;
  }
  if (!inside || !model.fiber.contains(p.xi, tol)) throw NotFound("project: point outside the structure");
  return p;
}

AnsatzOperator ansatz_operator(const StructureModel& model, Index element, const Vec2& base_ref, const Vec3& xi) {
  const int r = model.rotation_dofs();
  const int stride = 3 + r;
  const int npe = model.base.nodes_per_element();
  const BaseShape s = base_shape(model.base, element, base_ref);
  AnsatzOperator op;
  op.dofs.reserve(static_cast<std::size_t>(npe * stride));
  for (int a = 0; a < npe; ++a) {
    const Index node = model.base.dim == 0 ? 0 : model.base.elements[static_cast<std::size_t>(element)][a];
    for (int c = 0; c < 3; ++c) op.dofs.push_back(model.sigma_dof(node, c));
    for (int c = 0; c < r; ++c) op.dofs.push_back(model.theta_dof(node, c));
  }
  const auto p = model.rotation_basis();
  const Matrix rot_value = -skew(model.fiber_vector(xi)) * p;  // theta -> theta_vec x xi_vec
  op.value = Matrix::Zero(3, npe * stride);
  op.gradient = Matrix::Zero(9, npe * stride);
  for (int a = 0; a < npe; ++a) {
    const int col = a * stride;
    op.value.block(0, col, 3, 3) = s.value[a] * Mat3::Identity();
    op.value.block(0, col + 3, 3, r) = s.value[a] * rot_value;
    for (int alpha = 0; alpha < model.base.dim; ++alpha) {
      const int j = model.base_axis(alpha);
      const double d = s.grad_sigma[a][alpha];
      op.gradient.block(3 * j, col, 3, 3) = d * Mat3::Identity();
      op.gradient.block(3 * j, col + 3, 3, r) = d * rot_value;
    }
    for (int i = 0; i < model.fiber.dim(); ++i) {
      const int j = model.fiber_axis(i);
      op.gradient.block(3 * j, col + 3, 3, r) = s.value[a] * (-skew(Vec3::Unit(j)) * p);
    }
  }
  return op;
}

namespace {

std::pair<Index, Vec2> base_location(const StructureModel& model, const Vec2& sigma) {
  if (model.base.dim == 0) return {0, Vec2::Zero()};
  const auto loc = locate_base(model.base, sigma);
  if (!loc) throw NotFound("ansatz: base coordinate outside the base mesh");
  return *loc;
}

Vector gather(const AnsatzOperator& op, const Vector& field) {
  Vector v(static_cast<Index>(op.dofs.size()));
  for (std::size_t i = 0; i < op.dofs.size(); ++i) v[static_cast<Index>(i)] = field[op.dofs[i]];
  return v;
}

}  // namespace

Vec3 ansatz_eval(const StructureModel& model, const Vector& field, const Vec2& sigma, const Vec3& xi) {
  const auto [e, ref] = base_location(model, sigma);
  const AnsatzOperator op = ansatz_operator(model, e, ref, xi);
  return op.value * gather(op, field);
}

Mat3 ansatz_gradient(const StructureModel& model, const Vector& field, const Vec2& sigma, const Vec3& xi) {
  const auto [e, ref] = base_location(model, sigma);
  const AnsatzOperator op = ansatz_operator(model, e, ref, xi);
  const Vector g = op.gradient * gather(op, field);
  return Eigen::Map<const Mat3>(g.data());
}

SparseSym structure_gram(const StructureModel& model, double ell, const std::vector<bool>& region) {
  const int r = model.rotation_dofs();
  const double area = model.fiber.measure();
  const auto p = model.rotation_basis();
  const Matrix inertia = p.transpose() * model.fiber_inertia() * p;
  const Matrix t_rot = p.transpose() * model.rotation_gradient_tensor() * p;
  const double l2 = ell * ell;
  std::vector<Triplet> upper;

  auto add_pair = [&](Index na, Index nb, double mass, double stiff) {
    for (int c = 0; c < 3; ++c) {
      const Index i = model.sigma_dof(na, c);
      const Index j = model.sigma_dof(nb, c);
      const double v = area * (mass + l2 * stiff);
      if (i <= j && v != 0.0) upper.emplace_back(i, j, v);
    }
    for (int c = 0; c < r; ++c) {
      for (int d = 0; d < r; ++d) {
        const Index i = model.theta_dof(na, c);
        const Index j = model.theta_dof(nb, d);
        const double v = (mass + l2 * stiff) * inertia(c, d) + area * l2 * mass * t_rot(c, d);
        if (i <= j && v != 0.0) upper.emplace_back(i, j, v);
      }
    }
  };

  if (model.base.dim == 0) {
    add_pair(0, 0, 1.0, 0.0);
    return sparse_sym_from_upper(model.num_dofs(), upper);
  }
  const GaussRule& g = gauss_legendre(2);
  const int npe = model.base.nodes_per_element();
  for (Index e = 0; e < model.base.num_elements(); ++e) {
    if (!region.empty() && !region[static_cast<std::size_t>(e)]) continue;
    const auto& conn = model.base.elements[static_cast<std::size_t>(e)];
    const Vec2 d = model.base.nodes[conn[model.base.dim == 1 ? 1 : 2]] - model.base.nodes[conn[0]];
    const double jac = model.base.dim == 1 ? 0.5 * d[0] : 0.25 * d[0] * d[1];
    const int nq1 = model.base.dim == 2 ? 2 : 1;
    for (int q0 = 0; q0 < 2; ++q0) {
      for (int q1 = 0; q1 < nq1; ++q1) {
        const Vec2 ref(g.points[q0], model.base.dim == 2 ? g.points[q1] : 0.0);
        const double w = g.weights[q0] * (model.base.dim == 2 ? g.weights[q1] : 1.0) * jac;
        const BaseShape s = base_shape(model.base, e, ref);
        for (int a = 0; a < npe; ++a) {
          for (int b = 0; b < npe; ++b) {
            add_pair(conn[a], conn[b], w * s.value[a] * s.value[b], w * s.grad_sigma[a].dot(s.grad_sigma[b]));
          }
        }
      }
    }
  }
  return sparse_sym_from_upper(model.num_dofs(), upper);
}

double structural_inner_product(const StructureModel& model, const Vector& f1, const Vector& f2,
                                const std::vector<bool>& region) {
  if (f1.size() != model.num_dofs() || f2.size() != model.num_dofs()) {
    throw InvalidArgument("structural_inner_product: field size does not match the model");
  }
  return structure_gram(model, model.ell, region).bilinear_form(f1, f2);
}

namespace {

template <int N>
void scatter_upper(std::vector<Triplet>& upper, const std::vector<Index>& dofs,
                   const Eigen::Matrix<double, N, N>& k) {
  for (int a = 0; a < N; ++a) {
    for (int b = 0; b < N; ++b) {
      if (dofs[a] <= dofs[b] && k(a, b) != 0.0) upper.emplace_back(dofs[a], dofs[b], k(a, b));
    }
  }
}

std::vector<Index> element_dofs(const StructureModel& model, Index e) {
  const int r = model.rotation_dofs();
  std::vector<Index> dofs;
  const auto& conn = model.base.elements[static_cast<std::size_t>(e)];
  for (int a = 0; a < model.base.nodes_per_element(); ++a) {
    for (int c = 0; c < 3; ++c) dofs.push_back(model.sigma_dof(conn[a], c));
    for (int c = 0; c < r; ++c) dofs.push_back(model.theta_dof(conn[a], c));
  }
  return dofs;
}

// Generalized strains (axial, curvature 1, curvature 2, twist, shear 1,
// shear 2) at the element midpoint. DOFs per node: Sigma(3), theta(3).
Eigen::Matrix<double, 6, 12> beam_strain_matrix(double len) {
  Eigen::Matrix<double, 6, 12> b = Eigen::Matrix<double, 6, 12>::Zero();
  for (int a = 0; a < 2; ++a) {
    const double d = (a == 0 ? -1.0 : 1.0) / len;
    const int o = 6 * a;
    b(0, o + 2) = d;
    b(1, o + 3) = d;
    b(2, o + 4) = d;
    b(3, o + 5) = d;
    b(4, o + 0) = d;
    b(4, o + 4) = -0.5;
    b(5, o + 1) = d;
    b(5, o + 3) = 0.5;
  }
  return b;
}

Eigen::Matrix<double, 6, 6> beam_section_stiffness(const StructureModel& model) {
  const double e = model.material.E;
  const double g = model.material.mu();
  const double a = model.fiber.measure();
  const Vec3 sm = model.fiber.second_moments();
  Eigen::Matrix<double, 6, 1> d;
  d << e * a, e * sm[1], e * sm[0], g * model.fiber.torsion_constant(), model.shear_factor * g * a,
      model.shear_factor * g * a;
  return d.asDiagonal();
}

Eigen::Matrix3d plane_stress(const IsotropicMaterial& m) {
  Eigen::Matrix3d d;
  const double f = m.E / (1.0 - m.nu * m.nu);
  d << f, f * m.nu, 0.0, f * m.nu, f, 0.0, 0.0, 0.0, f * 0.5 * (1.0 - m.nu);
  return d;
}

using ShellMatrix = Eigen::Matrix<double, 20, 20>;

// Membrane and bending with 2x2 Gauss; the transverse shear strain along
// each base axis is sampled on the element's mid-line across that axis
// (1 x 2 and 2 x 1 rules), which removes shear locking without spurious
// zero-energy modes on rectangles.
ShellMatrix shell_element_stiffness(const StructureModel& model, Index e) {
  const auto& conn = model.base.elements[static_cast<std::size_t>(e)];
  const Vec2 d = model.base.nodes[conn[2]] - model.base.nodes[conn[0]];
  const double jac = 0.25 * d[0] * d[1];
  const double t = model.fiber.size[0];
  const Eigen::Matrix3d dps = plane_stress(model.material);
  const Eigen::Matrix3d dm = t * dps;
  const Eigen::Matrix3d db = t * t * t / 12.0 * dps;
  const double ds = model.shear_factor * model.material.mu() * t;
  const GaussRule& g = gauss_legendre(2);
  ShellMatrix k = ShellMatrix::Zero();
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const Vec2 ref(g.points[i], g.points[j]);
      const double w = g.weights[i] * g.weights[j] * jac;
      const BaseShape s = base_shape(model.base, e, ref);
      Eigen::Matrix<double, 3, 20> bm = Eigen::Matrix<double, 3, 20>::Zero();
      Eigen::Matrix<double, 3, 20> bb = Eigen::Matrix<double, 3, 20>::Zero();
      for (int a = 0; a < 4; ++a) {
        const int o = 5 * a;
        const double dx = s.grad_sigma[a][0];
        const double dy = s.grad_sigma[a][1];
        bm(0, o + 0) = dx;
        bm(1, o + 1) = dy;
        bm(2, o + 0) = dy;
        bm(2, o + 1) = dx;
        // phi = (theta_2, -theta_1)
        bb(0, o + 4) = dx;
        bb(1, o + 3) = -dy;
        bb(2, o + 4) = dy;
        bb(2, o + 3) = -dx;
      }
      k.noalias() += w * (bm.transpose() * dm * bm + bb.transpose() * db * bb);
    }
  }
  for (int axis = 0; axis < 2; ++axis) {
    for (int q = 0; q < 2; ++q) {
      Vec2 ref;
      ref[axis] = 0.0;
      ref[1 - axis] = g.points[q];
      const double w = 2.0 * g.weights[q] * jac;
      const BaseShape s = base_shape(model.base, e, ref);
      Eigen::Matrix<double, 1, 20> bs = Eigen::Matrix<double, 1, 20>::Zero();
      for (int a = 0; a < 4; ++a) {
        const int o = 5 * a;
        bs(0, o + 2) = s.grad_sigma[a][axis];
        // gamma_1 = Sigma_3,1 + theta_2 ; gamma_2 = Sigma_3,2 - theta_1
        if (axis == 0) bs(0, o + 4) = s.value[a];
        else bs(0, o + 3) = -s.value[a];
      }
      k.noalias() += (w * ds) * (bs.transpose() * bs);
    }
  }
  return 0.5 * (k + k.transpose());
}

}  // namespace

SparseSym structure_stiffness(const StructureModel& model) {
  std::vector<Triplet> upper;
  switch (model.kind) {
    case StructureKind::rigid: break;
    case StructureKind::beam: {
      const auto d = beam_section_stiffness(model);
      for (Index e = 0; e < model.base.num_elements(); ++e) {
        const auto& conn = model.base.elements[static_cast<std::size_t>(e)];
        const double len = model.base.nodes[conn[1]][0] - model.base.nodes[conn[0]][0];
        const auto b = beam_strain_matrix(len);
        Eigen::Matrix<double, 12, 12> k = len * (b.transpose() * d * b);
        k = 0.5 * (k + k.transpose()).eval();
        scatter_upper<12>(upper, element_dofs(model, e), k);
      }
      break;
    }
    case StructureKind::shell: {
      for (Index e = 0; e < model.base.num_elements(); ++e) {
        scatter_upper<20>(upper, element_dofs(model, e), shell_element_stiffness(model, e));
      }
      break;
    }
  }
  return sparse_sym_from_upper(model.num_dofs(), upper);
}

Vector rigid_motion_field(const StructureModel& model, const Vec3& c_local, const Vec3& omega_local) {
  Vector f = Vector::Zero(model.num_dofs());
  for (Index n = 0; n < model.num_nodes(); ++n) {
    const Vec3 y = model.local_coords(model.base.nodes[static_cast<std::size_t>(n)], Vec3::Zero());
    const Vec3 s = c_local + omega_local.cross(y);
    for (int c = 0; c < 3; ++c) f[model.sigma_dof(n, c)] = s[c];
    for (int c = 0; c < model.rotation_dofs(); ++c) f[model.theta_dof(n, c)] = omega_local[c];
  }
  return f;
}

std::vector<double> beam_axial_forces(const StructureModel& model, const Vector& field) {
  if (model.kind != StructureKind::beam) throw InvalidArgument("beam_axial_forces: not a beam");
  const double ea = model.material.E * model.fiber.measure();
  std::vector<double> n;
  n.reserve(static_cast<std::size_t>(model.base.num_elements()));
  for (Index e = 0; e < model.base.num_elements(); ++e) {
    const auto& conn = model.base.elements[static_cast<std::size_t>(e)];
    const double len = model.base.nodes[conn[1]][0] - model.base.nodes[conn[0]][0];
    n.push_back(ea * (field[model.sigma_dof(conn[1], 2)] - field[model.sigma_dof(conn[0], 2)]) / len);
  }
  return n;
}

std::vector<Vec3> beam_section_forces(const StructureModel& model, const Vector& field) {
  if (model.kind != StructureKind::beam) throw InvalidArgument("beam_section_forces: not a beam");
  const auto d = beam_section_stiffness(model);
  std::vector<Vec3> forces;
  forces.reserve(static_cast<std::size_t>(model.base.num_elements()));
  for (Index e = 0; e < model.base.num_elements(); ++e) {
    const auto& conn = model.base.elements[static_cast<std::size_t>(e)];
    const double len = model.base.nodes[conn[1]][0] - model.base.nodes[conn[0]][0];
    const std::vector<Index> dofs = element_dofs(model, e);
    Eigen::Matrix<double, 12, 1> q;
    for (int a = 0; a < 12; ++a) q[a] = field[dofs[static_cast<std::size_t>(a)]];
    const Eigen::Matrix<double, 6, 1> s = d * (beam_strain_matrix(len) * q);
    forces.emplace_back(s[4], s[5], s[0]);
  }
  return forces;
}

}  // namespace embedfem
