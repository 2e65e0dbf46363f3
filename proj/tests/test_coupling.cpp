#include "embedfem/coupling.hpp"
#include "embedfem/errors.hpp"

#include <gtest/gtest.h>

#include <Eigen/SVD>

#include <numbers>
#include <random>

using namespace embedfem;

namespace {

SolidMesh bending_mesh(int nx = 2, int nz = 10) {
  return build_hex_grid(Vec3(-0.5, -0.5, 0), Vec3(1, 1, 5), {nx, nx, nz});
}

StructureModel core_beam(int n = 10) {
  return make_beam(Frame{}, 5.0, n, FiberSpec{FiberShape::rectangle, Vec3(0.25, 0.25, 0)},
                   IsotropicMaterial{5120.0, 0.0});
}

Frame tilted_frame(const Vec3& origin) {
  Frame f;
  f.origin = origin;
  f.axes = Eigen::AngleAxisd(0.4, Vec3(0.3, -1.0, 0.6).normalized()).toRotationMatrix();
  return f;
}

Vector solid_rigid(const SolidMesh& m, const Vec3& c, const Vec3& w) {
  Vector u(m.num_dofs());
  for (Index n = 0; n < m.num_nodes(); ++n) u.segment<3>(3 * n) = c + w.cross(m.nodes[n]);
  return u;
}

Vector structure_rigid(const StructureModel& s, const Vec3& c, const Vec3& w) {
  const Mat3& r = s.frame().axes;
  return rigid_motion_field(s, r.transpose() * (c + w.cross(s.frame().origin)), r.transpose() * w);
}

double weight_sum(const FiberQuadrature& q) {
  double s = 0.0;
  for (const auto& p : q.points) s += p.weight;
  return s;
}

}  // namespace

TEST(FiberQuadrature, BeamPointCountsAndWeights) {
  const SolidMesh m = bending_mesh();
  const StructureModel beam = core_beam();
  const FiberQuadrature q4 = build_fiber_quadrature(beam, m, 2);
  EXPECT_EQ(q4.points.size(), 40u);
  EXPECT_EQ(q4.dropped, 0);
  EXPECT_NEAR(weight_sum(q4), 5 * 0.0625, 1e-10);
  const FiberQuadrature q16 = build_fiber_quadrature(beam, m, 4);
  EXPECT_EQ(q16.points.size(), 160u);
  for (const auto& p : q16.points) {
    EXPECT_LT((to_physical(m, p.solid) - beam.embed(p.sigma, p.xi)).norm(), 1e-12);
  }
}

TEST(FiberQuadrature, CircleAndShellWeights) {
  const SolidMesh m = bending_mesh();
  const StructureModel rod = make_beam(Frame{}, 5.0, 7, FiberSpec{FiberShape::circle, Vec3(0.2, 0, 0)}, {});
  EXPECT_NEAR(weight_sum(build_fiber_quadrature(rod, m, 3)), 5 * std::numbers::pi * 0.04, 1e-10);

  Frame f;
  f.origin = Vec3(-0.5, 0, 0);
  f.axes.col(0) = Vec3(0, 0, 1);
  f.axes.col(1) = Vec3(1, 0, 0);
  f.axes.col(2) = Vec3(0, 1, 0);
  const StructureModel shell = make_shell(f, Vec2(5, 1), {20, 4}, 0.25, {});
  const FiberQuadrature q2 = build_fiber_quadrature(shell, m, 2);
  EXPECT_EQ(q2.points.size(), 80u * 4 * 2);
  EXPECT_NEAR(weight_sum(q2), 5 * 0.25, 1e-10);
  EXPECT_EQ(build_fiber_quadrature(shell, m, 4).points.size(), 80u * 4 * 4);
}

TEST(FiberQuadrature, PartialEmbeddingDropsPoints) {
  const SolidMesh m = build_hex_grid(Vec3::Zero(), Vec3::Ones(), {2, 2, 2});
  Frame f;
  f.origin = Vec3(0.5, 0.5, 0.5);
  const StructureModel beam = make_beam(f, 1.0, 4, FiberSpec{FiberShape::rectangle, Vec3(0.1, 0.1, 0)}, {});
  const FiberQuadrature q = build_fiber_quadrature(beam, m, 2);
  EXPECT_EQ(q.dropped, 8);  // two outer elements, four fiber points each
  EXPECT_NEAR(weight_sum(q), 0.5 * 0.01, 1e-12);
  Frame away;
  away.origin = Vec3(3, 3, 3);
  const StructureModel lost = make_beam(away, 1.0, 2, FiberSpec{FiberShape::rectangle, Vec3(0.1, 0.1, 0)}, {});
  EXPECT_THROW(build_fiber_quadrature(lost, m, 2), ConfigurationError);
  const CouplingOperator op = assemble_coupling(q, m, beam);
  EXPECT_EQ(op.space.nodes.size(), 3u);  // nodes 0..2 of the base touch kept points
}

TEST(Coupling, RigidMotionIsInKernel) {
  const SolidMesh m = build_hex_grid(Vec3(-1, -1, -1), Vec3(2, 2, 2), {3, 3, 3});
  std::vector<StructureModel> models = {
      make_beam(tilted_frame(Vec3(-0.3, 0.1, -0.4)), 1.0, 4, FiberSpec{FiberShape::circle, Vec3(0.1, 0, 0)}, {}),
      make_shell(tilted_frame(Vec3(-0.4, -0.3, 0.1)), Vec2(0.8, 0.6), {3, 2}, 0.1, {}),
      make_rigid(tilted_frame(Vec3(0.2, 0.1, 0.0)), Vec3(0.5, 0.3, 0.4), {})};
  const Vec3 c(0.1, -0.3, 0.2);
  const Vec3 w(0.05, 0.02, -0.07);
  const Vector u = solid_rigid(m, c, w);
  for (const auto& s : models) {
    const CouplingOperator op = assemble_coupling(build_fiber_quadrature(s, m, 3), m, s);
    const Vector f = structure_rigid(s, c, w);
    EXPECT_LT(kernel_residual(op, f, u), 1e-10) << static_cast<int>(s.kind);
    EXPECT_LT(op.apply(f, u).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Coupling, RandomStateIsNotInKernel) {
  const SolidMesh m = bending_mesh();
  const StructureModel beam = core_beam();
  const CouplingOperator op = assemble_coupling(build_fiber_quadrature(beam, m, 2), m, beam);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n;
  Vector f(beam.num_dofs()), u(m.num_dofs());
  for (Index i = 0; i < f.size(); ++i) f[i] = n(rng);
  for (Index i = 0; i < u.size(); ++i) u[i] = n(rng);
  EXPECT_GT(kernel_residual(op, f, u), 1e-3);
}

TEST(Coupling, StructureBlockMatchesClosedFormGram) {
  const SolidMesh m = build_hex_grid(Vec3(-1, -1, -1), Vec3(2, 2, 2), {2, 2, 2});
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n;
  // Shell: the 2x2 base rule integrates every bilinear product exactly.
  const StructureModel shell = make_shell(tilted_frame(Vec3(-0.4, -0.3, 0.1)), Vec2(0.8, 0.6), {3, 2}, 0.1, {});
  {
    const CouplingOperator op = assemble_coupling(build_fiber_quadrature(shell, m, 2), m, shell);
    ASSERT_EQ(op.rows(), shell.num_dofs());
    const Matrix bs = Matrix(op.b_structure);
    const Matrix g = Matrix(structure_gram(shell, op.ell_c).matrix());
    EXPECT_LT((bs - g).cwiseAbs().maxCoeff(), 1e-12 * g.cwiseAbs().maxCoeff());
  }
  // Beam: one base point per element, exact when the multiplier is constant.
  const StructureModel beam = make_beam(tilted_frame(Vec3(-0.3, 0.1, -0.4)), 1.0, 4,
                                        FiberSpec{FiberShape::rectangle, Vec3(0.2, 0.1, 0)}, {});
  const CouplingOperator op = assemble_coupling(build_fiber_quadrature(beam, m, 2), m, beam);
  Vector z = Vector::Zero(beam.num_dofs());
  const Vec3 gam(n(rng), n(rng), n(rng)), mu(n(rng), n(rng), n(rng));
  for (Index k = 0; k < beam.num_nodes(); ++k) {
    z.segment<3>(beam.sigma_dof(k, 0)) = gam;
    z.segment<3>(beam.theta_dof(k, 0)) = mu;
  }
  Vector f(beam.num_dofs());
  for (Index i = 0; i < f.size(); ++i) f[i] = n(rng);
  const double via_b = z.dot(op.b_structure * f);
  const double closed = structure_gram(beam, op.ell_c).bilinear_form(z, f);
  EXPECT_NEAR(via_b, closed, 1e-12 * std::abs(closed));
  // Constants: |C||F| c.c'
  Vector cst = Vector::Zero(beam.num_dofs());
  const Vec3 cv(0.3, -0.7, 0.2);
  for (Index k = 0; k < beam.num_nodes(); ++k) cst.segment<3>(beam.sigma_dof(k, 0)) = cv;
  Vector cz = Vector::Zero(beam.num_dofs());
  for (Index k = 0; k < beam.num_nodes(); ++k) cz.segment<3>(beam.sigma_dof(k, 0)) = gam;
  EXPECT_NEAR(cz.dot(op.b_structure * cst), 1.0 * 0.02 * cv.dot(gam), 1e-14);
}

TEST(Coupling, FullRowRankWhenStructureIsFiner) {
  const SolidMesh m = bending_mesh();
  const StructureModel beam = core_beam(10);
  const CouplingOperator op = assemble_coupling(build_fiber_quadrature(beam, m, 2), m, beam);
  Matrix b(op.rows(), beam.num_dofs() + m.num_dofs());
  b << Matrix(op.b_structure), Matrix(op.b_solid);
  Eigen::JacobiSVD<Matrix> svd(b);
  const auto& s = svd.singularValues();
  EXPECT_GT(s[s.size() - 1], 1e-8 * s[0]);
}

TEST(Coupling, BitwiseReproducible) {
  const SolidMesh m = bending_mesh();
  const StructureModel beam = core_beam();
  const auto q = build_fiber_quadrature(beam, m, 4);
  const CouplingOperator a = assemble_coupling(q, m, beam);
  const CouplingOperator b = assemble_coupling(build_fiber_quadrature(beam, m, 4), m, beam);
  EXPECT_EQ((Matrix(a.b_solid) - Matrix(b.b_solid)).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ((Matrix(a.b_structure) - Matrix(b.b_structure)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Coupling, RotationRowsCanBeDropped) {
  const SolidMesh m = bending_mesh();
  const StructureModel beam = core_beam();
  CouplingOptions opt;
  opt.rotation_rows = false;
  const CouplingOperator op = assemble_coupling(build_fiber_quadrature(beam, m, 2), m, beam, opt);
  EXPECT_EQ(op.rows(), 33);
}

TEST(Coupling, SolidColumnsConvergeUnderRefinement) {
  // B_solid applied to the interpolant of a smooth field, paired with a
  // fixed multiplier: successive differences shrink at least linearly
  // (pointwise gradients of the trilinear interpolant are first order).
  const StructureModel beam = make_beam(tilted_frame(Vec3(-0.3, 0.1, -0.4)), 1.0, 4,
                                        FiberSpec{FiberShape::rectangle, Vec3(0.2, 0.1, 0)}, {});
  Vector z = Vector::Zero(beam.num_dofs());
  for (Index i = 0; i < z.size(); ++i) z[i] = std::sin(1.0 + i);
  auto field = [](const Vec3& x) {
    return Vec3(std::sin(x[0] + 0.5 * x[1]), std::cos(x[2]) * x[0], std::exp(0.3 * x[1]) * x[2]);
  };
  std::vector<double> values;
  for (int n : {4, 8, 16, 32}) {
    const SolidMesh m = build_hex_grid(Vec3(-1, -1, -1), Vec3(2, 2, 2), {n, n, n});
    Vector u(m.num_dofs());
    for (Index k = 0; k < m.num_nodes(); ++k) u.segment<3>(3 * k) = field(m.nodes[k]);
    const CouplingOperator op = assemble_coupling(build_fiber_quadrature(beam, m, 6), m, beam);
    values.push_back(z.dot(op.b_solid * u));
  }
  const double d1 = std::abs(values[1] - values[0]);
  const double d2 = std::abs(values[2] - values[1]);
  const double d3 = std::abs(values[3] - values[2]);
  EXPECT_GT(d1 / d2, 1.4);
  EXPECT_GT(d2 / d3, 1.4);
}

TEST(Coupling, PeriodicShiftEntersRhs) {
  const SolidMesh m = build_hex_grid(Vec3(-0.5, -0.5, -0.5), Vec3::Ones(), {4, 4, 4});
  Frame f;
  f.origin = Vec3(0.1, 0.1, 0.3);
  const StructureModel beam = make_beam(f, 0.4, 2, FiberSpec{FiberShape::circle, Vec3(0.02, 0, 0)}, {});
  PeriodicWrap wrap;
  wrap.lo = Vec3::Constant(-0.5);
  wrap.hi = Vec3::Constant(0.5);
  wrap.macro_gradient(2, 2) = 0.01;
  const FiberQuadrature q = build_fiber_quadrature(beam, m, 2, wrap);
  EXPECT_EQ(q.dropped, 0);
  const CouplingOperator op = assemble_coupling(q, m, beam);
  EXPECT_GT(op.rhs.cwiseAbs().maxCoeff(), 0.0);
  // The homogeneous macro field is in the kernel: u = eps z e3 everywhere.
  Vector u = Vector::Zero(m.num_dofs());
  for (Index k = 0; k < m.num_nodes(); ++k) u[3 * k + 2] = 0.01 * m.nodes[k][2];
  const Vector s = rigid_motion_field(beam, Vec3::Zero(), Vec3::Zero());
  Vector lifted = s;
  for (Index k = 0; k < beam.num_nodes(); ++k) {
    lifted[beam.sigma_dof(k, 2)] = 0.01 * beam.embed(beam.base.nodes[k], Vec3::Zero())[2];
  }
  EXPECT_LT(kernel_residual(op, lifted, u), 1e-12);
}
