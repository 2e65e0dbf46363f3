#include "embedfem/errors.hpp"
#include "embedfem/problem.hpp"
#include "embedfem/saddle.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

using namespace embedfem;

namespace {

DofMap clamp(const SolidMesh& m, const std::string& face) {
  DofMap d(m.num_dofs());
  fix_nodes(d, m.node_sets.at(face), {true, true, true}, Vec3::Zero());
  d.finalize();
  return d;
}

StructureInstance beam_instance(const StructureModel& model, int fiber_points = 2) {
  StructureInstance s;
  s.model = model;
  s.dofs = DofMap::identity(model.num_dofs());
  s.load = Vector::Zero(model.num_dofs());
  s.fiber_points = fiber_points;
  return s;
}

CoupledProblem bending_problem() {
  CoupledProblem p;
  p.mesh = build_hex_grid(Vec3(-0.5, -0.5, 0), Vec3(1, 1, 5), {2, 2, 10});
  p.materials.assign(p.mesh.hexes.size(), IsotropicMaterial{10.0, 0.0});
  p.solid_dofs = clamp(p.mesh, "zmin");
  p.solid_load = traction_load(p.mesh, "zmax", [](const Vec3& x) { return Vec3(0, 0, 0.03 * x[0]); });
  p.structures.push_back(beam_instance(make_beam(Frame{}, 5.0, 10, FiberSpec{FiberShape::rectangle, Vec3(0.25, 0.25, 0)},
                                                 IsotropicMaterial{5120.0, 0.0})));
  return p;
}

}  // namespace

TEST(Saddle, BendingBenchmarkUnknownCount) {
  const Solution s = solve_problem(bending_problem());
  EXPECT_EQ(s.diagnostics.unknowns, 402);
  EXPECT_EQ(s.diagnostics.solid_unknowns, 270);
  EXPECT_EQ(s.diagnostics.structure_unknowns, 66);
  EXPECT_EQ(s.diagnostics.multiplier_unknowns, 66);
  EXPECT_LE(s.diagnostics.constraint_residual, 1e-10);
  EXPECT_LE(s.diagnostics.stats.residual, 1e-10);
  EXPECT_LE(s.diagnostics.energy_identity_error, 1e-9);
}

TEST(Saddle, EmptyStructureListIsSolidOnly) {
  CoupledProblem p = bending_problem();
  p.structures.clear();
  const SparseSym k = assemble_solid(p.mesh, p.materials);
  const SaddleSystem sys = assemble_saddle(k, p.solid_dofs, p.solid_load, {});
  EXPECT_EQ(sys.size(), 270);
  EXPECT_EQ((Matrix(sys.kkt()) - Matrix(p.solid_dofs.reduce(k).matrix())).norm(), 0.0);
}

TEST(Saddle, InertiaMatchesPrimalAndMultiplierCounts) {
  CoupledProblem p;
  p.mesh = build_hex_grid(Vec3(-0.5, -0.5, 0), Vec3(1, 1, 2), {2, 2, 3});
  p.materials.assign(p.mesh.hexes.size(), IsotropicMaterial{10.0, 0.2});
  p.solid_dofs = clamp(p.mesh, "zmin");
  p.solid_load = Vector::Zero(p.mesh.num_dofs());
  p.structures.push_back(beam_instance(make_beam(Frame{}, 2.0, 3, FiberSpec{FiberShape::rectangle, Vec3(0.25, 0.25, 0)},
                                                 IsotropicMaterial{100.0, 0.0})));
  const SparseSym k = assemble_solid(p.mesh, p.materials);
  const SparseSym kb = structure_stiffness(p.structures[0].model);
  const CouplingOperator op = build_coupling(p.structures[0], p.mesh);
  const SaddleSystem sys = assemble_saddle(k, p.solid_dofs, p.solid_load,
                                           {{&kb, &p.structures[0].dofs, Vector::Zero(kb.size()), &op}});
  ASSERT_LE(sys.size(), 200);
  Eigen::SelfAdjointEigenSolver<Matrix> es{Matrix(sys.kkt())};
  const double scale = es.eigenvalues().cwiseAbs().maxCoeff();
  Index pos = 0, neg = 0, zero = 0;
  for (Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double l = es.eigenvalues()[i];
    if (std::abs(l) < 1e-12 * scale) ++zero;
    else if (l > 0) ++pos;
    else ++neg;
  }
  EXPECT_EQ(pos, sys.layout.primal);
  EXPECT_EQ(neg, sys.layout.multipliers);
  EXPECT_EQ(zero, 0);
}

TEST(Saddle, CoMovingBeamGivesUniformStrain) {
  CoupledProblem p;
  p.mesh = build_hex_grid(Vec3(-0.5, -0.5, 0), Vec3(1, 1, 2), {2, 2, 4});
  const IsotropicMaterial mat{10.0, 0.0};
  p.materials.assign(p.mesh.hexes.size(), mat);
  const double eps = 0.01;
  DofMap d(p.mesh.num_dofs());
  fix_nodes(d, p.mesh.node_sets.at("zmin"), {false, false, true}, Vec3::Zero());
  fix_nodes(d, p.mesh.node_sets.at("zmax"), {false, false, true}, Vec3(0, 0, 2 * eps));
  d.fix(solid_dof(0, 0), 0.0);
  d.fix(solid_dof(0, 1), 0.0);
  d.fix(solid_dof(2, 1), 0.0);
  d.finalize();
  p.solid_dofs = d;
  p.solid_load = Vector::Zero(p.mesh.num_dofs());
  StructureInstance s = beam_instance(
      make_beam(Frame{}, 2.0, 4, FiberSpec{FiberShape::rectangle, Vec3(0.25, 0.25, 0)}, mat));
  p.structures.push_back(s);
  const Solution sol = solve_problem(p);
  for (Index n = 0; n < p.mesh.num_nodes(); ++n) {
    EXPECT_NEAR(sol.u[solid_dof(n, 2)], eps * p.mesh.nodes[n][2], 1e-12);
    EXPECT_NEAR(sol.u[solid_dof(n, 0)], 0.0, 1e-12);
  }
  for (Index n = 0; n < s.model.num_nodes(); ++n) {
    EXPECT_NEAR(sol.fields[0][s.model.sigma_dof(n, 2)], eps * s.model.base.nodes[n][0], 1e-12);
  }
  EXPECT_TRUE(sol.multipliers[0].allFinite());
  EXPECT_LE(sol.diagnostics.constraint_residual, 1e-10);
}

TEST(Saddle, FloatingStructureIsSingular) {
  CoupledProblem p = bending_problem();
  p.structures[0].coupled = false;
  try {
    solve_problem(p);
    FAIL() << "expected a well-posedness error";
  } catch (const WellPosednessError& e) {
    EXPECT_GE(e.pivot_index(), 0);
  }
}

TEST(Saddle, DeterministicAndLinear) {
  const CoupledProblem p = bending_problem();
  const Solution a = solve_problem(p);
  const Solution b = solve_problem(p);
  EXPECT_EQ((a.u - b.u).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ((a.fields[0] - b.fields[0]).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ((a.multipliers[0] - b.multipliers[0]).cwiseAbs().maxCoeff(), 0.0);
  CoupledProblem q = p;
  q.solid_load *= 3.0;
  const Solution c = solve_problem(q);
  EXPECT_LT((c.u - 3.0 * a.u).norm(), 1e-10 * c.u.norm());
  EXPECT_LT((c.fields[0] - 3.0 * a.fields[0]).norm(), 1e-10 * c.fields[0].norm());
  EXPECT_LT((c.multipliers[0] - 3.0 * a.multipliers[0]).norm(), 1e-9 * c.multipliers[0].norm());
}
