#include "embedfem/errors.hpp"
#include "embedfem/rve.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

using namespace embedfem;

namespace {

double fiber_volume(const RveParameters& p) { return M_PI * p.fiber_radius * p.fiber_radius * p.fiber_length; }

}  // namespace

TEST(Rve, FiberCountsFollowVolumeFraction) {
  const RveParameters p;
  EXPECT_EQ(generate_fiber_ensemble(0.16, FiberOrientation::aligned, 1).fibers.size(), 407u);
  EXPECT_EQ(generate_fiber_ensemble(0.005, FiberOrientation::random, 1).fibers.size(), 13u);
  for (double f : {0.005, 0.01, 0.04, 0.16}) {
    const FiberEnsemble e = generate_fiber_ensemble(f, FiberOrientation::random, 5);
    EXPECT_LE(std::abs(e.achieved_fraction(p) - f), fiber_volume(p));
  }
}

TEST(Rve, FractionOutOfRange) {
  for (double f : {0.0, -0.1, 0.5, 0.7}) {
    EXPECT_THROW(generate_fiber_ensemble(f, FiberOrientation::aligned, 1), InvalidArgument) << f;
  }
}

TEST(Rve, SeededDeterminism) {
  const FiberEnsemble a = generate_fiber_ensemble(0.04, FiberOrientation::random, 42, 3);
  const FiberEnsemble b = generate_fiber_ensemble(0.04, FiberOrientation::random, 42, 3);
  const FiberEnsemble c = generate_fiber_ensemble(0.04, FiberOrientation::random, 42, 4);
  ASSERT_EQ(a.fibers.size(), b.fibers.size());
  bool differs = false;
  for (std::size_t i = 0; i < a.fibers.size(); ++i) {
    EXPECT_EQ(a.fibers[i].center, b.fibers[i].center);
    EXPECT_EQ(a.fibers[i].axis, b.fibers[i].axis);
    differs = differs || a.fibers[i].center != c.fibers[i].center;
  }
  EXPECT_TRUE(differs);
}

TEST(Rve, FiberGeometry) {
  const RveParameters p;
  const FiberEnsemble aligned = generate_fiber_ensemble(0.04, FiberOrientation::aligned, 9);
  const FiberEnsemble random = generate_fiber_ensemble(0.04, FiberOrientation::random, 9);
  for (const auto* e : {&aligned, &random}) {
    for (const Fiber& f : e->fibers) {
      EXPECT_NEAR(f.axis.norm(), 1.0, 1e-14);
      EXPECT_LE(f.center.cwiseAbs().maxCoeff(), 0.5 * p.cell);
      const Vec3 a = f.center - 0.5 * p.fiber_length * f.axis;
      const Vec3 b = f.center + 0.5 * p.fiber_length * f.axis;
      const bool outside = a.cwiseAbs().maxCoeff() > 0.5 * p.cell || b.cwiseAbs().maxCoeff() > 0.5 * p.cell;
      EXPECT_EQ(f.wraps, outside);
    }
  }
  for (const Fiber& f : aligned.fibers) EXPECT_EQ(f.axis, Vec3::UnitZ());

  const StructureModel m = fiber_model(aligned.fibers[0], p);
  EXPECT_EQ(m.kind, StructureKind::beam);
  EXPECT_EQ(m.base.num_elements(), p.fiber_elements);
  EXPECT_NEAR((m.embed(Vec2(0.0, 0.0), Vec3::Zero()) - (aligned.fibers[0].center - Vec3(0, 0, 0.1))).norm(), 0.0, 1e-14);
  EXPECT_NEAR(m.fiber.measure(), M_PI * 0.025 * 0.025, 1e-15);
}

TEST(Rve, PeriodicPairsCoverMaxFaces) {
  const SolidMesh mesh = build_hex_grid(Vec3::Constant(-0.5), Vec3::Ones(), {10, 10, 10});
  const PeriodicConstraints pc = apply_periodic_bcs(mesh, 0.01);
  // 11^3 - 10^3 nodes carry an index 10 on some axis.
  EXPECT_EQ(pc.pairs.size(), 331u);
  std::set<Index> slaves;
  for (const auto& [s, m] : pc.pairs) EXPECT_TRUE(slaves.insert(s).second);
  EXPECT_EQ(pc.dofs.num_tied(), 3 * 331);
  EXPECT_EQ(pc.dofs.num_fixed(), 3);
  EXPECT_EQ(pc.dofs.num_free(), 3 * (1000 - 1));
  EXPECT_EQ(slaves.count(pc.pinned_node), 0u);

  // Tie offset across x3: eps33 * L.
  const Index top = mesh.node_index(3, 4, 10);
  const Index bottom = mesh.node_index(3, 4, 0);
  EXPECT_NEAR(pc.dofs.offset(solid_dof(top, 2)) - pc.dofs.offset(solid_dof(bottom, 2)), 0.01, 1e-15);
  EXPECT_EQ(pc.dofs.free_index(solid_dof(top, 2)), pc.dofs.free_index(solid_dof(bottom, 2)));
}

TEST(Rve, ZeroMacroStrainGivesZeroSolution) {
  RveParameters p;
  p.divisions = 6;
  p.eps33 = 0.0;
  const FiberEnsemble e = generate_fiber_ensemble(0.04, FiberOrientation::random, 2, 0, p);
  const CoupledProblem prob = rve_problem(e, p);
  const Solution s = solve_problem(prob);
  EXPECT_LE(s.u.cwiseAbs().maxCoeff(), 1e-14);
  for (const Vector& f : s.fields) EXPECT_LE(f.cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Rve, HomogeneousCellIsExact) {
  RveParameters p;
  p.divisions = 4;
  p.matrix_modulus = 2.5;
  FiberEnsemble e;
  const CoupledProblem prob = rve_problem(e, p);
  const Solution s = solve_problem(prob);
  EXPECT_NEAR(effective_modulus(prob, s, p), 2.5, 1e-12);
  for (Index n = 0; n < prob.mesh.num_nodes(); ++n) {
    const Vec3& x = prob.mesh.nodes[n];
    EXPECT_NEAR(s.u[solid_dof(n, 2)] - s.u[solid_dof(0, 2)], p.eps33 * (x[2] - prob.mesh.nodes[0][2]), 1e-13);
    EXPECT_NEAR(s.u[solid_dof(n, 0)], 0.0, 1e-13);
  }
}

TEST(Rve, VoigtReussBounds) {
  EXPECT_EQ(voigt_reuss(0.0, 10.0, 1.0), std::make_pair(1.0, 1.0));
  EXPECT_EQ(voigt_reuss(1.0, 10.0, 1.0), std::make_pair(10.0, 10.0));
  const auto [ev, er] = voigt_reuss(0.16, 10.0, 1.0);
  EXPECT_NEAR(ev, 2.44, 1e-14);
  EXPECT_NEAR(er, 1.0 / (0.016 + 0.84), 1e-14);
}

TEST(Rve, DiluteStudyWithinBounds) {
  const auto rows = run_rve_study({0.005, 0.01}, {FiberOrientation::aligned}, 1, 42);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.n_ok, 1);
    EXPECT_EQ(r.n_failed, 0);
    EXPECT_GT(r.mean_e, 1.0);
    EXPECT_LT(r.mean_e, 1.1);
    EXPECT_GE(r.mean_e, r.e_r);
    EXPECT_LE(r.mean_e, r.e_v);
  }
  EXPECT_LT(rows[0].mean_e, rows[1].mean_e);
  const std::string csv = rve_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "f_v,orientation,mean_E,std_E,E_V,E_R,n_ok,n_failed");
  EXPECT_THROW(run_rve_study({0.01}, {FiberOrientation::aligned}, 0, 42), InvalidArgument);
}
