#include "embedfem/benchmarks.hpp"
#include "embedfem/errors.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace embedfem;

namespace {

ProblemConfig bundled(const std::string& name) {
  return load_config((std::filesystem::path(EMBEDFEM_CONFIG_DIR) / (name + ".json")).string());
}

}  // namespace

TEST(Benchmarks, TorsionMetrics) {
  const MetricTable t = run_benchmark("torsion", bundled("torsion"));
  EXPECT_GT(t.at("max_rotation"), 0.0);
  EXPECT_LE(t.at("translation_ratio"), 1e-8);
  EXPECT_LE(t.at("rotation_free_h1_deviation"), 1e-8);
  EXPECT_LE(t.at("constraint_residual"), 1e-10);
  EXPECT_EQ(t.at("fiber_radius"), 0.125);
  EXPECT_TRUE(t.find("h1_mismatch").has_value());
}

TEST(Benchmarks, NameMustMatchConfig) {
  const ProblemConfig c = bundled("torsion");
  EXPECT_THROW(run_benchmark("bending", c), ConfigurationError);
  EXPECT_THROW(run_benchmark("twisting", c), InvalidArgument);
}

TEST(Benchmarks, LoadScalingIsLinear) {
  ProblemConfig c = bundled("bending");
  c.reference.reset();
  const RunResult a = run_config(c);
  c.loads[0].moment *= -3.0;
  const RunResult b = run_config(c);
  EXPECT_LE((b.solution.u + 3.0 * a.solution.u).norm(), 1e-12 * b.solution.u.norm());
  EXPECT_NEAR(b.metrics.at("max_u1"), 3.0 * a.metrics.at("max_u1"), 1e-12);
}

TEST(Benchmarks, ConvergenceSweepRows) {
  ProblemConfig c = bundled("torsion");
  c.reference->divisions = {4, 4, 16};
  const auto rows = convergence_sweep(c, 2, {2, 3});
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].level, 0);
  EXPECT_EQ(rows[1].fiber_points, 3);
  EXPECT_DOUBLE_EQ(rows[2].h, 0.125);
  EXPECT_GT(rows[2].unknowns, rows[0].unknowns);
  for (const auto& r : rows) EXPECT_GT(r.h1_mismatch, 0.0);
  const std::string csv = convergence_csv("torsion", rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "case,level,h,fiber_points,unknowns,h1_mismatch,max_disp");
  EXPECT_THROW(convergence_sweep(c, 0, {2}), InvalidArgument);
  c.reference.reset();
  EXPECT_THROW(convergence_sweep(c, 1, {2}), ConfigurationError);
}
