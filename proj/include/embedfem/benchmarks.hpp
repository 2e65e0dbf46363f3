#pragma once

#include "embedfem/config.hpp"
#include "embedfem/metrics.hpp"
#include "embedfem/problem.hpp"

#include <string>
#include <vector>

namespace embedfem {

struct RunResult {
  CoupledProblem problem;
  Solution solution;
  MetricTable metrics;
};

/// Solves the configured problem and collects metrics: unknown counts,
/// residuals and timings for every config, plus the case metrics of
/// `config.benchmark`:
///
///     bending        max_u1 (solid, z max face), beam_max_u1
///     torsion        max_rotation, max_translation, fiber_radius,
///                    translation_ratio, rotation_free_h1_deviation
///     shell_bending  max_u2 (solid, z max face), shell_max_u2
///     shell_shear    midsurface_max_translation, director_rotation
///
/// With a reference section, the solid-only reference is solved too and
/// reference_max_disp, max_disp_mismatch and h1_mismatch are added.
RunResult run_config(const ProblemConfig& config);

/// run_config for a named case; the config's benchmark must match.
MetricTable run_benchmark(const std::string& name, const ProblemConfig& config);

/// Name of the headline displacement metric of a case (max_u1, ...).
std::string headline_metric(const std::string& benchmark);

struct ConvergenceRow {
  int level = 0;
  double h = 0.0;
  int fiber_points = 0;  // per fiber axis
  Index unknowns = 0;
  double h1_mismatch = 0.0;
  double max_disp = 0.0;
};

/// Refines solid and structure meshes together (divisions x 2^level,
/// level = 0 .. levels-1) for each fiber point count and compares with the
/// solid-only reference, which is solved once. Needs a reference section.
std::vector<ConvergenceRow> convergence_sweep(const ProblemConfig& config, int levels,
                                              const std::vector<int>& fiber_points);

/// Columns: case,level,h,fiber_points,unknowns,h1_mismatch,max_disp.
std::string convergence_csv(const std::string& name, const std::vector<ConvergenceRow>& rows);

}  // namespace embedfem
