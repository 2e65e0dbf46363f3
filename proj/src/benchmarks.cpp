#include "embedfem/benchmarks.hpp"

#include "embedfem/errors.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace embedfem {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double max_sigma(const StructureModel& m, const Vector& field, int component = -1) {
  double out = 0.0;
  for (Index n = 0; n < m.num_nodes(); ++n) {
    Vec3 s;
    for (int c = 0; c < 3; ++c) s[c] = field[m.sigma_dof(n, c)];
    const Vec3 g = m.frame().axes * s;
    out = std::max(out, component < 0 ? g.norm() : std::abs(g[component]));
  }
  return out;
}

double max_rotation(const StructureModel& m, const Vector& field) {
  const int nr = m.rotation_dofs();
  const auto p = m.rotation_basis();
  double out = 0.0;
  for (Index n = 0; n < m.num_nodes(); ++n) {
    Vector t(nr);
    for (int c = 0; c < nr; ++c) t[c] = field[m.theta_dof(n, c)];
    out = std::max(out, (p * t).norm());
  }
  return out;
}

/// Smallest distance from the fiber centroid to the section boundary.
double fiber_radius(const FiberSpec& f) {
  if (f.shape == FiberShape::circle) return f.size[0];
  if (f.shape == FiberShape::rectangle) return 0.5 * std::min(f.size[0], f.size[1]);
  return 0.5 * f.size.head(f.dim()).minCoeff();
}

const StructureInstance& first_of(const CoupledProblem& p, StructureKind kind, const std::string& bench) {
  for (const auto& s : p.structures) {
    if (s.model.kind == kind) return s;
  }
  throw ConfigurationError("benchmark '" + bench + "' needs a " +
                           std::string(kind == StructureKind::beam ? "beam" : "shell") + " structure");
}

Index index_of(const CoupledProblem& p, const StructureInstance& s) {
  return static_cast<Index>(&s - p.structures.data());
}

/// Headline displacement of the solid field: max |u_c| on the z max face.
double headline_value(const std::string& bench, const SolidMesh& mesh, const Vector& u) {
  if (bench == "bending") return max_abs_component(mesh, u, "zmax", 0);
  if (bench == "shell_bending") return max_abs_component(mesh, u, "zmax", 1);
  return max_norm(mesh, u, "all");
}

/// Torsion check: drop the rotational coupling rows (pinning one theta_3
/// per beam, which is then only held by GJ) and compare with the solid
/// alone.
double rotation_free_deviation(const ProblemConfig& config) {
  ProblemConfig dropped = config;
  dropped.coupling.rotation_rows = false;
  for (auto& s : dropped.structures) {
    if (s.kind != "beam") continue;
    StructureDirichletConfig pin;
    pin.select = "nodes";
    pin.nodes = {0};
    pin.sigma = {false, false, false};
    pin.theta = {false, false, true};
    s.dirichlet.push_back(pin);
  }
  ProblemConfig bare = config;
  bare.structures.clear();
  const CoupledProblem pd = build_problem(dropped);
  const CoupledProblem pb = build_problem(bare);
  const Solution sd = solve_problem(pd, config.solver);
  const Solution sb = solve_problem(pb, config.solver);
  return h1_mismatch(pb.mesh, sb.u, pd.mesh, sd.u, solid_ell(config));
}

}  // namespace

std::string headline_metric(const std::string& benchmark) {
  if (benchmark == "bending") return "max_u1";
  if (benchmark == "shell_bending") return "max_u2";
  return "max_u";
}

RunResult run_config(const ProblemConfig& config) {
  RunResult r;
  const auto t0 = std::chrono::steady_clock::now();
  r.problem = build_problem(config);
  r.solution = solve_problem(r.problem, config.solver);
  const double solve_time = seconds_since(t0);
  const Diagnostics& d = r.solution.diagnostics;
  MetricTable& m = r.metrics;
  m.add("dof_count", static_cast<double>(d.unknowns));
  m.add("solid_unknowns", static_cast<double>(d.solid_unknowns));
  m.add("structure_unknowns", static_cast<double>(d.structure_unknowns));
  m.add("multiplier_unknowns", static_cast<double>(d.multiplier_unknowns));
  m.add("solver_residual", d.stats.residual);
  m.add("constraint_residual", d.constraint_residual);
  m.add("energy_identity_error", d.energy_identity_error);
  m.add("dropped_points", static_cast<double>(d.dropped_points));
  m.add("max_u", max_norm(r.problem.mesh, r.solution.u, "all"));

  const std::string& bench = config.benchmark;
  const CoupledProblem& p = r.problem;
  if (bench == "bending") {
    const auto& beam = first_of(p, StructureKind::beam, bench);
    m.add("max_u1", headline_value(bench, p.mesh, r.solution.u));
    m.add("beam_max_u1", max_sigma(beam.model, r.solution.fields[index_of(p, beam)], 0));
  } else if (bench == "torsion") {
    const auto& beam = first_of(p, StructureKind::beam, bench);
    const Vector& f = r.solution.fields[index_of(p, beam)];
    const double rot = max_rotation(beam.model, f);
    const double tr = max_sigma(beam.model, f);
    const double radius = fiber_radius(beam.model.fiber);
    m.add("max_rotation", rot);
    m.add("max_translation", tr);
    m.add("fiber_radius", radius);
    m.add("translation_ratio", rot > 0.0 ? tr / (rot * radius) : 0.0);
    m.add("rotation_free_h1_deviation", rotation_free_deviation(config));
  } else if (bench == "shell_bending") {
    const auto& shell = first_of(p, StructureKind::shell, bench);
    m.add("max_u2", headline_value(bench, p.mesh, r.solution.u));
    m.add("shell_max_u2", max_sigma(shell.model, r.solution.fields[index_of(p, shell)], 1));
  } else if (bench == "shell_shear") {
    const auto& shell = first_of(p, StructureKind::shell, bench);
    const Vector& f = r.solution.fields[index_of(p, shell)];
    m.add("midsurface_max_translation", max_sigma(shell.model, f));
    m.add("director_rotation", max_rotation(shell.model, f));
  }

  if (config.reference) {
    const auto t1 = std::chrono::steady_clock::now();
    const CoupledProblem ref = build_reference_problem(config);
    const Solution rs = solve_problem(ref, config.solver);
    const double ref_disp = headline_value(bench, ref.mesh, rs.u);
    const double disp = headline_value(bench, p.mesh, r.solution.u);
    m.add("reference_dof_count", static_cast<double>(rs.diagnostics.unknowns));
    m.add("reference_max_disp", ref_disp);
    m.add("max_disp_mismatch", ref_disp > 0.0 ? std::abs(disp - ref_disp) / ref_disp : 0.0);
    m.add("h1_mismatch", h1_mismatch(ref.mesh, rs.u, p.mesh, r.solution.u, solid_ell(config)));
    m.add("reference_time", seconds_since(t1), "s");
  }
  m.add("solve_time", solve_time, "s");
  return r;
}

MetricTable run_benchmark(const std::string& name, const ProblemConfig& config) {
  if (name != "bending" && name != "torsion" && name != "shell_bending" && name != "shell_shear") {
    throw InvalidArgument("unknown benchmark '" + name + "'");
  }
  if (config.benchmark != name) {
    throw ConfigurationError("config '" + config.name + "' is not a " + name + " benchmark");
  }
  return run_config(config).metrics;
}

std::vector<ConvergenceRow> convergence_sweep(const ProblemConfig& config, int levels,
                                              const std::vector<int>& fiber_points) {
  if (levels < 1) throw InvalidArgument("convergence_sweep: levels must be >= 1");
  if (fiber_points.empty()) throw InvalidArgument("convergence_sweep: no fiber point counts");
  const CoupledProblem ref = build_reference_problem(config);
  const Solution rs = solve_problem(ref, config.solver);
  const double ell = solid_ell(config);

  std::vector<ConvergenceRow> rows;
  for (int level = 0; level < levels; ++level) {
    for (int fp : fiber_points) {
      ProblemConfig c = config;
      const int scale = 1 << level;
      for (int& d : c.solid.divisions) d *= scale;
      for (auto& s : c.structures) {
        for (int& d : s.divisions) d *= scale;
        s.fiber_points = fp;
      }
      const CoupledProblem p = build_problem(c);
      const Solution sol = solve_problem(p, c.solver);
      ConvergenceRow row;
      row.level = level;
      row.h = c.solid.extent[0] / c.solid.divisions[0];
      row.fiber_points = fp;
      row.unknowns = sol.diagnostics.unknowns;
      row.h1_mismatch = h1_mismatch(ref.mesh, rs.u, p.mesh, sol.u, ell);
      row.max_disp = headline_value(config.benchmark, p.mesh, sol.u);
      rows.push_back(row);
    }
  }
  return rows;
}

std::string convergence_csv(const std::string& name, const std::vector<ConvergenceRow>& rows) {
  std::ostringstream os;
  os << "case,level,h,fiber_points,unknowns,h1_mismatch,max_disp\n";
  for (const auto& r : rows) {
    os << name << ',' << r.level << ',' << format_double(r.h) << ',' << r.fiber_points << ',' << r.unknowns << ','
       << format_double(r.h1_mismatch) << ',' << format_double(r.max_disp) << '\n';
  }
  return os.str();
}

}  // namespace embedfem
