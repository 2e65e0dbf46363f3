#include "embedfem/problem.hpp"

#include "embedfem/errors.hpp"

#include <cmath>

namespace embedfem {

void fix_nodes(DofMap& dofs, const std::vector<Index>& nodes, const std::array<bool, 3>& components,
               const Vec3& value) {
  for (Index n : nodes) {
    for (int c = 0; c < 3; ++c) {
      if (components[c]) dofs.fix(solid_dof(n, c), value[c]);
    }
  }
}

CouplingOperator build_coupling(const StructureInstance& s, const SolidMesh& mesh) {
  const FiberQuadrature quad = build_fiber_quadrature(s.model, mesh, s.fiber_points, s.wrap);
  return assemble_coupling(quad, mesh, s.model, s.coupling_options);
}

AssembledProblem assemble_problem(const CoupledProblem& p) {
  AssembledProblem out;
  const SparseSym ks = assemble_solid(p.mesh, p.materials);
  out.structure_k.reserve(p.structures.size());
  out.couplings.resize(p.structures.size());
  for (std::size_t i = 0; i < p.structures.size(); ++i) {
    const auto& s = p.structures[i];
    out.structure_k.push_back(structure_stiffness(s.model));
    if (s.coupled) {
      out.couplings[i] = build_coupling(s, p.mesh);
      out.dropped_points += out.couplings[i].dropped_points;
    }
  }
  std::vector<SaddleStructure> blocks;
  for (std::size_t i = 0; i < p.structures.size(); ++i) {
    const auto& s = p.structures[i];
    const Vector load = s.load.size() == 0 ? Vector::Zero(s.model.num_dofs()) : s.load;
    blocks.push_back({&out.structure_k[i], &s.dofs, load, s.coupled ? &out.couplings[i] : nullptr});
  }
  out.system = assemble_saddle(ks, p.solid_dofs, p.solid_load, blocks);
  return out;
}

Solution solve_problem(const CoupledProblem& p, const SolverOptions& options) {
  Solution sol;
  AssembledProblem assembled = assemble_problem(p);
  sol.couplings = std::move(assembled.couplings);
  sol.diagnostics.dropped_points = assembled.dropped_points;
  const SaddleSystem& sys = assembled.system;
  const SaddleSolution ss = solve(sys, options);

  sol.u = p.solid_dofs.expand(ss.x.head(sys.layout.solid_size));
  Diagnostics& d = sol.diagnostics;
  d.stats = ss.stats;
  d.unknowns = sys.size();
  d.solid_unknowns = sys.layout.solid_size;
  d.multiplier_unknowns = sys.layout.multipliers;
  for (std::size_t i = 0; i < p.structures.size(); ++i) {
    const auto& s = p.structures[i];
    d.structure_unknowns += sys.layout.structure_size[i];
    sol.fields.push_back(s.dofs.expand(ss.x.segment(sys.layout.structure_offset[i], sys.layout.structure_size[i])));
    sol.multipliers.push_back(ss.lambda.segment(sys.layout.multiplier_offset[i], sys.layout.multiplier_size[i]));
    if (s.coupled) {
      d.constraint_residual = std::max(d.constraint_residual, kernel_residual(sol.couplings[i], sol.fields[i], sol.u));
    }
  }
  d.energy = ss.x.dot(sys.a * ss.x);
  d.work = sys.f.dot(ss.x) - ss.lambda.dot(sys.g);
  const double scale = std::max(std::abs(d.energy), std::abs(d.work));
  d.energy_identity_error = scale > 0.0 ? std::abs(d.energy - d.work) / scale : 0.0;
  return sol;
}

}  // namespace embedfem
