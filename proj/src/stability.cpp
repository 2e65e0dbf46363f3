#include "embedfem/stability.hpp"

#include "embedfem/errors.hpp"
#include "embedfem/metrics.hpp"
#include "embedfem/parallel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <iostream>
#include <sstream>

namespace embedfem {

double kernel_coercivity(const Matrix& a, const Matrix& b, const Matrix& m, Index* dropped_rows) {
  const Index n = a.rows();
  if (a.cols() != n || m.rows() != n || m.cols() != n || (b.rows() > 0 && b.cols() != n)) {
    throw InvalidArgument("kernel_coercivity: dimension mismatch");
  }
  const double bnorm = b.size() > 0 ? b.cwiseAbs().maxCoeff() : 0.0;
  std::vector<Index> keep;
  for (Index i = 0; i < b.rows(); ++i) {
    if (b.row(i).cwiseAbs().maxCoeff() > 1e-14 * bnorm) keep.push_back(i);
  }
  const Index dropped = b.rows() - static_cast<Index>(keep.size());
  if (dropped > 0) std::clog << "kernel_coercivity: dropped " << dropped << " zero rows of B\n";
  if (dropped_rows) *dropped_rows = dropped;

  Matrix z;
  if (keep.empty()) {
    z = Matrix::Identity(n, n);
  } else {
    Matrix bk(static_cast<Index>(keep.size()), n);
    for (std::size_t i = 0; i < keep.size(); ++i) bk.row(static_cast<Index>(i)) = b.row(keep[i]);
    Eigen::BDCSVD<Matrix> svd(bk, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    Index rank = 0;
    for (Index i = 0; i < s.size(); ++i) {
      if (s[i] > 1e-12 * s[0]) ++rank;
    }
    z = svd.matrixV().rightCols(n - rank);
  }
  if (z.cols() == 0) return 0.0;
  const Matrix az = z.transpose() * a * z;
  const Matrix mz = z.transpose() * m * z;
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(0.5 * (az + az.transpose()), 0.5 * (mz + mz.transpose()),
                                                      Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw InternalError("kernel_coercivity: eigensolver failed");
  return std::max(0.0, es.eigenvalues().minCoeff());
}

DenseOperators dense_operators(const CoupledProblem& problem) {
  const AssembledProblem assembled = assemble_problem(problem);
  const SaddleSystem& sys = assembled.system;
  DenseOperators out;
  out.a = Matrix(sys.a);
  out.b = Matrix(sys.b);
  out.m = Matrix::Zero(sys.layout.primal, sys.layout.primal);
  const Index ns = sys.layout.solid_size;
  out.m.topLeftCorner(ns, ns) = Matrix(problem.solid_dofs.reduce(solid_h1_gram(problem.mesh, 1.0)).matrix());
  for (std::size_t i = 0; i < problem.structures.size(); ++i) {
    const auto& s = problem.structures[i];
    const Index off = sys.layout.structure_offset[i];
    const Index sz = sys.layout.structure_size[i];
    out.m.block(off, off, sz, sz) = Matrix(s.dofs.reduce(structure_gram(s.model, s.model.ell)).matrix());
  }
  return out;
}

double kernel_coercivity(const CoupledProblem& problem) {
  const DenseOperators ops = dense_operators(problem);
  return kernel_coercivity(ops.a, ops.b, ops.m);
}

namespace {

int cells_for(double h, const char* what) {
  if (!(h > 0.0) || h > 1.0) throw InvalidArgument(std::string(what) + " must lie in (0, 1]");
  const int n = static_cast<int>(std::lround(1.0 / h));
  if (std::abs(n * h - 1.0) > 1e-3) {
    throw InvalidArgument(std::string(what) + " = " + format_double(h) + " does not divide the unit cube");
  }
  return n;
}

CoupledProblem solid_part(int n, const StabilityOptions& o) {
  CoupledProblem p;
  p.mesh = build_hex_grid(Vec3::Zero(), Vec3::Ones(), {n, n, n});
  p.materials.assign(p.mesh.hexes.size(), IsotropicMaterial{o.solid_modulus, 0.0});
  DofMap d(p.mesh.num_dofs());
  fix_nodes(d, p.mesh.node_sets.at("xmin"), {true, true, true}, Vec3::Zero());
  fix_nodes(d, p.mesh.node_sets.at("xmax"), {true, true, true}, Vec3(o.stretch, 0, 0));
  d.finalize();
  p.solid_dofs = d;
  p.solid_load = Vector::Zero(p.mesh.num_dofs());
  return p;
}

}  // namespace

CoupledProblem traction_demo_problem(double h_solid, double h_structure, bool plate_fixed,
                                     const StabilityOptions& o) {
  const int ns = cells_for(h_solid, "h_solid");
  const int nc = cells_for(h_structure, "h_structure");
  if (!(o.stiffness_ratio > 0.0)) throw InvalidArgument("stiffness ratio must be positive");
  CoupledProblem p = solid_part(ns, o);
  Frame f;
  f.origin = Vec3(0, 0, 0.5);
  StructureInstance s;
  s.name = "plate";
  s.model = make_shell(f, Vec2(1, 1), {nc, nc}, o.thickness,
                       IsotropicMaterial{o.stiffness_ratio * o.solid_modulus, 0.0});
  DofMap sd(s.model.num_dofs());
  if (plate_fixed) {
    for (Index i = 0; i < s.model.num_nodes(); ++i) {
      if (s.model.base.nodes[i][0] > 1e-12) continue;
      for (int c = 0; c < 3; ++c) sd.fix(s.model.sigma_dof(i, c), 0.0);
      for (int c = 0; c < s.model.rotation_dofs(); ++c) sd.fix(s.model.theta_dof(i, c), 0.0);
    }
  }
  sd.finalize();
  s.dofs = sd;
  s.load = Vector::Zero(s.model.num_dofs());
  s.fiber_points = o.fiber_points;
  p.structures.push_back(s);
  return p;
}

StabilityReport traction_demo(double h_solid, double h_structure, bool plate_fixed, const StabilityOptions& o) {
  const CoupledProblem p = traction_demo_problem(h_solid, h_structure, plate_fixed, o);
  const CoupledProblem ref = solid_part(cells_for(h_solid, "h_solid"), o);
  const Solution sol = solve_problem(p);
  const Solution rs = solve_problem(ref);
  StabilityReport r;
  r.h_solid = h_solid;
  r.h_structure = h_structure;
  r.stiffness_ratio = o.stiffness_ratio;
  r.plate_fixed = plate_fixed;
  r.deviation = h1_mismatch(ref.mesh, rs.u, p.mesh, sol.u, 1.0);
  r.stable = r.deviation <= o.threshold;
  if (o.compute_alpha) r.alpha = kernel_coercivity(p);
  return r;
}

std::vector<StabilityReport> stability_sweep(const std::vector<double>& h_ratios,
                                             const std::vector<double>& stiffness_ratios, double h_solid,
                                             const StabilityOptions& options) {
  std::vector<StabilityReport> out(h_ratios.size() * stiffness_ratios.size());
  parallel_for(static_cast<Index>(out.size()), [&](Index k) {
    const std::size_t i = static_cast<std::size_t>(k) / stiffness_ratios.size();
    const std::size_t j = static_cast<std::size_t>(k) % stiffness_ratios.size();
    StabilityOptions o = options;
    o.stiffness_ratio = stiffness_ratios[j];
    out[static_cast<std::size_t>(k)] = traction_demo(h_solid, h_ratios[i] * h_solid, false, o);
  });
  return out;
}

std::string stability_csv(const std::vector<StabilityReport>& reports) {
  std::ostringstream os;
  os << "h_solid,h_structure,h_ratio,stiffness_ratio,plate_fixed,alpha,deviation,verdict\n";
  for (const auto& r : reports) {
    os << format_double(r.h_solid) << ',' << format_double(r.h_structure) << ','
       << format_double(r.h_structure / r.h_solid) << ',' << format_double(r.stiffness_ratio) << ','
       << (r.plate_fixed ? 1 : 0) << ',' << format_double(r.alpha) << ',' << format_double(r.deviation) << ','
       << r.verdict() << '\n';
  }
  return os.str();
}

}  // namespace embedfem
