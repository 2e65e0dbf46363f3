#pragma once

#include "embedfem/problem.hpp"
#include "embedfem/types.hpp"

#include <string>
#include <vector>

namespace embedfem {

/// Smallest generalized eigenvalue of (Z^T A Z, Z^T M Z), Z spanning ker B,
/// computed densely. Rows of B that vanish are dropped (counted in
/// `dropped_rows`). Negative round-off is clamped to zero.
double kernel_coercivity(const Matrix& a, const Matrix& b, const Matrix& m, Index* dropped_rows = nullptr);

/// Dense primal stiffness, coupling and H1-type Gram matrix of a problem,
/// all restricted to free DOFs in saddle ordering. The solid block is the
/// standard H1 Gram, the structure block the structural inner product.
struct DenseOperators {
  Matrix a;
  Matrix b;
  Matrix m;
};
DenseOperators dense_operators(const CoupledProblem& problem);

double kernel_coercivity(const CoupledProblem& problem);

struct StabilityOptions {
  double solid_modulus = 1.0;
  double stiffness_ratio = 64.0;  // E_S / E_Omega
  double thickness = 0.1;
  double stretch = 0.1;     // imposed x1 displacement of the right face
  double threshold = 0.1;   // relative H1 deviation above which a run is unstable
  int fiber_points = 2;
  bool compute_alpha = true;
};

struct StabilityReport {
  double h_solid = 0.0;
  double h_structure = 0.0;
  double stiffness_ratio = 0.0;
  bool plate_fixed = false;
  double alpha = 0.0;
  double deviation = 0.0;
  bool stable = true;

  [[nodiscard]] std::string verdict() const { return stable ? "stable" : "unstable"; }
};

/// Unit cube with a shell on the mid-plane x3 = 1/2, left face clamped and
/// right face displaced along x1. The deviation is the relative H1 distance
/// to the solid-only solution of the same problem. Mesh sizes must divide
/// the unit length (within 1e-3).
CoupledProblem traction_demo_problem(double h_solid, double h_structure, bool plate_fixed,
                                     const StabilityOptions& options = {});
StabilityReport traction_demo(double h_solid, double h_structure, bool plate_fixed,
                              const StabilityOptions& options = {});

/// Grid of traction demos with h_structure = ratio * h_solid, ordered by
/// (h ratio, stiffness ratio).
std::vector<StabilityReport> stability_sweep(const std::vector<double>& h_ratios,
                                             const std::vector<double>& stiffness_ratios, double h_solid = 1.0 / 6.0,
                                             const StabilityOptions& options = {});

std::string stability_csv(const std::vector<StabilityReport>& reports);

}  // namespace embedfem
