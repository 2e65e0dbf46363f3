#pragma once

#include "embedfem/coupling.hpp"
#include "embedfem/linear_solver.hpp"
#include "embedfem/problem.hpp"
#include "embedfem/solid_fem.hpp"
#include "embedfem/structural_models.hpp"
#include "embedfem/types.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace embedfem {

// Schema documentation: docs/config_schema.md.

struct MaterialConfig {
  double E = 1.0;
  double nu = 0.0;
  friend bool operator==(const MaterialConfig&, const MaterialConfig&) = default;
};

struct SolidConfig {
  Vec3 origin = Vec3::Zero();
  Vec3 extent = Vec3::Ones();
  std::array<int, 3> divisions{1, 1, 1};
  MaterialConfig material;
  std::optional<double> ell;
  friend bool operator==(const SolidConfig&, const SolidConfig&) = default;
};

/// Structure nodes to prescribe. `select` is one of all, nodes (explicit
/// list), base_min / base_max (nodes with minimal / maximal base
/// coordinate `axis`).
struct StructureDirichletConfig {
  std::string select = "all";
  int axis = 0;
  std::vector<Index> nodes;
  std::array<bool, 3> sigma{true, true, true};
  std::vector<bool> theta;  // one flag per rotation DOF, empty = none
  friend bool operator==(const StructureDirichletConfig&, const StructureDirichletConfig&) = default;
};

struct StructureConfig {
  std::string name;
  std::string kind = "beam";  // beam | shell | rigid
  Vec3 origin = Vec3::Zero();
  Mat3 axes = Mat3::Identity();  // columns E1, E2, E3
  double length = 0.0;                       // beam
  Vec2 extent = Vec2::Zero();                // shell
  Vec3 extents = Vec3::Zero();               // rigid box
  std::vector<int> divisions;                // beam {n}, shell {n1, n2}
  std::string fiber_shape = "rectangle";     // beam: rectangle | circle
  std::vector<double> fiber_size;            // rectangle {b, h}, circle {r}
  double thickness = 0.0;                    // shell
  MaterialConfig material;
  std::optional<double> ell;
  std::optional<double> shear_factor;
  int fiber_points = 2;
  bool coupled = true;
  std::vector<StructureDirichletConfig> dirichlet;
  friend bool operator==(const StructureConfig&, const StructureConfig&) = default;
};

/// Solid Dirichlet condition on a named node set, or on the nodes inside
/// the box [lo, hi] (optionally only those on the outer boundary).
struct BcConfig {
  std::string node_set;
  std::optional<std::array<Vec3, 2>> box;
  bool boundary_only = false;
  std::array<bool, 3> components{true, true, true};
  Vec3 value = Vec3::Zero();
  friend bool operator==(const BcConfig&, const BcConfig&) = default;
};

/// Traction from the fixed catalog:
///   constant  t = value
///   bending   t = -12 M x1 e3
///   torsion   t = scale (-x2, x1, 0)
///   shear     t = tau e3
struct LoadConfig {
  std::string face_set;
  std::string type = "constant";
  Vec3 value = Vec3::Zero();
  double moment = 0.0;
  double scale = 0.0;
  double tau = 0.0;
  friend bool operator==(const LoadConfig&, const LoadConfig&) = default;
};

struct CouplingConfig {
  std::optional<double> ell_c;
  bool rotation_rows = true;
  friend bool operator==(const CouplingConfig&, const CouplingConfig&) = default;
};

struct InclusionConfig {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Zero();
  MaterialConfig material;
  friend bool operator==(const InclusionConfig&, const InclusionConfig&) = default;
};

/// Solid-only comparison model. Hexahedra whose center lies in an
/// inclusion box take its material.
struct ReferenceConfig {
  std::array<int, 3> divisions{1, 1, 1};
  std::vector<InclusionConfig> inclusions;
  friend bool operator==(const ReferenceConfig&, const ReferenceConfig&) = default;
};

struct OutputConfig {
  bool fields = false;
  bool tables = true;
  std::string out_dir = "out";
  friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

struct ProblemConfig {
  std::string name;
  std::string benchmark;  // empty, bending, torsion, shell_bending, shell_shear
  SolidConfig solid;
  std::vector<StructureConfig> structures;
  std::vector<BcConfig> bcs;
  std::vector<LoadConfig> loads;
  CouplingConfig coupling;
  SolverOptions solver;
  std::optional<ReferenceConfig> reference;
  OutputConfig outputs;

  friend bool operator==(const ProblemConfig& a, const ProblemConfig& b);
};

/// Parses and validates. Throws ConfigError listing every problem found.
ProblemConfig parse_config(const std::string& text);
ProblemConfig load_config(const std::string& path);

/// JSON text with every field present; numbers round-trip exactly.
std::string serialize_config(const ProblemConfig& config);

CoupledProblem build_problem(const ProblemConfig& config);
/// Solid-only problem on the reference grid with the same BCs and loads.
/// Throws ConfigurationError if the config has no reference section.
CoupledProblem build_reference_problem(const ProblemConfig& config);

/// Coupling length of the solid inner product (configured or diameter).
double solid_ell(const ProblemConfig& config);

}  // namespace embedfem
