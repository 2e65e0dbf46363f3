#pragma once

#include "embedfem/dof_map.hpp"
#include "embedfem/problem.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace embedfem {

enum class FiberOrientation { aligned, random };

FiberOrientation parse_orientation(const std::string& s);
std::string to_string(FiberOrientation o);

struct RveParameters {
  double cell = 1.0;             // cube side, centered at the origin
  int divisions = 10;
  double matrix_modulus = 1.0;
  double fiber_modulus = 10.0;
  double fiber_length = 0.2;
  double fiber_radius = 0.025;
  int fiber_elements = 2;
  int fiber_points = 2;
  double eps33 = 0.01;
};

struct Fiber {
  Vec3 center;
  Vec3 axis;      // unit
  bool wraps = false;  // some part lies outside the cell
};

struct FiberEnsemble {
  std::vector<Fiber> fibers;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  FiberOrientation orientation = FiberOrientation::aligned;
  double target_fraction = 0.0;

  [[nodiscard]] double achieved_fraction(const RveParameters& p) const;
};

/// round(f_v / (pi r^2 L)) fibers with uniform centers; aligned fibers point
/// along E3, random ones are uniform on the sphere. The RNG is seeded with
/// (seed, stream) so realizations are independent and reproducible.
FiberEnsemble generate_fiber_ensemble(double f_v, FiberOrientation orientation, std::uint64_t seed,
                                      std::uint64_t stream = 0, const RveParameters& params = {});

StructureModel fiber_model(const Fiber& fiber, const RveParameters& params);

struct PeriodicConstraints {
  std::vector<std::pair<Index, Index>> pairs;  // (slave node, image node on the opposite face)
  Index pinned_node = -1;
  double eps33 = 0.0;
  DofMap dofs;
};

/// u(x + L e_i) = u(x) + eps L e_i with eps = eps33 E3 x E3, by tying every
/// node on a max face to its image; one interior node is pinned.
PeriodicConstraints apply_periodic_bcs(const SolidMesh& mesh, double eps33);

/// (E_V, E_R).
std::pair<double, double> voigt_reuss(double f_v, double e_s, double e_o);

CoupledProblem rve_problem(const FiberEnsemble& ensemble, const RveParameters& params = {});

/// Volume-averaged sigma_33 over solid and fibers, divided by eps33.
double effective_modulus(const CoupledProblem& problem, const Solution& solution, const RveParameters& params);

struct RveRow {
  double f_v = 0.0;
  FiberOrientation orientation = FiberOrientation::aligned;
  double mean_e = 0.0;
  double std_e = 0.0;
  double e_v = 0.0;
  double e_r = 0.0;
  Index n_ok = 0;
  Index n_failed = 0;
  std::vector<double> samples;
};

/// Realizations run in parallel; realization i of each (f_v, orientation)
/// uses stream i. Singular realizations are logged and counted as failed.
std::vector<RveRow> run_rve_study(const std::vector<double>& fractions,
                                  const std::vector<FiberOrientation>& orientations, int realizations,
                                  std::uint64_t seed, const RveParameters& params = {});

std::string rve_csv(const std::vector<RveRow>& rows);

}  // namespace embedfem
