#include "embedfem/rve.hpp"

#include "embedfem/errors.hpp"
#include "embedfem/metrics.hpp"
#include "embedfem/parallel.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <tuple>
#include <numbers>
#include <random>
#include <sstream>

namespace embedfem {

FiberOrientation parse_orientation(const std::string& s) {
  if (s == "aligned") return FiberOrientation::aligned;
  if (s == "random") return FiberOrientation::random;
  throw InvalidArgument("unknown fiber orientation '" + s + "' (expected aligned or random)");
}

std::string to_string(FiberOrientation o) { return o == FiberOrientation::aligned ? "aligned" : "random"; }

namespace {

double fiber_volume(const RveParameters& p) {
  return std::numbers::pi * p.fiber_radius * p.fiber_radius * p.fiber_length;
}

bool inside_cell(const Vec3& x, double half) { return (x.array().abs() <= half + 1e-12).all(); }

}  // namespace

double FiberEnsemble::achieved_fraction(const RveParameters& p) const {
  return static_cast<double>(fibers.size()) * fiber_volume(p) / std::pow(p.cell, 3);
}

FiberEnsemble generate_fiber_ensemble(double f_v, FiberOrientation orientation, std::uint64_t seed,
                                      std::uint64_t stream, const RveParameters& params) {
  if (!(f_v > 0.0 && f_v < 0.5)) throw InvalidArgument("fiber volume fraction must lie in (0, 0.5)");
  FiberEnsemble e;
  e.seed = seed;
  e.stream = stream;
  e.orientation = orientation;
  e.target_fraction = f_v;
  const auto n = static_cast<Index>(std::llround(f_v * std::pow(params.cell, 3) / fiber_volume(params)));
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double half = 0.5 * params.cell;
  e.fibers.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    Fiber f;
    for (int c = 0; c < 3; ++c) f.center[c] = params.cell * unit(rng) - half;
    if (orientation == FiberOrientation::aligned) {
      f.axis = Vec3::UnitZ();
    } else {
      const double z = 2.0 * unit(rng) - 1.0;
      const double phi = 2.0 * std::numbers::pi * unit(rng);
      const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
      f.axis = Vec3(s * std::cos(phi), s * std::sin(phi), z);
    }
    const Vec3 a = f.center - 0.5 * params.fiber_length * f.axis;
    const Vec3 b = f.center + 0.5 * params.fiber_length * f.axis;
    f.wraps = !(inside_cell(a, half) && inside_cell(b, half));
    e.fibers.push_back(f);
  }
  return e;
}

StructureModel fiber_model(const Fiber& fiber, const RveParameters& params) {
  const Frame frame = frame_from_axis(fiber.center - 0.5 * params.fiber_length * fiber.axis, fiber.axis);
  return make_beam(frame, params.fiber_length, params.fiber_elements,
                   FiberSpec{FiberShape::circle, Vec3(params.fiber_radius, 0, 0)},
                   IsotropicMaterial{params.fiber_modulus, 0.0});
}

PeriodicConstraints apply_periodic_bcs(const SolidMesh& mesh, double eps33) {
  PeriodicConstraints pc;
  pc.eps33 = eps33;
  pc.dofs = DofMap(mesh.num_dofs());
  const auto& d = mesh.divisions;
  Mat3 eps = Mat3::Zero();
  eps(2, 2) = eps33;
  const double tol = 1e-9 * mesh.extent.maxCoeff();
  for (int k = 0; k <= d[2]; ++k) {
    for (int j = 0; j <= d[1]; ++j) {
      for (int i = 0; i <= d[0]; ++i) {
        const std::array<int, 3> ijk{i, j, k};
        int axis = -1;
        for (int c = 0; c < 3 && axis < 0; ++c) {
          if (ijk[c] == d[c]) axis = c;
        }
        if (axis < 0) continue;
        std::array<int, 3> img = ijk;
        img[axis] = 0;
        const Index slave = mesh.node_index(ijk[0], ijk[1], ijk[2]);
        const Index master = mesh.node_index(img[0], img[1], img[2]);
        Vec3 offset = Vec3::Zero();
        offset[axis] = mesh.extent[axis];
        const Vec3 gap = mesh.nodes[slave] - mesh.nodes[master] - offset;
        if (gap.norm() > tol) throw ConfigurationError("periodic faces do not match at node " + std::to_string(slave));
        const Vec3 shift = eps * offset;
        for (int c = 0; c < 3; ++c) pc.dofs.tie(solid_dof(slave, c), solid_dof(master, c), shift[c]);
        pc.pairs.emplace_back(slave, master);
      }
    }
  }
  pc.pinned_node = mesh.node_index(d[0] / 2, d[1] / 2, d[2] / 2);
  for (int c = 0; c < 3; ++c) pc.dofs.fix(solid_dof(pc.pinned_node, c), 0.0);
  pc.dofs.finalize();
  return pc;
}

std::pair<double, double> voigt_reuss(double f_v, double e_s, double e_o) {
  if (!(e_s > 0.0 && e_o > 0.0)) throw InvalidArgument("moduli must be positive");
  return {f_v * e_s + (1.0 - f_v) * e_o, 1.0 / (f_v / e_s + (1.0 - f_v) / e_o)};
}

CoupledProblem rve_problem(const FiberEnsemble& ensemble, const RveParameters& params) {
  CoupledProblem p;
  const double half = 0.5 * params.cell;
  p.mesh = build_hex_grid(Vec3::Constant(-half), Vec3::Constant(params.cell),
                          {params.divisions, params.divisions, params.divisions});
  p.materials.assign(p.mesh.hexes.size(), IsotropicMaterial{params.matrix_modulus, 0.0});
  p.solid_dofs = apply_periodic_bcs(p.mesh, params.eps33).dofs;
  p.solid_load = Vector::Zero(p.mesh.num_dofs());
  PeriodicWrap wrap;
  wrap.lo = Vec3::Constant(-half);
  wrap.hi = Vec3::Constant(half);
  wrap.macro_gradient(2, 2) = params.eps33;
  for (std::size_t i = 0; i < ensemble.fibers.size(); ++i) {
    StructureInstance s;
    s.name = "fiber" + std::to_string(i);
    s.model = fiber_model(ensemble.fibers[i], params);
    s.dofs = DofMap::identity(s.model.num_dofs());
    s.load = Vector::Zero(s.model.num_dofs());
    s.fiber_points = params.fiber_points;
    s.wrap = wrap;
    p.structures.push_back(std::move(s));
  }
  return p;
}

double effective_modulus(const CoupledProblem& problem, const Solution& solution, const RveParameters& params) {
  double total = integrate_stress(problem.mesh, solution.u, problem.materials)[2];
  for (std::size_t i = 0; i < problem.structures.size(); ++i) {
    const StructureModel& m = problem.structures[i].model;
    // Integral of sigma_33 over the fiber: N t3^2 + 2 t3 (Q1 E1_3 + Q2 E2_3).
    const Mat3& axes = m.frame().axes;
    const double t3 = axes(2, 2);
    const std::vector<Vec3> f = beam_section_forces(m, solution.fields[i]);
    const double le = m.base.measure() / static_cast<double>(f.size());
    for (const Vec3& q : f) total += le * (q[2] * t3 * t3 + 2.0 * t3 * (q[0] * axes(2, 0) + q[1] * axes(2, 1)));
  }
  const double volume = std::pow(params.cell, 3);
  return total / volume / params.eps33;
}

std::vector<RveRow> run_rve_study(const std::vector<double>& fractions,
                                  const std::vector<FiberOrientation>& orientations, int realizations,
                                  std::uint64_t seed, const RveParameters& params) {
  if (realizations < 1) throw InvalidArgument("realizations must be at least 1");
  const std::size_t per = static_cast<std::size_t>(realizations);
  const std::size_t cases = fractions.size() * orientations.size();
  std::vector<double> values(cases * per, std::numeric_limits<double>::quiet_NaN());
  parallel_for(static_cast<Index>(values.size()), [&](Index k) {
    const std::size_t c = static_cast<std::size_t>(k) / per;
    const std::size_t r = static_cast<std::size_t>(k) % per;
    const double f = fractions[c / orientations.size()];
    const FiberOrientation o = orientations[c % orientations.size()];
    const FiberEnsemble e = generate_fiber_ensemble(f, o, seed, r, params);
    const CoupledProblem p = rve_problem(e, params);
    try {
      const Solution s = solve_problem(p);
      values[static_cast<std::size_t>(k)] = effective_modulus(p, s, params);
    } catch (const WellPosednessError& err) {
      std::clog << "rve: f_v=" << format_double(f) << " " << to_string(o) << " realization " << r
                << " failed: " << err.what() << '\n';
    }
  });
  std::vector<RveRow> rows;
  for (std::size_t c = 0; c < cases; ++c) {
    RveRow row;
    row.f_v = fractions[c / orientations.size()];
    row.orientation = orientations[c % orientations.size()];
    std::tie(row.e_v, row.e_r) = voigt_reuss(row.f_v, params.fiber_modulus, params.matrix_modulus);
    for (std::size_t r = 0; r < per; ++r) {
      const double v = values[c * per + r];
      if (std::isfinite(v)) {
        row.samples.push_back(v);
      } else {
        ++row.n_failed;
      }
    }
    row.n_ok = static_cast<Index>(row.samples.size());
    if (row.n_ok > 0) {
      double sum = 0.0;
      for (double v : row.samples) sum += v;
      row.mean_e = sum / static_cast<double>(row.n_ok);
      double ss = 0.0;
      for (double v : row.samples) ss += (v - row.mean_e) * (v - row.mean_e);
      row.std_e = row.n_ok > 1 ? std::sqrt(ss / static_cast<double>(row.n_ok - 1)) : 0.0;
    } else {
      row.mean_e = row.std_e = std::numeric_limits<double>::quiet_NaN();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string rve_csv(const std::vector<RveRow>& rows) {
  std::ostringstream os;
  os << "f_v,orientation,mean_E,std_E,E_V,E_R,n_ok,n_failed\n";
  for (const auto& r : rows) {
    os << format_double(r.f_v) << ',' << to_string(r.orientation) << ',' << format_double(r.mean_e) << ','
       << format_double(r.std_e) << ',' << format_double(r.e_v) << ',' << format_double(r.e_r) << ',' << r.n_ok
       << ',' << r.n_failed << '\n';
  }
  return os.str();
}

}  // namespace embedfem
