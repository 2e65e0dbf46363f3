// Acceptance suite: one PASS/FAIL line per criterion.
//   embedfem_acceptance        all criteria
//   embedfem_acceptance 3 5    selected criteria
// Exit status is non-zero if any selected criterion fails.

#include "embedfem/benchmarks.hpp"
#include "embedfem/config.hpp"
#include "embedfem/rve.hpp"
#include "embedfem/stability.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace embedfem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

ProblemConfig bundled(const std::string& name) {
  return load_config((std::filesystem::path(EMBEDFEM_CONFIG_DIR) / (name + ".json")).string());
}

double rel(double value, double target) { return std::abs(value - target) / std::abs(target); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string pct(double v) { return g(100.0 * v) + "%"; }

Verdict bending() {
  const auto t0 = std::chrono::steady_clock::now();
  const MetricTable m = run_benchmark("bending", bundled("bending"));
  const double time = seconds_since(t0);
  const double dofs = m.at("dof_count");
  const double u1 = m.at("max_u1");
  const double mismatch = m.at("max_disp_mismatch");
  Verdict v;
  v.pass = dofs == 402 && rel(u1, 0.185) <= 0.02 && mismatch <= 0.06 && time <= 120.0;
  v.detail = "unknowns=" + g(dofs) + " (402); max|u1|=" + g(u1) + " (0.185, off " + pct(rel(u1, 0.185)) +
             ", tol 2%); 8x8x160 reference max=" + g(m.at("reference_max_disp")) + ", mismatch " + pct(mismatch) +
             " (tol 6%); time " + g(time) + " s (tol 120 s)";
  return v;
}

Verdict quadrature_sensitivity() {
  const auto rows = convergence_sweep(bundled("bending"), 4, {2, 4});
  std::vector<double> four;
  std::vector<double> sixteen;
  std::vector<double> h;
  for (const auto& r : rows) {
    if (r.fiber_points == 2) {
      four.push_back(r.h1_mismatch);
      h.push_back(r.h);
    } else {
      sixteen.push_back(r.h1_mismatch);
    }
  }
  bool larger = true;
  std::ostringstream os;
  os << "h1 mismatch (4 pts / 16 pts):";
  for (std::size_t i = 0; i < h.size(); ++i) {
    os << " h=" << g(h[i]) << ": " << g(four[i]) << "/" << g(sixteen[i]);
    if (h[i] <= 0.25 + 1e-12 && !(four[i] > sixteen[i])) larger = false;
  }
  std::size_t run = 1;
  std::size_t best = 1;
  for (std::size_t i = 1; i < sixteen.size(); ++i) {
    run = sixteen[i] <= sixteen[i - 1] ? run + 1 : 1;
    best = std::max(best, run);
  }
  os << "; 4 > 16 for all h <= 0.25: " << (larger ? "yes" : "no") << "; longest non-increasing 16-point run: " << best
     << " levels (need 3)";
  return {larger && best >= 3, os.str()};
}

Verdict torsion() {
  const MetricTable m = run_benchmark("torsion", bundled("torsion"));
  const double ratio = m.at("translation_ratio");
  const double dev = m.at("rotation_free_h1_deviation");
  return {ratio <= 1e-8 && dev <= 1e-8,
          "max translation / (max rotation * radius) = " + g(ratio) + " (tol 1e-8); rotation rows dropped vs solid alone: " +
              g(dev) + " relative H1 (tol 1e-8)"};
}

Verdict shell_bending() {
  const MetricTable m = run_benchmark("shell_bending", bundled("shell_bending"));
  const double u2 = m.at("max_u2");
  return {rel(u2, 0.124) <= 0.03, "max u2=" + g(u2) + " (0.124, off " + pct(rel(u2, 0.124)) + ", tol 3%)"};
}

Verdict shell_shear() {
  const ProblemConfig c = bundled("shell_shear");
  const MetricTable m = run_benchmark("shell_shear", c);
  const double mid = m.at("midsurface_max_translation");
  const double rot = m.at("director_rotation");
  const double cube = c.solid.extent.maxCoeff();
  return {mid <= 1e-6 * cube && rel(rot, 3.7e-4) <= 0.15,
          "midsurface max |Sigma|=" + g(mid) + " (tol 1e-6); director rotation=" + g(rot) + " (3.7e-4, off " +
              pct(rel(rot, 3.7e-4)) + ", tol 15%)"};
}

Verdict instability() {
  const StabilityReport a = traction_demo(1.0 / 3.0, 1.0 / 3.0, false);
  const StabilityReport b = traction_demo(1.0 / 3.0, 1.0 / 2.0, false);
  const StabilityReport c = traction_demo(1.0 / 3.0, 1.0 / 2.0, true);
  bool alpha_ok = a.alpha > b.alpha;
  std::ostringstream os;
  os << "(1/3,1/3,free) " << a.verdict() << " dev " << g(a.deviation) << "; (1/3,1/2,free) " << b.verdict() << " dev "
     << g(b.deviation) << "; (1/3,1/2,fixed) " << c.verdict() << " dev " << g(c.deviation) << "; alpha case2/case1: ratio 64 "
     << g(b.alpha) << "/" << g(a.alpha);
  StabilityOptions opts;
  opts.stiffness_ratio = 256.0;
  const double a256 = traction_demo(1.0 / 3.0, 1.0 / 3.0, false, opts).alpha;
  const double b256 = traction_demo(1.0 / 3.0, 1.0 / 2.0, false, opts).alpha;
  alpha_ok = alpha_ok && b256 < a256;
  os << ", ratio 256 " << g(b256) << "/" << g(a256);
  return {a.stable && !b.stable && c.stable && alpha_ok, os.str()};
}

Verdict rve() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<double> fv{0.01, 0.04, 0.16};
  const auto rows = run_rve_study(fv, {FiberOrientation::aligned, FiberOrientation::random}, 5, 42);
  const double time = seconds_since(t0);
  bool bounded = true;
  bool ordered = true;
  bool band = false;
  Index failed = 0;
  std::ostringstream os;
  for (double f : fv) {
    const RveRow* al = nullptr;
    const RveRow* ra = nullptr;
    for (const auto& r : rows) {
      if (r.f_v != f) continue;
      (r.orientation == FiberOrientation::aligned ? al : ra) = &r;
      failed += r.n_failed;
      for (double e : r.samples) bounded = bounded && e >= r.e_r && e <= r.e_v;
    }
    ordered = ordered && al->mean_e > ra->mean_e;
    os << "f_v=" << f << ": aligned " << g(al->mean_e) << ", random " << g(ra->mean_e) << " [" << g(al->e_r) << ", "
       << g(al->e_v) << "]; ";
    if (f == 0.16) {
      const double share = al->mean_e / al->e_v;
      band = share >= 0.8 && share <= 1.0;
      os << "aligned/E_V=" << g(share) << "; ";
    }
  }
  os << "all samples in bounds: " << (bounded ? "yes" : "no") << "; failed realizations " << failed << "; time "
     << g(time) << " s (tol 900 s)";
  return {bounded && ordered && band && failed == 0 && time <= 900.0, os.str()};
}

Verdict properties() {
  const std::string filter =
      "AssembleSolid.PatchTest:Hex8Stiffness.MatchesFiniteDifferenceHessian:InnerProduct.ClosedFormMatchesBruteForce:"
      "Coupling.RigidMotionIsInKernel:Saddle.BendingBenchmarkUnknownCount:Saddle.InertiaMatchesPrimalAndMultiplierCounts";
  const std::string cmd = std::string("'") + EMBEDFEM_UNIT_TESTS + "' --gtest_filter='" + filter + "' > /dev/null 2>&1";
  const bool units = std::system(cmd.c_str()) == 0;

  double residual = 0.0;
  double energy = 0.0;
  for (const char* name : {"bending", "torsion", "shell_bending", "shell_shear"}) {
    ProblemConfig c = bundled(name);
    c.reference.reset();
    const MetricTable m = run_config(c).metrics;
    residual = std::max(residual, m.at("constraint_residual"));
    energy = std::max(energy, m.at("energy_identity_error"));
  }
  return {units && residual <= 1e-10 && energy <= 1e-9,
          std::string("patch, FD Hessian, inner product, rigid-motion kernel, unknown count and inertia unit tests: ") +
              (units ? "pass" : "FAIL") + "; max constraint residual over benchmarks " + g(residual) +
              " (tol 1e-10); max energy identity error " + g(energy) + " (tol 1e-9)"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"bending benchmark", bending},
      {"quadrature sensitivity", quadrature_sensitivity},
      {"torsion benchmark", torsion},
      {"shell bending", shell_bending},
      {"shell shear", shell_shear},
      {"instability demo", instability},
      {"RVE study", rve},
      {"property suites", properties},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty()) {
    for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) selected.push_back(i);
  }
  bool all = true;
  for (int n : selected) {
    if (n < 1 || n > static_cast<int>(criteria.size())) {
      std::cerr << "no criterion " << n << '\n';
      return 2;
    }
    const auto& [name, check] = criteria[static_cast<std::size_t>(n - 1)];
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    all = all && v.pass;
    std::cout << (v.pass ? "[PASS]" : "[FAIL]") << " criterion " << n << " (" << name << "): " << v.detail << std::endl;
  }
  return all ? 0 : 1;
}
