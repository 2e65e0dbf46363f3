#include "embedfem/benchmarks.hpp"
#include "embedfem/config.hpp"
#include "embedfem/errors.hpp"
#include "embedfem/export.hpp"
#include "embedfem/metrics.hpp"
#include "embedfem/parallel.hpp"
#include "embedfem/rve.hpp"
#include "embedfem/stability.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

using namespace embedfem;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitSolver = 2;
constexpr int kExitIo = 3;

void print_metrics(const MetricTable& t) {
  for (const auto& r : t.rows()) {
    std::cout << r.name << '=' << format_double(r.value);
    if (!r.unit.empty()) std::cout << ' ' << r.unit;
    std::cout << '\n';
  }
}

/// Writes `csv` to `path` (unless empty) and echoes it to stdout.
void emit_csv(const std::string& csv, const std::string& path) {
  std::cout << csv;
  if (!path.empty()) {
    write_text_file(path, csv);
    std::cerr << "wrote " << path << '\n';
  }
}

std::string bundled_config(const std::string& name) {
  return (std::filesystem::path(EMBEDFEM_CONFIG_DIR) / (name + ".json")).string();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"embedfem: solids with embedded rigid bodies, beams and shells"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Solve one problem from a JSON config");
  std::string config_path;
  std::string out_dir;
  bool no_fields = false;
  run->add_option("config", config_path, "Config file")->required();
  run->add_option("--out-dir", out_dir, "Override outputs.out_dir");
  run->add_flag("--no-fields", no_fields, "Skip VTK export");

  auto* conv = app.add_subcommand("sweep-convergence", "Mesh refinement study against the solid-only reference");
  std::string conv_case;
  std::string conv_config;
  int levels = 4;
  std::vector<int> fiber_points{2, 4};
  std::string conv_out;
  conv->add_option("case", conv_case, "bending | torsion | shell_bending | shell_shear")
      ->required()
      ->check(CLI::IsMember({"bending", "torsion", "shell_bending", "shell_shear"}));
  conv->add_option("--levels", levels, "Refinement levels (divisions x 2^level)")->check(CLI::Range(1, 6));
  conv->add_option("--fiber-points", fiber_points, "Fiber points per fiber axis")->delimiter(',');
  conv->add_option("--config", conv_config, "Config file (default: bundled config of the case)");
  conv->add_option("--out", conv_out, "CSV output path");

  auto* stab = app.add_subcommand("sweep-stability", "Traction demo over mesh and stiffness ratios");
  std::vector<double> h_ratios{0.5, 1.0, 1.5, 2.0};
  std::vector<double> stiffness_ratios{1.0, 64.0};
  double sweep_h_solid = 1.0 / 6.0;
  std::string stab_out;
  stab->add_option("--h-ratios", h_ratios, "h_structure / h_solid values")->delimiter(',');
  stab->add_option("--stiffness-ratios", stiffness_ratios, "E_S / E_solid values")->delimiter(',');
  stab->add_option("--h-solid", sweep_h_solid, "Solid mesh size (must divide 1)");
  stab->add_option("--out", stab_out, "CSV output path");

  auto* rve = app.add_subcommand("rve", "Homogenization of short-fiber composites");
  std::vector<double> fractions{0.01, 0.04, 0.16};
  std::string orientation = "both";
  int realizations = 5;
  std::uint64_t seed = 42;
  int rve_divisions = 10;
  std::string rve_out;
  rve->add_option("--fv", fractions, "Fiber volume fractions")->delimiter(',');
  rve->add_option("--orientation", orientation, "aligned | random | both")
      ->check(CLI::IsMember({"aligned", "random", "both"}));
  rve->add_option("--realizations", realizations, "Realizations per cell");
  rve->add_option("--seed", seed, "Base seed");
  rve->add_option("--divisions", rve_divisions, "Solid hexahedra per cell edge");
  rve->add_option("--out", rve_out, "CSV output path");

  auto* demo = app.add_subcommand("demo-instability", "Cube with an embedded mid-plane shell");
  double h_solid = 1.0 / 3.0;
  double h_shell = 1.0 / 3.0;
  bool fix_plate = false;
  double demo_ratio = 64.0;
  std::string demo_out;
  demo->add_option("--h-solid", h_solid, "Solid mesh size")->required();
  demo->add_option("--h-shell", h_shell, "Shell mesh size")->required();
  demo->add_flag("--fix-plate", fix_plate, "Prescribe the shell edge on the clamped face");
  demo->add_option("--stiffness-ratio", demo_ratio, "E_S / E_solid");
  demo->add_option("--out-dir", demo_out, "Write VTK fields of the embedded solution here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitConfig;
  }

  try {
    if (*run) {
      const ProblemConfig config = load_config(config_path);
      const RunResult r = run_config(config);
      print_metrics(r.metrics);
      const std::string dir = out_dir.empty() ? config.outputs.out_dir : out_dir;
      if (config.outputs.tables) write_text_file((std::filesystem::path(dir) / "metrics.csv").string(), r.metrics.to_csv());
      if (config.outputs.fields && !no_fields) export_fields(r.problem, r.solution, dir);
    } else if (*conv) {
      const ProblemConfig config = load_config(conv_config.empty() ? bundled_config(conv_case) : conv_config);
      const auto rows = convergence_sweep(config, levels, fiber_points);
      emit_csv(convergence_csv(conv_case, rows), conv_out);
    } else if (*stab) {
      emit_csv(stability_csv(stability_sweep(h_ratios, stiffness_ratios, sweep_h_solid)), stab_out);
    } else if (*rve) {
      std::vector<FiberOrientation> orientations;
      if (orientation != "random") orientations.push_back(FiberOrientation::aligned);
      if (orientation != "aligned") orientations.push_back(FiberOrientation::random);
      RveParameters params;
      params.divisions = rve_divisions;
      std::cerr << "running on " << worker_count() << " worker(s)\n";
      emit_csv(rve_csv(run_rve_study(fractions, orientations, realizations, seed, params)), rve_out);
    } else if (*demo) {
      StabilityOptions opts;
      opts.stiffness_ratio = demo_ratio;
      const StabilityReport rep = traction_demo(h_solid, h_shell, fix_plate, opts);
      std::cout << "h_solid=" << format_double(rep.h_solid) << '\n'
                << "h_shell=" << format_double(rep.h_structure) << '\n'
                << "stiffness_ratio=" << format_double(rep.stiffness_ratio) << '\n'
                << "plate_fixed=" << (rep.plate_fixed ? 1 : 0) << '\n'
                << "alpha=" << format_double(rep.alpha) << '\n'
                << "deviation=" << format_double(rep.deviation) << '\n'
                << "verdict=" << rep.verdict() << '\n';
      if (!demo_out.empty()) {
        const CoupledProblem p = traction_demo_problem(h_solid, h_shell, fix_plate, opts);
        export_fields(p, solve_problem(p), demo_out);
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error:\n";
    for (const auto& msg : e.errors()) std::cerr << "  " << msg << '\n';
    return kExitConfig;
  } catch (const WellPosednessError& e) {
    std::cerr << "solver failure: " << e.what() << " (pivot " << e.pivot_index() << ")\n";
    return kExitSolver;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
