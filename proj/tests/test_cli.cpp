#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
};

/// Runs the CLI with `args`, capturing stdout and stderr together.
CliResult cli(const std::string& args, const fs::path& cwd = fs::temp_directory_path()) {
  const std::string cmd = "cd '" + cwd.string() + "' && '" EMBEDFEM_CLI "' " + args + " 2>&1";
  CliResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf{};
  while (fgets(buf.data(), buf.size(), pipe) != nullptr) r.out += buf.data();
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string config(const std::string& name) {
  return (fs::path(EMBEDFEM_CONFIG_DIR) / (name + ".json")).string();
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("embedfem_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST(Cli, UnknownSubcommandPrintsUsage) {
  const CliResult r = cli("frobnicate");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("sweep-convergence"), std::string::npos);
  EXPECT_EQ(cli("").code, 1);
}

TEST(Cli, RunBendingPrintsMetricsAndWritesFiles) {
  const fs::path d = scratch("bending");
  const CliResult r = cli("run '" + config("bending") + "' --out-dir out", d);
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("dof_count=402\n"), std::string::npos);
  EXPECT_NE(r.out.find("max_u1="), std::string::npos);
  EXPECT_NE(r.out.find("h1_mismatch="), std::string::npos);
  EXPECT_TRUE(fs::exists(d / "out" / "metrics.csv"));
  EXPECT_TRUE(fs::exists(d / "out" / "solid.vtk"));
  EXPECT_TRUE(fs::exists(d / "out" / "beam.vtk"));
  fs::remove_all(d);
}

TEST(Cli, DemoInstabilityVerdict) {
  const CliResult r = cli("demo-instability --h-solid 0.3333 --h-shell 0.5");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("verdict=unstable"), std::string::npos);
  const CliResult fixed = cli("demo-instability --h-solid 0.3333 --h-shell 0.5 --fix-plate");
  EXPECT_NE(fixed.out.find("verdict=stable"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  const fs::path d = scratch("codes");
  std::ofstream(d / "bad.json") << R"({"solid": {"extent": [1, 1, 1], "divisions": [1, 1, 1], "material": {"E": -1}}})";
  const CliResult bad = cli("run bad.json", d);
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.out.find("solid.material.E"), std::string::npos);

  EXPECT_EQ(cli("run missing.json", d).code, 3);

  // A structure with no coupling and no Dirichlet data floats.
  std::ofstream(d / "float.json") << R"({
    "solid": {"extent": [1, 1, 1], "divisions": [1, 1, 1], "material": {"E": 1}},
    "structures": [{"kind": "beam", "frame": {"origin": [0.5, 0.5, 0]}, "length": 1, "divisions": [1],
                    "fiber": {"shape": "circle", "size": [0.1]}, "material": {"E": 1}, "coupled": false}],
    "bcs": [{"node_set": "zmin", "components": [true, true, true], "value": [0, 0, 0]}],
    "outputs": {"tables": false}
  })";
  EXPECT_EQ(cli("run float.json", d).code, 2);

  std::ofstream(d / "blocker") << "x";
  const CliResult io = cli("run '" + config("torsion") + "' --out-dir blocker/sub", d);
  EXPECT_EQ(io.code, 3) << io.out;
  EXPECT_EQ(cli("rve --realizations 0 --fv 0.01").code, 1);
  fs::remove_all(d);
}

TEST(Cli, SweepsWriteCsv) {
  const fs::path d = scratch("sweeps");
  const CliResult s = cli("sweep-stability --h-ratios 1 --stiffness-ratios 1,64 --h-solid 0.3333333333333333 --out s.csv", d);
  ASSERT_EQ(s.code, 0) << s.out;
  EXPECT_TRUE(fs::exists(d / "s.csv"));
  const CliResult v = cli("rve --fv 0.005 --orientation aligned --realizations 1 --seed 3 --divisions 6 --out r.csv", d);
  ASSERT_EQ(v.code, 0) << v.out;
  EXPECT_NE(v.out.find(",aligned,"), std::string::npos);
  EXPECT_TRUE(fs::exists(d / "r.csv"));
  fs::remove_all(d);
}
