#include "embedfem/config.hpp"
#include "embedfem/errors.hpp"
#include "embedfem/problem.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>

using namespace embedfem;

namespace {

std::string bundled(const std::string& name) {
  return (std::filesystem::path(EMBEDFEM_CONFIG_DIR) / (name + ".json")).string();
}

std::vector<std::string> errors_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.errors();
  }
  return {};
}

bool contains(const std::vector<std::string>& errors, const std::string& needle) {
  return std::any_of(errors.begin(), errors.end(), [&](const std::string& e) { return e.find(needle) != std::string::npos; });
}

const char* kMinimal = R"({
  "solid": {"extent": [1, 1, 1], "divisions": [2, 2, 2], "material": {"E": 1.0}},
  "bcs": [{"node_set": "zmin", "components": [true, true, true], "value": [0, 0, 0]}],
  "loads": [{"face_set": "zmax", "type": "constant", "params": {"value": [0, 0, 1]}}]
})";

}  // namespace

TEST(Config, BundledBendingMatchesBenchmarkData) {
  const ProblemConfig c = load_config(bundled("bending"));
  EXPECT_EQ(c.benchmark, "bending");
  EXPECT_EQ(c.solid.material.E, 10.0);
  ASSERT_EQ(c.structures.size(), 1u);
  EXPECT_EQ(c.structures[0].material.E, 5120.0);
  EXPECT_EQ(c.structures[0].divisions, std::vector<int>{10});
  ASSERT_EQ(c.loads.size(), 1u);
  EXPECT_EQ(c.loads[0].type, "bending");
  EXPECT_EQ(c.loads[0].moment, -0.0025);
  ASSERT_TRUE(c.reference.has_value());
  EXPECT_EQ(c.reference->divisions, (std::array<int, 3>{8, 8, 160}));

  const AssembledProblem a = assemble_problem(build_problem(c));
  EXPECT_EQ(a.system.size(), 402);
}

TEST(Config, EmptyDocumentReportsMissingSolid) {
  EXPECT_TRUE(contains(errors_of(""), "missing solid"));
  EXPECT_TRUE(contains(errors_of("{}"), "missing solid"));
}

TEST(Config, NegativeModulusReportedWithPath) {
  const auto errors = errors_of(R"({"solid": {"extent": [1, 1, 1], "divisions": [1, 1, 1], "material": {"E": -3}}})");
  ASSERT_EQ(errors.size(), 1u);
  EXPECT_EQ(errors[0].rfind("solid.material.E", 0), 0u);
}

TEST(Config, CollectsAllErrors) {
  const auto errors = errors_of(R"({
    "solid": {"extent": [1, -1, 1], "divisions": [1, 0, 1], "material": {"E": 1, "nu": 0.7}, "colour": 3},
    "structures": [{"kind": "tube", "frame": {}, "material": {"E": 1}}],
    "loads": [{"face_set": "top", "type": "magic"}],
    "extra": true
  })");
  EXPECT_TRUE(contains(errors, "solid.extent[1]"));
  EXPECT_TRUE(contains(errors, "solid.divisions[1]"));
  EXPECT_TRUE(contains(errors, "solid.material.nu"));
  EXPECT_TRUE(contains(errors, "solid.colour: unknown key"));
  EXPECT_TRUE(contains(errors, "structures[0].kind"));
  EXPECT_TRUE(contains(errors, "loads[0].face_set"));
  EXPECT_TRUE(contains(errors, "loads[0].type"));
  EXPECT_TRUE(contains(errors, "extra: unknown key"));
  EXPECT_GE(errors.size(), 8u);
}

TEST(Config, RejectsNonOrthonormalFrameAndBadDirichlet) {
  const auto errors = errors_of(R"({
    "solid": {"extent": [1, 1, 1], "divisions": [1, 1, 1], "material": {"E": 1}},
    "structures": [{"kind": "shell", "frame": {"axes": [[1, 0, 0], [1, 1, 0], [0, 0, 1]]},
                    "extent": [1, 1], "divisions": [2, 2], "thickness": 0.1, "material": {"E": 1},
                    "dirichlet": [{"select": "nodes", "nodes": [9], "theta": [true, true, true]}]}]
  })");
  EXPECT_TRUE(contains(errors, "structures[0].frame.axes"));
  EXPECT_TRUE(contains(errors, "structures[0].dirichlet[0].nodes[0]: node out of range"));
  EXPECT_TRUE(contains(errors, "structures[0].dirichlet[0].theta"));
}

TEST(Config, InvalidJsonIsAConfigError) {
  EXPECT_THROW(parse_config("{\"solid\": "), ConfigError);
  EXPECT_THROW(parse_config("[1, 2]"), ConfigError);
}

TEST(Config, RoundTripIsIdentical) {
  for (const char* name : {"bending", "torsion", "shell_bending", "shell_shear"}) {
    const ProblemConfig a = load_config(bundled(name));
    const std::string text = serialize_config(a);
    const ProblemConfig b = parse_config(text);
    EXPECT_TRUE(a == b) << name;
    EXPECT_EQ(serialize_config(b), text) << name;
  }
  const ProblemConfig m = parse_config(kMinimal);
  EXPECT_TRUE(parse_config(serialize_config(m)) == m);
}

TEST(Config, BoxBoundaryConditionSelectsOuterNodes) {
  const ProblemConfig c = load_config(bundled("shell_shear"));
  const CoupledProblem p = build_problem(c);
  // u_x, u_y fixed everywhere; u_z on the 4 * 16 boundary nodes of the plane y = 0.5.
  Index fixed_z = 0;
  for (Index n = 0; n < p.mesh.num_nodes(); ++n) fixed_z += p.solid_dofs.is_fixed(solid_dof(n, 2)) ? 1 : 0;
  EXPECT_EQ(fixed_z, 64);
  EXPECT_EQ(p.solid_dofs.num_free(), p.mesh.num_nodes() - 64);
}

TEST(Config, StructureDirichletSelectors) {
  ProblemConfig c = parse_config(kMinimal);
  StructureConfig s;
  s.name = "plate";
  s.kind = "shell";
  s.origin = Vec3(0, 0, 0.5);
  s.extent = Vec2(1, 1);
  s.divisions = {2, 2};
  s.thickness = 0.1;
  StructureDirichletConfig d;
  d.select = "base_min";
  d.axis = 0;
  d.theta = {true, false};
  s.dirichlet.push_back(d);
  c.structures.push_back(s);
  const CoupledProblem p = build_problem(parse_config(serialize_config(c)));
  const auto& st = p.structures[0];
  // 3 nodes on sigma_1 = 0: 3 Sigma components + theta_1 each.
  EXPECT_EQ(st.dofs.num_fixed(), 12);
  EXPECT_TRUE(st.dofs.is_fixed(st.model.theta_dof(3, 0)));
  EXPECT_FALSE(st.dofs.is_fixed(st.model.theta_dof(3, 1)));
  EXPECT_FALSE(st.dofs.is_fixed(st.model.sigma_dof(1, 0)));
}

TEST(Config, ReferenceAssignsInclusionMaterial) {
  const ProblemConfig c = load_config(bundled("bending"));
  const CoupledProblem r = build_reference_problem(c);
  EXPECT_TRUE(r.structures.empty());
  const auto stiff = std::count_if(r.materials.begin(), r.materials.end(),
                                   [](const IsotropicMaterial& m) { return m.E == 5120.0; });
  EXPECT_EQ(stiff, 4 * 160);
  ProblemConfig no_ref = c;
  no_ref.reference.reset();
  EXPECT_THROW(build_reference_problem(no_ref), ConfigurationError);
}

TEST(Config, MissingFileIsIoError) {
  EXPECT_THROW(load_config("/nonexistent/path/config.json"), IoError);
}
