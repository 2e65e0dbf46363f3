#include "embedfem/export.hpp"

#include "embedfem/errors.hpp"
#include "embedfem/metrics.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace embedfem {

namespace {

void header(std::ostringstream& os, const std::string& title, const char* dataset) {
  os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET " << dataset << "\n";
}

void vec3(std::ostringstream& os, const Vec3& v) {
  os << format_double(v[0]) << ' ' << format_double(v[1]) << ' ' << format_double(v[2]) << '\n';
}

}  // namespace

std::string solid_vtk(const SolidMesh& mesh, const Vector& u) {
  std::ostringstream os;
  header(os, "embedfem solid", "UNSTRUCTURED_GRID");
  os << "POINTS " << mesh.num_nodes() << " double\n";
  for (const Vec3& x : mesh.nodes) vec3(os, x);
  os << "CELLS " << mesh.num_hexes() << ' ' << 9 * mesh.num_hexes() << '\n';
  for (const auto& h : mesh.hexes) {
    os << 8;
    for (Index n : h) os << ' ' << n;
    os << '\n';
  }
  os << "CELL_TYPES " << mesh.num_hexes() << '\n';
  for (Index e = 0; e < mesh.num_hexes(); ++e) os << "12\n";
  os << "POINT_DATA " << mesh.num_nodes() << "\nVECTORS displacement double\n";
  for (Index n = 0; n < mesh.num_nodes(); ++n) vec3(os, u.segment<3>(3 * n));
  return os.str();
}

std::string structure_vtk(const StructureModel& model, const Vector& field, const std::string& title) {
  const BaseMesh& base = model.base;
  const Mat3& r = model.frame().axes;
  const auto p = model.rotation_basis();
  std::ostringstream os;
  header(os, title, "POLYDATA");
  os << "POINTS " << model.num_nodes() << " double\n";
  for (const Vec2& s : base.nodes) vec3(os, model.embed(s, Vec3::Zero()));
  const Index ne = base.num_elements();
  if (model.kind == StructureKind::rigid || ne == 0) {
    os << "VERTICES " << model.num_nodes() << ' ' << 2 * model.num_nodes() << '\n';
    for (Index n = 0; n < model.num_nodes(); ++n) os << "1 " << n << '\n';
  } else {
    const int k = base.nodes_per_element();
    os << (k == 2 ? "LINES " : "POLYGONS ") << ne << ' ' << (k + 1) * ne << '\n';
    for (const auto& e : base.elements) {
      os << k;
      for (int a = 0; a < k; ++a) os << ' ' << e[a];
      os << '\n';
    }
  }
  const int nr = model.rotation_dofs();
  os << "POINT_DATA " << model.num_nodes() << "\nVECTORS Sigma double\n";
  for (Index n = 0; n < model.num_nodes(); ++n) {
    Vec3 s;
    for (int c = 0; c < 3; ++c) s[c] = field[model.sigma_dof(n, c)];
    vec3(os, r * s);
  }
  os << "VECTORS theta double\n";
  for (Index n = 0; n < model.num_nodes(); ++n) {
    Vector t(nr);
    for (int c = 0; c < nr; ++c) t[c] = field[model.theta_dof(n, c)];
    vec3(os, r * (p * t));
  }
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  const std::filesystem::path fp(path);
  std::error_code ec;
  if (fp.has_parent_path()) std::filesystem::create_directories(fp.parent_path(), ec);
  if (ec) throw IoError("cannot create directory '" + fp.parent_path().string() + "': " + ec.message());
  std::ofstream out(fp, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::vector<std::string> export_fields(const CoupledProblem& problem, const Solution& solution,
                                       const std::string& out_dir) {
  std::vector<std::string> written;
  const std::filesystem::path dir(out_dir);
  const std::string solid = (dir / "solid.vtk").string();
  write_text_file(solid, solid_vtk(problem.mesh, solution.u));
  written.push_back(solid);
  for (std::size_t i = 0; i < problem.structures.size(); ++i) {
    const auto& s = problem.structures[i];
    const std::string name = s.name.empty() ? "structure" + std::to_string(i) : s.name;
    const std::string path = (dir / (name + ".vtk")).string();
    write_text_file(path, structure_vtk(s.model, solution.fields[i], "embedfem " + name));
    written.push_back(path);
  }
  return written;
}

}  // namespace embedfem
