#include "embedfem/config.hpp"

#include "embedfem/errors.hpp"

#include "json.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

namespace embedfem {

using Json = nlohmann::ordered_json;

namespace {

const std::set<std::string> kFaceSets{"xmin", "xmax", "ymin", "ymax", "zmin", "zmax"};
const std::set<std::string> kBenchmarks{"", "bending", "torsion", "shell_bending", "shell_shear"};

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string item(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

/// Collects every schema violation instead of stopping at the first.
class Reader {
 public:
  std::vector<std::string> errors;

  void fail(const std::string& path, const std::string& msg) { errors.push_back(path + ": " + msg); }
  void missing(const std::string& path) { errors.push_back("missing " + path); }

  bool object(const Json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) {
      fail(path.empty() ? "(root)" : path, "expected an object");
      return false;
    }
    for (const auto& [key, value] : j.items()) {
      bool known = false;
      for (const char* a : allowed) known = known || key == a;
      if (!known) fail(join(path, key), "unknown key");
    }
    return true;
  }

  const Json* find(const Json& j, const char* key, const std::string& path, bool required) {
    const auto it = j.find(key);
    if (it == j.end()) {
      if (required) missing(join(path, key));
      return nullptr;
    }
    return &*it;
  }

  void number(const Json& j, const char* key, const std::string& path, double& out, bool required = false) {
    if (const Json* v = find(j, key, path, required)) {
      if (v->is_number()) {
        out = v->get<double>();
      } else {
        fail(join(path, key), "expected a number");
      }
    }
  }

  void number(const Json& j, const char* key, const std::string& path, std::optional<double>& out) {
    if (const Json* v = find(j, key, path, false)) {
      if (v->is_number()) {
        out = v->get<double>();
      } else {
        fail(join(path, key), "expected a number");
      }
    }
  }

  template <class Int>
  void integer(const Json& j, const char* key, const std::string& path, Int& out, bool required = false) {
    if (const Json* v = find(j, key, path, required)) {
      if (v->is_number_integer()) {
        out = v->get<Int>();
      } else {
        fail(join(path, key), "expected an integer");
      }
    }
  }

  void boolean(const Json& j, const char* key, const std::string& path, bool& out) {
    if (const Json* v = find(j, key, path, false)) {
      if (v->is_boolean()) {
        out = v->get<bool>();
      } else {
        fail(join(path, key), "expected a boolean");
      }
    }
  }

  void string(const Json& j, const char* key, const std::string& path, std::string& out, bool required = false) {
    if (const Json* v = find(j, key, path, required)) {
      if (v->is_string()) {
        out = v->get<std::string>();
      } else {
        fail(join(path, key), "expected a string");
      }
    }
  }

  bool array(const Json& v, const std::string& path, std::size_t n) {
    if (!v.is_array() || (n > 0 && v.size() != n)) {
      fail(path, n > 0 ? "expected an array of " + std::to_string(n) + " entries" : "expected an array");
      return false;
    }
    return true;
  }

  template <int N>
  void vec(const Json& j, const char* key, const std::string& path, Eigen::Matrix<double, N, 1>& out,
           bool required = false) {
    const Json* v = find(j, key, path, required);
    if (v == nullptr || !array(*v, join(path, key), N)) return;
    for (int i = 0; i < N; ++i) {
      if (!(*v)[i].is_number()) {
        fail(item(join(path, key), i), "expected a number");
      } else {
        out[i] = (*v)[i].get<double>();
      }
    }
  }

  void flags(const Json& j, const char* key, const std::string& path, std::vector<bool>& out) {
    const Json* v = find(j, key, path, false);
    if (v == nullptr || !array(*v, join(path, key), 0)) return;
    out.clear();
    for (std::size_t i = 0; i < v->size(); ++i) {
      if (!(*v)[i].is_boolean()) {
        fail(item(join(path, key), i), "expected a boolean");
        out.push_back(false);
      } else {
        out.push_back((*v)[i].get<bool>());
      }
    }
  }

  void flags3(const Json& j, const char* key, const std::string& path, std::array<bool, 3>& out) {
    std::vector<bool> f;
    const std::size_t before = errors.size();
    flags(j, key, path, f);
    if (errors.size() != before || j.find(key) == j.end()) return;
    if (f.size() != 3) {
      fail(join(path, key), "expected 3 flags");
      return;
    }
    for (int c = 0; c < 3; ++c) out[c] = f[c];
  }

  template <class Int>
  void integers(const Json& j, const char* key, const std::string& path, std::vector<Int>& out,
                bool required = false) {
    const Json* v = find(j, key, path, required);
    if (v == nullptr || !array(*v, join(path, key), 0)) return;
    out.clear();
    for (std::size_t i = 0; i < v->size(); ++i) {
      if (!(*v)[i].is_number_integer()) {
        fail(item(join(path, key), i), "expected an integer");
      } else {
        out.push_back((*v)[i].get<Int>());
      }
    }
  }

  void numbers(const Json& j, const char* key, const std::string& path, std::vector<double>& out) {
    const Json* v = find(j, key, path, false);
    if (v == nullptr || !array(*v, join(path, key), 0)) return;
    out.clear();
    for (std::size_t i = 0; i < v->size(); ++i) {
      if (!(*v)[i].is_number()) {
        fail(item(join(path, key), i), "expected a number");
      } else {
        out.push_back((*v)[i].get<double>());
      }
    }
  }

  void divisions3(const Json& j, const char* key, const std::string& path, std::array<int, 3>& out) {
    std::vector<int> d;
    const std::size_t before = errors.size();
    integers(j, key, path, d, true);
    if (errors.size() != before) return;
    if (d.size() != 3) {
      fail(join(path, key), "expected 3 entries");
      return;
    }
    for (int i = 0; i < 3; ++i) {
      out[i] = d[i];
      if (d[i] < 1) fail(item(join(path, key), i), "must be at least 1");
    }
  }

  void material(const Json& j, const char* key, const std::string& path, MaterialConfig& out) {
    const Json* v = find(j, key, path, true);
    const std::string p = join(path, key);
    if (v == nullptr || !object(*v, p, {"E", "nu"})) return;
    const std::size_t before = errors.size();
    number(*v, "E", p, out.E, true);
    number(*v, "nu", p, out.nu);
    if (errors.size() != before) return;
    if (!(out.E > 0.0) || !std::isfinite(out.E)) fail(join(p, "E"), "must be positive");
    if (!(out.nu > -1.0 && out.nu < 0.5)) fail(join(p, "nu"), "must lie in (-1, 0.5)");
  }

  void positive(double v, const std::string& path) {
    if (!(v > 0.0) || !std::isfinite(v)) fail(path, "must be positive");
  }
};

void read_solid(Reader& r, const Json& j, SolidConfig& s) {
  const std::string p = "solid";
  if (!r.object(j, p, {"origin", "extent", "divisions", "material", "ell"})) return;
  r.vec<3>(j, "origin", p, s.origin);
  const std::size_t before = r.errors.size();
  r.vec<3>(j, "extent", p, s.extent, true);
  if (r.errors.size() == before) {
    for (int i = 0; i < 3; ++i) r.positive(s.extent[i], item(join(p, "extent"), i));
  }
  r.divisions3(j, "divisions", p, s.divisions);
  r.material(j, "material", p, s.material);
  r.number(j, "ell", p, s.ell);
  if (s.ell) r.positive(*s.ell, join(p, "ell"));
}

int rotation_count(const std::string& kind) { return kind == "shell" ? 2 : 3; }

Index base_node_count(const StructureConfig& s) {
  if (s.kind == "beam" && s.divisions.size() == 1) return s.divisions[0] + 1;
  if (s.kind == "shell" && s.divisions.size() == 2) {
    return static_cast<Index>(s.divisions[0] + 1) * (s.divisions[1] + 1);
  }
  if (s.kind == "rigid") return 1;
  return -1;
}

void read_dirichlet(Reader& r, const Json& j, const std::string& p, const StructureConfig& s,
                    StructureDirichletConfig& d) {
  if (!r.object(j, p, {"select", "axis", "nodes", "sigma", "theta"})) return;
  r.string(j, "select", p, d.select);
  r.integer(j, "axis", p, d.axis);
  r.integers(j, "nodes", p, d.nodes);
  r.flags3(j, "sigma", p, d.sigma);
  r.flags(j, "theta", p, d.theta);
  const std::set<std::string> selects{"all", "nodes", "base_min", "base_max"};
  if (selects.count(d.select) == 0) r.fail(join(p, "select"), "must be all, nodes, base_min or base_max");
  const int base_dim = s.kind == "shell" ? 2 : (s.kind == "beam" ? 1 : 0);
  if ((d.select == "base_min" || d.select == "base_max") && (d.axis < 0 || d.axis >= base_dim)) {
    r.fail(join(p, "axis"), "not a base axis of this structure");
  }
  if (d.select == "nodes" && d.nodes.empty()) r.fail(join(p, "nodes"), "must list at least one node");
  if (d.select != "nodes" && !d.nodes.empty()) r.fail(join(p, "nodes"), "only allowed with select = nodes");
  const Index n = base_node_count(s);
  for (std::size_t i = 0; i < d.nodes.size(); ++i) {
    if (d.nodes[i] < 0 || (n >= 0 && d.nodes[i] >= n)) r.fail(item(join(p, "nodes"), i), "node out of range");
  }
  if (!d.theta.empty() && static_cast<int>(d.theta.size()) != rotation_count(s.kind)) {
    r.fail(join(p, "theta"), "expected " + std::to_string(rotation_count(s.kind)) + " flags");
  }
}

void read_structure(Reader& r, const Json& j, const std::string& p, StructureConfig& s) {
  if (!r.object(j, p, {"name", "kind", "frame", "length", "extent", "extents", "divisions", "fiber", "thickness",
                       "material", "ell", "shear_factor", "fiber_points", "coupled", "dirichlet"})) {
    return;
  }
  r.string(j, "name", p, s.name);
  r.string(j, "kind", p, s.kind, true);
  const bool beam = s.kind == "beam";
  const bool shell = s.kind == "shell";
  const bool rigid = s.kind == "rigid";
  if (!beam && !shell && !rigid) r.fail(join(p, "kind"), "must be beam, shell or rigid");

  if (const Json* f = r.find(j, "frame", p, true)) {
    const std::string fp = join(p, "frame");
    if (r.object(*f, fp, {"origin", "axes"})) {
      r.vec<3>(*f, "origin", fp, s.origin);
      if (const Json* a = r.find(*f, "axes", fp, false); a != nullptr && r.array(*a, join(fp, "axes"), 3)) {
        const std::size_t before = r.errors.size();
        for (int c = 0; c < 3; ++c) {
          const std::string cp = item(join(fp, "axes"), c);
          if (!r.array((*a)[c], cp, 3)) continue;
          for (int i = 0; i < 3; ++i) {
            if ((*a)[c][i].is_number()) {
              s.axes(i, c) = (*a)[c][i].get<double>();
            } else {
              r.fail(item(cp, i), "expected a number");
            }
          }
        }
        if (r.errors.size() == before) {
          try {
            validate_frame(Frame{s.origin, s.axes});
          } catch (const InvalidArgument& e) {
            r.fail(join(fp, "axes"), e.what());
          }
        }
      }
    }
  }

  auto only_for = [&](const char* key, bool allowed, const char* kinds) {
    if (!allowed && j.contains(key)) r.fail(join(p, key), std::string("only allowed for ") + kinds);
  };
  only_for("length", beam, "beams");
  only_for("fiber", beam, "beams");
  only_for("extent", shell, "shells");
  only_for("thickness", shell, "shells");
  only_for("extents", rigid, "rigid bodies");
  only_for("divisions", beam || shell, "beams and shells");
  only_for("shear_factor", beam || shell, "beams and shells");

  if (beam) {
    r.number(j, "length", p, s.length, true);
    r.positive(s.length, join(p, "length"));
    if (const Json* f = r.find(j, "fiber", p, true)) {
      const std::string fp = join(p, "fiber");
      if (r.object(*f, fp, {"shape", "size"})) {
        r.string(*f, "shape", fp, s.fiber_shape, true);
        r.numbers(*f, "size", fp, s.fiber_size);
        if (!f->contains("size")) r.missing(join(fp, "size"));
        const std::size_t want = s.fiber_shape == "rectangle" ? 2 : (s.fiber_shape == "circle" ? 1 : 0);
        if (want == 0) {
          r.fail(join(fp, "shape"), "must be rectangle or circle");
        } else if (f->contains("size") && s.fiber_size.size() != want) {
          r.fail(join(fp, "size"), "expected " + std::to_string(want) + " entries");
        }
        for (std::size_t i = 0; i < s.fiber_size.size(); ++i) r.positive(s.fiber_size[i], item(join(fp, "size"), i));
      }
    }
  }
  if (shell) {
    const std::size_t before = r.errors.size();
    r.vec<2>(j, "extent", p, s.extent, true);
    if (r.errors.size() == before) {
      for (int i = 0; i < 2; ++i) r.positive(s.extent[i], item(join(p, "extent"), i));
    }
    r.number(j, "thickness", p, s.thickness, true);
    r.positive(s.thickness, join(p, "thickness"));
  }
  if (rigid) {
    const std::size_t before = r.errors.size();
    r.vec<3>(j, "extents", p, s.extents, true);
    if (r.errors.size() == before) {
      for (int i = 0; i < 3; ++i) r.positive(s.extents[i], item(join(p, "extents"), i));
    }
  }
  if (beam || shell) {
    const std::size_t before = r.errors.size();
    r.integers(j, "divisions", p, s.divisions, true);
    const std::size_t want = beam ? 1 : 2;
    if (r.errors.size() == before) {
      if (s.divisions.size() != want) r.fail(join(p, "divisions"), "expected " + std::to_string(want) + " entries");
      for (std::size_t i = 0; i < s.divisions.size(); ++i) {
        if (s.divisions[i] < 1) r.fail(item(join(p, "divisions"), i), "must be at least 1");
      }
    }
  }
  r.material(j, "material", p, s.material);
  r.number(j, "ell", p, s.ell);
  if (s.ell) r.positive(*s.ell, join(p, "ell"));
  r.number(j, "shear_factor", p, s.shear_factor);
  if (s.shear_factor) r.positive(*s.shear_factor, join(p, "shear_factor"));
  r.integer(j, "fiber_points", p, s.fiber_points);
  if (s.fiber_points < 1) r.fail(join(p, "fiber_points"), "must be at least 1");
  r.boolean(j, "coupled", p, s.coupled);
  if (const Json* d = r.find(j, "dirichlet", p, false); d != nullptr && r.array(*d, join(p, "dirichlet"), 0)) {
    s.dirichlet.resize(d->size());
    for (std::size_t i = 0; i < d->size(); ++i) read_dirichlet(r, (*d)[i], item(join(p, "dirichlet"), i), s, s.dirichlet[i]);
  }
}

void read_bc(Reader& r, const Json& j, const std::string& p, BcConfig& bc) {
  if (!r.object(j, p, {"node_set", "box", "boundary_only", "components", "value"})) return;
  r.string(j, "node_set", p, bc.node_set);
  if (const Json* b = r.find(j, "box", p, false)) {
    const std::string bp = join(p, "box");
    if (r.object(*b, bp, {"lo", "hi"})) {
      std::array<Vec3, 2> box{Vec3::Zero(), Vec3::Zero()};
      r.vec<3>(*b, "lo", bp, box[0], true);
      r.vec<3>(*b, "hi", bp, box[1], true);
      bc.box = box;
    }
  }
  r.boolean(j, "boundary_only", p, bc.boundary_only);
  r.flags3(j, "components", p, bc.components);
  r.vec<3>(j, "value", p, bc.value);
  const bool has_set = j.contains("node_set");
  if (has_set == j.contains("box")) r.fail(p, "exactly one of node_set and box is required");
  if (has_set && !bc.node_set.empty() && bc.node_set != "all" && kFaceSets.count(bc.node_set) == 0) {
    r.fail(join(p, "node_set"), "unknown node set '" + bc.node_set + "'");
  }
}

void read_load(Reader& r, const Json& j, const std::string& p, LoadConfig& l) {
  if (!r.object(j, p, {"face_set", "type", "params"})) return;
  r.string(j, "face_set", p, l.face_set, true);
  r.string(j, "type", p, l.type, true);
  if (j.contains("face_set") && kFaceSets.count(l.face_set) == 0) {
    r.fail(join(p, "face_set"), "unknown face set '" + l.face_set + "'");
  }
  const Json empty = Json::object();
  const Json* params = r.find(j, "params", p, false);
  const Json& pj = params != nullptr ? *params : empty;
  const std::string pp = join(p, "params");
  if (l.type == "constant") {
    if (r.object(pj, pp, {"value"})) r.vec<3>(pj, "value", pp, l.value, true);
  } else if (l.type == "bending") {
    if (r.object(pj, pp, {"M"})) r.number(pj, "M", pp, l.moment, true);
  } else if (l.type == "torsion") {
    if (r.object(pj, pp, {"scale"})) r.number(pj, "scale", pp, l.scale, true);
  } else if (l.type == "shear") {
    if (r.object(pj, pp, {"tau"})) r.number(pj, "tau", pp, l.tau, true);
  } else if (j.contains("type")) {
    r.fail(join(p, "type"), "must be constant, bending, torsion or shear");
  }
}

void read_reference(Reader& r, const Json& j, ReferenceConfig& ref) {
  const std::string p = "reference";
  if (!r.object(j, p, {"divisions", "inclusions"})) return;
  r.divisions3(j, "divisions", p, ref.divisions);
  if (const Json* inc = r.find(j, "inclusions", p, false); inc != nullptr && r.array(*inc, join(p, "inclusions"), 0)) {
    ref.inclusions.resize(inc->size());
    for (std::size_t i = 0; i < inc->size(); ++i) {
      const std::string ip = item(join(p, "inclusions"), i);
      if (!r.object((*inc)[i], ip, {"lo", "hi", "material"})) continue;
      r.vec<3>((*inc)[i], "lo", ip, ref.inclusions[i].lo, true);
      r.vec<3>((*inc)[i], "hi", ip, ref.inclusions[i].hi, true);
      r.material((*inc)[i], "material", ip, ref.inclusions[i].material);
    }
  }
}

Json to_json(const Vec3& v) { return Json::array({v[0], v[1], v[2]}); }
Json to_json(const Vec2& v) { return Json::array({v[0], v[1]}); }
Json to_json(const MaterialConfig& m) { return Json{{"E", m.E}, {"nu", m.nu}}; }

template <class T>
Json to_json(const std::vector<T>& v) {
  Json out = Json::array();
  for (const auto& x : v) out.push_back(static_cast<T>(x));
  return out;
}

Json to_json(const std::array<bool, 3>& v) { return Json::array({v[0], v[1], v[2]}); }
Json to_json(const std::array<int, 3>& v) { return Json::array({v[0], v[1], v[2]}); }

Json structure_json(const StructureConfig& s) {
  Json j;
  j["name"] = s.name;
  j["kind"] = s.kind;
  j["frame"] = Json{{"origin", to_json(Vec3(s.origin))},
                    {"axes", Json::array({to_json(Vec3(s.axes.col(0))), to_json(Vec3(s.axes.col(1))),
                                          to_json(Vec3(s.axes.col(2)))})}};
  if (s.kind == "beam") {
    j["length"] = s.length;
    j["fiber"] = Json{{"shape", s.fiber_shape}, {"size", to_json(s.fiber_size)}};
  } else if (s.kind == "shell") {
    j["extent"] = to_json(s.extent);
    j["thickness"] = s.thickness;
  } else {
    j["extents"] = to_json(s.extents);
  }
  if (s.kind != "rigid") j["divisions"] = to_json(s.divisions);
  j["material"] = to_json(s.material);
  if (s.ell) j["ell"] = *s.ell;
  if (s.shear_factor && s.kind != "rigid") j["shear_factor"] = *s.shear_factor;
  j["fiber_points"] = s.fiber_points;
  j["coupled"] = s.coupled;
  Json d = Json::array();
  for (const auto& dc : s.dirichlet) {
    Json e{{"select", dc.select}, {"axis", dc.axis}};
    if (!dc.nodes.empty()) e["nodes"] = to_json(dc.nodes);
    e["sigma"] = to_json(dc.sigma);
    e["theta"] = to_json(dc.theta);
    d.push_back(e);
  }
  j["dirichlet"] = d;
  return j;
}

bool on_boundary(const SolidMesh& mesh, const Vec3& x) {
  const double tol = 1e-12 * mesh.diameter();
  for (int i = 0; i < 3; ++i) {
    if (std::abs(x[i] - mesh.origin[i]) <= tol || std::abs(x[i] - mesh.origin[i] - mesh.extent[i]) <= tol) {
      return true;
    }
  }
  return false;
}

std::vector<Index> bc_nodes(const SolidMesh& mesh, const BcConfig& bc) {
  if (!bc.box) return mesh.node_sets.at(bc.node_set);
  const double tol = 1e-12 * mesh.diameter();
  std::vector<Index> out;
  for (Index n = 0; n < mesh.num_nodes(); ++n) {
    const Vec3& x = mesh.nodes[n];
    bool inside = true;
    for (int i = 0; i < 3; ++i) inside = inside && x[i] >= (*bc.box)[0][i] - tol && x[i] <= (*bc.box)[1][i] + tol;
    if (inside && (!bc.boundary_only || on_boundary(mesh, x))) out.push_back(n);
  }
  return out;
}

VectorField traction(const LoadConfig& l) {
  if (l.type == "bending") {
    const double m = l.moment;
    return [m](const Vec3& x) { return Vec3(0.0, 0.0, -12.0 * m * x[0]); };
  }
  if (l.type == "torsion") {
    const double s = l.scale;
    return [s](const Vec3& x) { return Vec3(-s * x[1], s * x[0], 0.0); };
  }
  if (l.type == "shear") {
    const double t = l.tau;
    return [t](const Vec3&) { return Vec3(0.0, 0.0, t); };
  }
  const Vec3 v = l.value;
  return [v](const Vec3&) { return v; };
}

/// Shared solid setup: Dirichlet data and tractions on `mesh`.
void setup_solid(const ProblemConfig& c, CoupledProblem& p) {
  DofMap dofs(p.mesh.num_dofs());
  for (const auto& bc : c.bcs) fix_nodes(dofs, bc_nodes(p.mesh, bc), bc.components, bc.value);
  dofs.finalize();
  p.solid_dofs = std::move(dofs);
  p.solid_load = Vector::Zero(p.mesh.num_dofs());
  for (const auto& l : c.loads) p.solid_load += traction_load(p.mesh, l.face_set, traction(l));
}

StructureModel structure_model(const StructureConfig& s) {
  const Frame frame{s.origin, s.axes};
  const IsotropicMaterial mat{s.material.E, s.material.nu};
  StructureModel m;
  if (s.kind == "beam") {
    FiberSpec section;
    if (s.fiber_shape == "circle") {
      section = FiberSpec{FiberShape::circle, Vec3(s.fiber_size[0], 0.0, 0.0)};
    } else {
      section = FiberSpec{FiberShape::rectangle, Vec3(s.fiber_size[0], s.fiber_size[1], 0.0)};
    }
    m = make_beam(frame, s.length, s.divisions[0], section, mat, s.ell);
  } else if (s.kind == "shell") {
    m = make_shell(frame, s.extent, {s.divisions[0], s.divisions[1]}, s.thickness, mat, s.ell);
  } else {
    m = make_rigid(frame, s.extents, mat, s.ell);
  }
  if (s.shear_factor) m.shear_factor = *s.shear_factor;
  return m;
}

DofMap structure_dofs(const StructureModel& m, const StructureConfig& s) {
  DofMap dofs(m.num_dofs());
  for (const auto& d : s.dirichlet) {
    std::vector<Index> nodes;
    if (d.select == "nodes") {
      nodes = d.nodes;
    } else {
      double target = 0.0;
      if (d.select == "base_min" || d.select == "base_max") {
        target = m.base.nodes[0][d.axis];
        for (const Vec2& b : m.base.nodes) {
          target = d.select == "base_min" ? std::min(target, b[d.axis]) : std::max(target, b[d.axis]);
        }
      }
      const double tol = 1e-12 * std::max(1.0, m.base.extent.maxCoeff());
      for (Index n = 0; n < m.num_nodes(); ++n) {
        if (d.select == "all" || std::abs(m.base.nodes[n][d.axis] - target) <= tol) nodes.push_back(n);
      }
    }
    for (Index n : nodes) {
      for (int c = 0; c < 3; ++c) {
        if (d.sigma[c]) dofs.fix(m.sigma_dof(n, c), 0.0);
      }
      for (int c = 0; c < static_cast<int>(d.theta.size()); ++c) {
        if (d.theta[c]) dofs.fix(m.theta_dof(n, c), 0.0);
      }
    }
  }
  dofs.finalize();
  return dofs;
}

}  // namespace

bool operator==(const ProblemConfig& a, const ProblemConfig& b) {
  return a.name == b.name && a.benchmark == b.benchmark && a.solid == b.solid && a.structures == b.structures &&
         a.bcs == b.bcs && a.loads == b.loads && a.coupling == b.coupling &&
         a.solver.residual_tol == b.solver.residual_tol && a.solver.pivot_tol == b.solver.pivot_tol &&
         a.solver.max_refinement == b.solver.max_refinement && a.reference == b.reference && a.outputs == b.outputs;
}

ProblemConfig parse_config(const std::string& text) {
  Json root;
  bool blank = true;
  for (char ch : text) blank = blank && std::isspace(static_cast<unsigned char>(ch));
  if (blank) {
    root = Json::object();
  } else {
    try {
      root = Json::parse(text);
    } catch (const Json::parse_error& e) {
      throw ConfigError({std::string("(root): invalid JSON: ") + e.what()});
    }
  }

  Reader r;
  ProblemConfig c;
  if (!r.object(root, "", {"name", "benchmark", "solid", "structures", "bcs", "loads", "coupling", "solver",
                           "reference", "outputs"})) {
    throw ConfigError(r.errors);
  }
  r.string(root, "name", "", c.name);
  r.string(root, "benchmark", "", c.benchmark);
  if (kBenchmarks.count(c.benchmark) == 0) {
    r.fail("benchmark", "must be bending, torsion, shell_bending or shell_shear");
  }
  if (const Json* s = r.find(root, "solid", "", true)) read_solid(r, *s, c.solid);

  if (const Json* s = r.find(root, "structures", "", false); s != nullptr && r.array(*s, "structures", 0)) {
    c.structures.resize(s->size());
    for (std::size_t i = 0; i < s->size(); ++i) read_structure(r, (*s)[i], item("structures", i), c.structures[i]);
    std::set<std::string> names;
    for (std::size_t i = 0; i < c.structures.size(); ++i) {
      auto& st = c.structures[i];
      if (st.name.empty()) st.name = st.kind + std::to_string(i);
      if (!names.insert(st.name).second) r.fail(join(item("structures", i), "name"), "duplicate name '" + st.name + "'");
    }
  }
  if (const Json* b = r.find(root, "bcs", "", false); b != nullptr && r.array(*b, "bcs", 0)) {
    c.bcs.resize(b->size());
    for (std::size_t i = 0; i < b->size(); ++i) read_bc(r, (*b)[i], item("bcs", i), c.bcs[i]);
  }
  if (const Json* l = r.find(root, "loads", "", false); l != nullptr && r.array(*l, "loads", 0)) {
    c.loads.resize(l->size());
    for (std::size_t i = 0; i < l->size(); ++i) read_load(r, (*l)[i], item("loads", i), c.loads[i]);
  }
  if (const Json* cp = r.find(root, "coupling", "", false); cp != nullptr && r.object(*cp, "coupling", {"ell_c", "rotation_rows"})) {
    r.number(*cp, "ell_c", "coupling", c.coupling.ell_c);
    if (c.coupling.ell_c) r.positive(*c.coupling.ell_c, "coupling.ell_c");
    r.boolean(*cp, "rotation_rows", "coupling", c.coupling.rotation_rows);
  }
  if (const Json* sv = r.find(root, "solver", "", false);
      sv != nullptr && r.object(*sv, "solver", {"residual_tol", "pivot_tol", "max_refinement"})) {
    r.number(*sv, "residual_tol", "solver", c.solver.residual_tol);
    r.number(*sv, "pivot_tol", "solver", c.solver.pivot_tol);
    r.integer(*sv, "max_refinement", "solver", c.solver.max_refinement);
    r.positive(c.solver.residual_tol, "solver.residual_tol");
    r.positive(c.solver.pivot_tol, "solver.pivot_tol");
    if (c.solver.max_refinement < 0) r.fail("solver.max_refinement", "must be non-negative");
  }
  if (const Json* ref = r.find(root, "reference", "", false)) {
    c.reference.emplace();
    read_reference(r, *ref, *c.reference);
  }
  if (const Json* o = r.find(root, "outputs", "", false); o != nullptr && r.object(*o, "outputs", {"fields", "tables", "out_dir"})) {
    r.boolean(*o, "fields", "outputs", c.outputs.fields);
    r.boolean(*o, "tables", "outputs", c.outputs.tables);
    r.string(*o, "out_dir", "outputs", c.outputs.out_dir);
  }
  if (!r.errors.empty()) throw ConfigError(r.errors);
  return c;
}

ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ProblemConfig& c) {
  Json j;
  j["name"] = c.name;
  j["benchmark"] = c.benchmark;
  Json solid{{"origin", to_json(c.solid.origin)},
             {"extent", to_json(c.solid.extent)},
             {"divisions", to_json(c.solid.divisions)},
             {"material", to_json(c.solid.material)}};
  if (c.solid.ell) solid["ell"] = *c.solid.ell;
  j["solid"] = solid;
  Json structures = Json::array();
  for (const auto& s : c.structures) structures.push_back(structure_json(s));
  j["structures"] = structures;
  Json bcs = Json::array();
  for (const auto& bc : c.bcs) {
    Json e;
    if (bc.box) {
      e["box"] = Json{{"lo", to_json((*bc.box)[0])}, {"hi", to_json((*bc.box)[1])}};
      e["boundary_only"] = bc.boundary_only;
    } else {
      e["node_set"] = bc.node_set;
    }
    e["components"] = to_json(bc.components);
    e["value"] = to_json(bc.value);
    bcs.push_back(e);
  }
  j["bcs"] = bcs;
  Json loads = Json::array();
  for (const auto& l : c.loads) {
    Json params;
    if (l.type == "constant") params["value"] = to_json(l.value);
    if (l.type == "bending") params["M"] = l.moment;
    if (l.type == "torsion") params["scale"] = l.scale;
    if (l.type == "shear") params["tau"] = l.tau;
    loads.push_back(Json{{"face_set", l.face_set}, {"type", l.type}, {"params", params}});
  }
  j["loads"] = loads;
  Json coupling{{"rotation_rows", c.coupling.rotation_rows}};
  if (c.coupling.ell_c) coupling["ell_c"] = *c.coupling.ell_c;
  j["coupling"] = coupling;
  j["solver"] = Json{{"residual_tol", c.solver.residual_tol},
                     {"pivot_tol", c.solver.pivot_tol},
                     {"max_refinement", c.solver.max_refinement}};
  if (c.reference) {
    Json inc = Json::array();
    for (const auto& i : c.reference->inclusions) {
      inc.push_back(Json{{"lo", to_json(i.lo)}, {"hi", to_json(i.hi)}, {"material", to_json(i.material)}});
    }
    j["reference"] = Json{{"divisions", to_json(c.reference->divisions)}, {"inclusions", inc}};
  }
  j["outputs"] = Json{{"fields", c.outputs.fields}, {"tables", c.outputs.tables}, {"out_dir", c.outputs.out_dir}};
  return j.dump(2) + "\n";
}

CoupledProblem build_problem(const ProblemConfig& c) {
  CoupledProblem p;
  p.mesh = build_hex_grid(c.solid.origin, c.solid.extent, c.solid.divisions);
  p.materials.assign(p.mesh.hexes.size(), IsotropicMaterial{c.solid.material.E, c.solid.material.nu});
  setup_solid(c, p);
  for (const auto& sc : c.structures) {
    StructureInstance s;
    s.name = sc.name;
    s.model = structure_model(sc);
    s.dofs = structure_dofs(s.model, sc);
    s.load = Vector::Zero(s.model.num_dofs());
    s.coupled = sc.coupled;
    s.fiber_points = sc.fiber_points;
    s.coupling_options.ell_c = c.coupling.ell_c.value_or(-1.0);
    s.coupling_options.rotation_rows = c.coupling.rotation_rows;
    p.structures.push_back(std::move(s));
  }
  return p;
}

CoupledProblem build_reference_problem(const ProblemConfig& c) {
  if (!c.reference) throw ConfigurationError("config '" + c.name + "' has no reference section");
  CoupledProblem p;
  p.mesh = build_hex_grid(c.solid.origin, c.solid.extent, c.reference->divisions);
  p.materials.assign(p.mesh.hexes.size(), IsotropicMaterial{c.solid.material.E, c.solid.material.nu});
  for (Index e = 0; e < p.mesh.num_hexes(); ++e) {
    const Vec3 x = p.mesh.hex_center(e);
    for (const auto& inc : c.reference->inclusions) {
      if ((x.array() >= inc.lo.array()).all() && (x.array() <= inc.hi.array()).all()) {
        p.materials[static_cast<std::size_t>(e)] = IsotropicMaterial{inc.material.E, inc.material.nu};
      }
    }
  }
  setup_solid(c, p);
  return p;
}

double solid_ell(const ProblemConfig& c) { return c.solid.ell.value_or(c.solid.extent.norm()); }

}  // namespace embedfem
