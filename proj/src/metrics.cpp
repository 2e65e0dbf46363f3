#include "embedfem/metrics.hpp"

#include "embedfem/errors.hpp"
#include "embedfem/quadrature.hpp"
#include "embedfem/solid_fem.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace embedfem {

void MetricTable::add(const std::string& name, double value, const std::string& unit) {
  if (find(name)) throw InvalidArgument("MetricTable: duplicate metric '" + name + "'");
  rows_.push_back({name, value, unit});
}

std::optional<double> MetricTable::find(const std::string& name) const {
  for (const auto& r : rows_) {
    if (r.name == name) return r.value;
  }
  return std::nullopt;
}

double MetricTable::at(const std::string& name) const {
  const auto v = find(name);
  if (!v) throw NotFound("MetricTable: no metric '" + name + "'");
  return *v;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string MetricTable::to_csv() const {
  std::ostringstream os;
  os << "name,value,unit\n";
  for (const auto& r : rows_) os << r.name << ',' << format_double(r.value) << ',' << r.unit << '\n';
  return os.str();
}

namespace {
const std::vector<Index>& node_set(const SolidMesh& mesh, const std::string& name) {
  const auto it = mesh.node_sets.find(name);
  if (it == mesh.node_sets.end()) throw InvalidArgument("unknown node set '" + name + "'");
  return it->second;
}
}  // namespace

double max_abs_component(const SolidMesh& mesh, const Vector& u, const std::string& name, int component) {
  double m = 0.0;
  for (Index n : node_set(mesh, name)) m = std::max(m, std::abs(u[solid_dof(n, component)]));
  return m;
}

double max_norm(const SolidMesh& mesh, const Vector& u, const std::string& name) {
  double m = 0.0;
  for (Index n : node_set(mesh, name)) m = std::max(m, u.segment<3>(3 * n).norm());
  return m;
}

double h1_mismatch(const SolidMesh& ref_mesh, const Vector& u_ref, const SolidMesh& mesh, const Vector& u,
                   double ell) {
  const GaussRule& g = gauss_legendre(2);
  double diff = 0.0;
  double ref = 0.0;
  const double l2 = ell * ell;
  for (Index e = 0; e < ref_mesh.num_hexes(); ++e) {
    const hex8::Coords coords = ref_mesh.hex_coords(e);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        for (int k = 0; k < 2; ++k) {
          const Vec3 xi(g.points[i], g.points[j], g.points[k]);
          const double w = g.weights[i] * g.weights[j] * g.weights[k] * hex8::jacobian(coords, xi).determinant();
          const LocalPoint pr{e, xi};
          const Vec3 ur = eval_displacement(ref_mesh, u_ref, pr);
          const Mat3 dr = eval_gradient(ref_mesh, u_ref, pr);
          const LocalPoint pe = locate_point(mesh, hex8::map(coords, xi));
          const Vec3 ue = eval_displacement(mesh, u, pe);
          const Mat3 de = eval_gradient(mesh, u, pe);
          diff += w * ((ue - ur).squaredNorm() + l2 * (de - dr).squaredNorm());
          ref += w * (ur.squaredNorm() + l2 * dr.squaredNorm());
        }
      }
    }
  }
  return ref > 0.0 ? std::sqrt(diff / ref) : std::sqrt(diff);
}

double h1_norm(const SolidMesh& mesh, const Vector& u, double ell) {
  return std::sqrt(std::max(0.0, solid_h1_gram(mesh, ell).quadratic_form(u)));
}

}  // namespace embedfem
