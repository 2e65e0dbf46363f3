#include "embedfem/solid_fem.hpp"

#include "embedfem/errors.hpp"
#include "embedfem/parallel.hpp"
#include "embedfem/quadrature.hpp"

#include <cmath>

namespace embedfem {

void IsotropicMaterial::validate() const {
  if (!(E > 0.0)) throw InvalidArgument("material: E must be positive");
  if (!(nu > -1.0 && nu < 0.5)) throw InvalidArgument("material: nu must lie in (-1, 0.5)");
}

Eigen::Matrix<double, 6, 6> IsotropicMaterial::elasticity() const {
  const double l = lambda();
  const double m = mu();
  Eigen::Matrix<double, 6, 6> c = Eigen::Matrix<double, 6, 6>::Zero();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) c(i, j) = l;
    c(i, i) = l + 2.0 * m;
    c(3 + i, 3 + i) = m;
  }
  return c;
}

namespace {

struct PhysicalGradients {
  hex8::ShapeGradients dn;  // dN_a/dx_j
  double det = 0.0;
};

PhysicalGradients physical_gradients(const hex8::Coords& coords, const Vec3& xi) {
  const hex8::ShapeGradients dref = hex8::shape_gradients(xi);
  const Mat3 j = coords.transpose() * dref;
  PhysicalGradients g;
  g.det = j.determinant();
  if (!(g.det > 0.0)) throw GeometryError("hexahedron with non-positive Jacobian");
  g.dn = dref * j.inverse();
  return g;
}

void check_corners(const hex8::Coords& coords) {
  for (const auto& c : hex8::corners) {
    const Mat3 j = hex8::jacobian(coords, Vec3(c[0], c[1], c[2]));
    if (!(j.determinant() > 0.0)) throw GeometryError("hexahedron with non-positive corner Jacobian");
  }
}

template <class ElementFn>
SparseSym assemble_elements(const SolidMesh& mesh, ElementFn&& element_matrix) {
  const Index ne = mesh.num_hexes();
  std::vector<ElementMatrix> ke(static_cast<std::size_t>(ne));
  parallel_for(ne, [&](Index e) { ke[static_cast<std::size_t>(e)] = element_matrix(e); });
  std::vector<Triplet> upper;
  upper.reserve(static_cast<std::size_t>(ne) * 300);
  for (Index e = 0; e < ne; ++e) {
    const auto& conn = mesh.hexes[static_cast<std::size_t>(e)];
    const ElementMatrix& k = ke[static_cast<std::size_t>(e)];
    for (int a = 0; a < 24; ++a) {
      const Index ga = solid_dof(conn[a / 3], a % 3);
      for (int b = 0; b < 24; ++b) {
        const Index gb = solid_dof(conn[b / 3], b % 3);
        if (ga <= gb && k(a, b) != 0.0) upper.emplace_back(ga, gb, k(a, b));
      }
    }
  }
  return sparse_sym_from_upper(mesh.num_dofs(), upper);
}

}  // namespace

Eigen::Matrix<double, 6, 24> hex8_strain_matrix(const hex8::Coords& coords, const Vec3& xi, double* det_j) {
  const PhysicalGradients g = physical_gradients(coords, xi);
  if (det_j) *det_j = g.det;
  Eigen::Matrix<double, 6, 24> b = Eigen::Matrix<double, 6, 24>::Zero();
  for (int a = 0; a < 8; ++a) {
    const double dx = g.dn(a, 0);
    const double dy = g.dn(a, 1);
    const double dz = g.dn(a, 2);
    b(0, 3 * a + 0) = dx;
    b(1, 3 * a + 1) = dy;
    b(2, 3 * a + 2) = dz;
    b(3, 3 * a + 1) = dz;
    b(3, 3 * a + 2) = dy;
    b(4, 3 * a + 0) = dz;
    b(4, 3 * a + 2) = dx;
    b(5, 3 * a + 0) = dy;
    b(5, 3 * a + 1) = dx;
  }
  return b;
}

ElementMatrix hex8_stiffness(const hex8::Coords& coords, const IsotropicMaterial& mat) {
  check_corners(coords);
  const auto c = mat.elasticity();
  const GaussRule& g = gauss_legendre(2);
  ElementMatrix k = ElementMatrix::Zero();
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (int l = 0; l < 2; ++l) {
        double det = 0.0;
        const Vec3 xi(g.points[i], g.points[j], g.points[l]);
        const auto b = hex8_strain_matrix(coords, xi, &det);
        k.noalias() += (g.weights[i] * g.weights[j] * g.weights[l] * det) * (b.transpose() * c * b);
      }
    }
  }
  return 0.5 * (k + k.transpose());
}

ElementMatrix hex8_h1_gram(const hex8::Coords& coords, double ell) {
  check_corners(coords);
  const GaussRule& g = gauss_legendre(2);
  Eigen::Matrix<double, 8, 8> scalar = Eigen::Matrix<double, 8, 8>::Zero();
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (int l = 0; l < 2; ++l) {
        const Vec3 xi(g.points[i], g.points[j], g.points[l]);
        const PhysicalGradients pg = physical_gradients(coords, xi);
        const hex8::ShapeValues n = hex8::shape(xi);
        const double w = g.weights[i] * g.weights[j] * g.weights[l] * pg.det;
        scalar.noalias() += w * (n * n.transpose() + ell * ell * pg.dn * pg.dn.transpose());
      }
    }
  }
  scalar = 0.5 * (scalar + scalar.transpose()).eval();
  ElementMatrix m = ElementMatrix::Zero();
  for (int a = 0; a < 8; ++a) {
    for (int b = 0; b < 8; ++b) {
      for (int c = 0; c < 3; ++c) m(3 * a + c, 3 * b + c) = scalar(a, b);
    }
  }
  return m;
}

SparseSym assemble_solid(const SolidMesh& mesh, const std::vector<IsotropicMaterial>& materials) {
  if (static_cast<Index>(materials.size()) != mesh.num_hexes()) {
    throw InvalidArgument("assemble_solid: one material per hexahedron required");
  }
  for (const auto& m : materials) m.validate();
  return assemble_elements(mesh, [&](Index e) {
    return hex8_stiffness(mesh.hex_coords(e), materials[static_cast<std::size_t>(e)]);
  });
}

SparseSym assemble_solid(const SolidMesh& mesh, const IsotropicMaterial& mat) {
  mat.validate();
  return assemble_elements(mesh, [&](Index e) { return hex8_stiffness(mesh.hex_coords(e), mat); });
}

SparseSym assemble_solid(const SolidMesh& mesh, const IsotropicMaterial& mat, const DofMap& dofs) {
  if (dofs.num_full() != mesh.num_dofs()) throw InvalidArgument("assemble_solid: DofMap does not match mesh");
  return dofs.reduce(assemble_solid(mesh, mat));
}

SparseSym solid_h1_gram(const SolidMesh& mesh, double ell) {
  if (!(ell > 0.0)) throw InvalidArgument("solid_h1_gram: ell must be positive");
  return assemble_elements(mesh, [&](Index e) { return hex8_h1_gram(mesh.hex_coords(e), ell); });
}

std::vector<FacetPoint> facet_quadrature(const SolidMesh& mesh, const Facet& facet, int n) {
  const hex8::Coords coords = mesh.hex_coords(facet.hex);
  const int normal_axis = facet.face / 2;
  const double side = facet.face % 2 == 0 ? -1.0 : 1.0;
  const int t0 = (normal_axis + 1) % 3;
  const int t1 = (normal_axis + 2) % 3;
  const GaussRule& g = gauss_legendre(n);
  std::vector<FacetPoint> pts;
  pts.reserve(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Vec3 xi;
      xi[normal_axis] = side;
      xi[t0] = g.points[i];
      xi[t1] = g.points[j];
      const Mat3 jac = hex8::jacobian(coords, xi);
      const double da = jac.col(t0).cross(jac.col(t1)).norm();
      pts.push_back({hex8::map(coords, xi), xi, g.weights[i] * g.weights[j] * da});
    }
  }
  return pts;
}

Vector traction_load(const SolidMesh& mesh, const std::vector<Facet>& facets, const VectorField& t) {
  if (facets.empty()) throw InvalidArgument("traction_load: empty face set");
  Vector f = Vector::Zero(mesh.num_dofs());
  for (const Facet& facet : facets) {
    const auto& conn = mesh.hexes.at(static_cast<std::size_t>(facet.hex));
    for (const FacetPoint& p : facet_quadrature(mesh, facet, 2)) {
      const hex8::ShapeValues n = hex8::shape(p.xi);
      const Vec3 tv = t(p.x);
      for (int a = 0; a < 8; ++a) {
        if (n[a] == 0.0) continue;
        for (int c = 0; c < 3; ++c) f[solid_dof(conn[a], c)] += p.weight * n[a] * tv[c];
      }
    }
  }
  return f;
}

Vector traction_load(const SolidMesh& mesh, const std::string& face_set, const VectorField& t) {
  const auto it = mesh.face_sets.find(face_set);
  if (it == mesh.face_sets.end()) throw InvalidArgument("traction_load: unknown face set '" + face_set + "'");
  return traction_load(mesh, it->second, t);
}

Vector body_force_load(const SolidMesh& mesh, const VectorField& body) {
  Vector f = Vector::Zero(mesh.num_dofs());
  const GaussRule& g = gauss_legendre(2);
  for (Index e = 0; e < mesh.num_hexes(); ++e) {
    const hex8::Coords coords = mesh.hex_coords(e);
    const auto& conn = mesh.hexes[static_cast<std::size_t>(e)];
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        for (int l = 0; l < 2; ++l) {
          const Vec3 xi(g.points[i], g.points[j], g.points[l]);
          const double w = g.weights[i] * g.weights[j] * g.weights[l] * hex8::jacobian(coords, xi).determinant();
          const hex8::ShapeValues n = hex8::shape(xi);
          const Vec3 bv = body(hex8::map(coords, xi));
          for (int a = 0; a < 8; ++a) {
            for (int c = 0; c < 3; ++c) f[solid_dof(conn[a], c)] += w * n[a] * bv[c];
          }
        }
      }
    }
  }
  return f;
}

namespace {
Eigen::Matrix<double, 24, 1> gather(const SolidMesh& mesh, const Vector& u, Index e) {
  Eigen::Matrix<double, 24, 1> ue;
  const auto& conn = mesh.hexes.at(static_cast<std::size_t>(e));
  for (int a = 0; a < 8; ++a) {
    for (int c = 0; c < 3; ++c) ue[3 * a + c] = u[solid_dof(conn[a], c)];
  }
  return ue;
}
}  // namespace

Vec3 eval_displacement(const SolidMesh& mesh, const Vector& u, const LocalPoint& p) {
  const auto ue = gather(mesh, u, p.element);
  const hex8::ShapeValues n = hex8::shape(p.xi);
  Vec3 v = Vec3::Zero();
  for (int a = 0; a < 8; ++a) v += n[a] * ue.segment<3>(3 * a);
  return v;
}

Mat3 eval_gradient(const SolidMesh& mesh, const Vector& u, const LocalPoint& p) {
  const auto ue = gather(mesh, u, p.element);
  const PhysicalGradients g = physical_gradients(mesh.hex_coords(p.element), p.xi);
  Mat3 du = Mat3::Zero();
  for (int a = 0; a < 8; ++a) du += ue.segment<3>(3 * a) * g.dn.row(a);
  return du;
}

Eigen::Matrix<double, 6, 1> eval_stress(const SolidMesh& mesh, const Vector& u, const LocalPoint& p,
                                        const IsotropicMaterial& mat) {
  const auto b = hex8_strain_matrix(mesh.hex_coords(p.element), p.xi);
  return mat.elasticity() * (b * gather(mesh, u, p.element));
}

Eigen::Matrix<double, 6, 1> integrate_stress(const SolidMesh& mesh, const Vector& u,
                                             const std::vector<IsotropicMaterial>& materials) {
  if (static_cast<Index>(materials.size()) != mesh.num_hexes()) {
    throw InvalidArgument("integrate_stress: one material per hexahedron required");
  }
  const GaussRule& g = gauss_legendre(2);
  Eigen::Matrix<double, 6, 1> total = Eigen::Matrix<double, 6, 1>::Zero();
  for (Index e = 0; e < mesh.num_hexes(); ++e) {
    const hex8::Coords coords = mesh.hex_coords(e);
    const auto ue = gather(mesh, u, e);
    const auto c = materials[static_cast<std::size_t>(e)].elasticity();
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        for (int l = 0; l < 2; ++l) {
          double det = 0.0;
          const auto b = hex8_strain_matrix(coords, Vec3(g.points[i], g.points[j], g.points[l]), &det);
          total += (g.weights[i] * g.weights[j] * g.weights[l] * det) * (c * (b * ue));
        }
      }
    }
  }
  return total;
}

}  // namespace embedfem
