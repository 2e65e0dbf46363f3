#include "embedfem/mesh.hpp"

#include "embedfem/errors.hpp"

#include <cmath>
#include <algorithm>
#include <limits>

namespace embedfem {

namespace hex8 {

ShapeValues shape(const Vec3& xi) {
  ShapeValues n;
  for (int a = 0; a < 8; ++a) {
    n[a] = 0.125 * (1.0 + corners[a][0] * xi[0]) * (1.0 + corners[a][1] * xi[1]) *
           (1.0 + corners[a][2] * xi[2]);
  }
  return n;
}

ShapeGradients shape_gradients(const Vec3& xi) {
  ShapeGradients g;
  for (int a = 0; a < 8; ++a) {
    const double c0 = corners[a][0];
    const double c1 = corners[a][1];
    const double c2 = corners[a][2];
    g(a, 0) = 0.125 * c0 * (1.0 + c1 * xi[1]) * (1.0 + c2 * xi[2]);
    g(a, 1) = 0.125 * c1 * (1.0 + c0 * xi[0]) * (1.0 + c2 * xi[2]);
    g(a, 2) = 0.125 * c2 * (1.0 + c0 * xi[0]) * (1.0 + c1 * xi[1]);
  }
  return g;
}

Vec3 map(const Coords& coords, const Vec3& xi) { return coords.transpose() * shape(xi); }

Mat3 jacobian(const Coords& coords, const Vec3& xi) {
  return coords.transpose() * shape_gradients(xi);
}

}  // namespace hex8

Index SolidMesh::node_index(int i, int j, int k) const {
  const Index nx = divisions[0] + 1;
  const Index ny = divisions[1] + 1;
  return i + nx * (j + ny * static_cast<Index>(k));
}

Index SolidMesh::hex_index(int i, int j, int k) const {
  return i + static_cast<Index>(divisions[0]) * (j + static_cast<Index>(divisions[1]) * k);
}

hex8::Coords SolidMesh::hex_coords(Index e) const {
  hex8::Coords c;
  const auto& conn = hexes.at(static_cast<std::size_t>(e));
  for (int a = 0; a < 8; ++a) c.row(a) = nodes[static_cast<std::size_t>(conn[a])].transpose();
  return c;
}

Vec3 SolidMesh::hex_center(Index e) const { return hex8::map(hex_coords(e), Vec3::Zero()); }

SolidMesh build_hex_grid(const Vec3& origin, const Vec3& extent, const std::array<int, 3>& divisions) {
  for (int d = 0; d < 3; ++d) {
    if (divisions[d] < 1) throw InvalidArgument("build_hex_grid: division counts must be >= 1");
    if (!(extent[d] > 0.0)) throw InvalidArgument("build_hex_grid: extents must be positive");
  }
  SolidMesh mesh;
  mesh.origin = origin;
  mesh.extent = extent;
  mesh.divisions = divisions;
  for (int d = 0; d < 3; ++d) mesh.h[d] = extent[d] / divisions[d];

  const int nx = divisions[0] + 1;
  const int ny = divisions[1] + 1;
  const int nz = divisions[2] + 1;
  mesh.nodes.reserve(static_cast<std::size_t>(nx) * ny * nz);
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        // Last layer placed exactly at origin + extent.
        Vec3 x;
        const int idx[3] = {i, j, k};
        for (int d = 0; d < 3; ++d) {
          x[d] = idx[d] == divisions[d] ? origin[d] + extent[d] : origin[d] + idx[d] * mesh.h[d];
        }
        mesh.nodes.push_back(x);
      }
    }
  }

  mesh.hexes.reserve(static_cast<std::size_t>(divisions[0]) * divisions[1] * divisions[2]);
  for (int k = 0; k < divisions[2]; ++k) {
    for (int j = 0; j < divisions[1]; ++j) {
      for (int i = 0; i < divisions[0]; ++i) {
        std::array<Index, 8> conn{};
        for (int a = 0; a < 8; ++a) {
          conn[a] = mesh.node_index(i + (hex8::corners[a][0] > 0), j + (hex8::corners[a][1] > 0),
                                    k + (hex8::corners[a][2] > 0));
        }
        mesh.hexes.push_back(conn);
      }
    }
  }

  const char* names[3][2] = {{"xmin", "xmax"}, {"ymin", "ymax"}, {"zmin", "zmax"}};
  for (int d = 0; d < 3; ++d) {
    for (int side = 0; side < 2; ++side) {
      const int fixed = side == 0 ? 0 : divisions[d];
      std::vector<Index> nodes;
      for (int k = 0; k < nz; ++k) {
        for (int j = 0; j < ny; ++j) {
          for (int i = 0; i < nx; ++i) {
            const int idx[3] = {i, j, k};
            if (idx[d] == fixed) nodes.push_back(mesh.node_index(i, j, k));
          }
        }
      }
      const int cell = side == 0 ? 0 : divisions[d] - 1;
      std::vector<Facet> facets;
      for (int k = 0; k < divisions[2]; ++k) {
        for (int j = 0; j < divisions[1]; ++j) {
          for (int i = 0; i < divisions[0]; ++i) {
            const int idx[3] = {i, j, k};
            if (idx[d] == cell) facets.push_back({mesh.hex_index(i, j, k), 2 * d + side});
          }
        }
      }
      mesh.node_sets[names[d][side]] = std::move(nodes);
      mesh.face_sets[names[d][side]] = std::move(facets);
    }
  }
  std::vector<Index> all(mesh.nodes.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<Index>(i);
  mesh.node_sets["all"] = std::move(all);
  return mesh;
}

std::optional<LocalPoint> try_locate_point(const SolidMesh& mesh, const Vec3& x) {
  if (mesh.hexes.empty()) throw InvalidArgument("locate_point: empty mesh");
  int cell[3];
  Vec3 xi;
  for (int d = 0; d < 3; ++d) {
    double s = (x[d] - mesh.origin[d]) / mesh.h[d];
    const double r = std::round(s);
    if (std::abs(s - r) <= kLocateTolerance) s = r;
    const int n = mesh.divisions[d];
    if (s < -kLocateTolerance || s > n + kLocateTolerance) return std::nullopt;
    int i = static_cast<int>(std::ceil(s)) - 1;
    if (i < 0) i = 0;
    if (i > n - 1) i = n - 1;
    cell[d] = i;
    xi[d] = 2.0 * (s - i) - 1.0;
  }
  return LocalPoint{mesh.hex_index(cell[0], cell[1], cell[2]), xi};
}

LocalPoint locate_point(const SolidMesh& mesh, const Vec3& x) {
  auto p = try_locate_point(mesh, x);
  if (!p) throw NotFound("locate_point: point outside the solid mesh");
  return *p;
}

std::optional<LocalPoint> locate_point_by_search(const SolidMesh& mesh, const Vec3& x) {
  for (Index e = 0; e < mesh.num_hexes(); ++e) {
    const hex8::Coords c = mesh.hex_coords(e);
    const Vec3 lo = c.colwise().minCoeff().transpose();
    const Vec3 hi = c.colwise().maxCoeff().transpose();
    const double pad = kLocateTolerance * (hi - lo).maxCoeff();
    if ((x.array() < lo.array() - pad).any() || (x.array() > hi.array() + pad).any()) continue;
    Vec3 xi = Vec3::Zero();
    for (int it = 0; it < 30; ++it) {
      const Vec3 r = hex8::map(c, xi) - x;
      const Vec3 dxi = hex8::jacobian(c, xi).lu().solve(r);
      xi -= dxi;
      if (dxi.norm() < 1e-15) break;
    }
    if ((xi.array().abs() <= 1.0 + kLocateTolerance).all()) {
      return LocalPoint{e, xi.cwiseMax(-1.0).cwiseMin(1.0)};
    }
  }
  return std::nullopt;
}

Vec3 to_physical(const SolidMesh& mesh, const LocalPoint& p) {
  return hex8::map(mesh.hex_coords(p.element), p.xi);
}

// ---------------------------------------------------------------------------

void validate_frame(const Frame& frame) {
  const Mat3 gram = frame.axes.transpose() * frame.axes;
  if ((gram - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-12) {
    throw InvalidArgument("frame axes are not orthonormal");
  }
  if (frame.axes.determinant() < 0.0) throw InvalidArgument("frame axes are not right-handed");
}

Frame frame_from_axis(const Vec3& origin, const Vec3& axis3) {
  const double n = axis3.norm();
  if (!(n > 0.0)) throw InvalidArgument("frame_from_axis: zero axis");
  const Vec3 e3 = axis3 / n;
  // Seed with the global axis least aligned with e3.
  int k = 0;
  e3.cwiseAbs().minCoeff(&k);
  Vec3 seed = Vec3::Zero();
  seed[k] = 1.0;
  const Vec3 e1 = (seed - seed.dot(e3) * e3).normalized();
  const Vec3 e2 = e3.cross(e1);
  Frame f;
  f.origin = origin;
  f.axes.col(0) = e1;
  f.axes.col(1) = e2;
  f.axes.col(2) = e3;
  return f;
}

double BaseMesh::measure() const {
  if (dim == 0) return 1.0;
  if (dim == 1) return extent[0];
  return extent[0] * extent[1];
}

BaseMesh build_base_mesh(BaseKind kind, const Frame& placement, const Vec2& extent,
                         const std::array<int, 2>& divisions) {
  validate_frame(placement);
  BaseMesh mesh;
  mesh.placement = placement;
  switch (kind) {
    case BaseKind::point:
      mesh.dim = 0;
      mesh.nodes.push_back(Vec2::Zero());
      mesh.h_base = 0.0;
      break;
    case BaseKind::line: {
      if (divisions[0] < 1) throw InvalidArgument("build_base_mesh: line needs >= 1 division");
      if (!(extent[0] > 0.0)) throw InvalidArgument("build_base_mesh: line length must be positive");
      mesh.dim = 1;
      mesh.extent = Vec2(extent[0], 0.0);
      mesh.divisions = {divisions[0], 0};
      mesh.h_base = extent[0] / divisions[0];
      for (int i = 0; i <= divisions[0]; ++i) {
        const double s = i == divisions[0] ? extent[0] : i * mesh.h_base;
        mesh.nodes.emplace_back(s, 0.0);
      }
      for (int i = 0; i < divisions[0]; ++i) mesh.elements.push_back({i, i + 1, -1, -1});
      break;
    }
    case BaseKind::quad_grid: {
      if (divisions[0] < 1 || divisions[1] < 1) {
        throw InvalidArgument("build_base_mesh: quad grid needs >= 1 division per axis");
      }
      if (!(extent[0] > 0.0) || !(extent[1] > 0.0)) {
        throw InvalidArgument("build_base_mesh: quad grid extents must be positive");
      }
      mesh.dim = 2;
      mesh.extent = extent;
      mesh.divisions = divisions;
      const double h0 = extent[0] / divisions[0];
      const double h1 = extent[1] / divisions[1];
      mesh.h_base = std::max(h0, h1);
      const int n0 = divisions[0] + 1;
      for (int j = 0; j <= divisions[1]; ++j) {
        for (int i = 0; i <= divisions[0]; ++i) {
          mesh.nodes.emplace_back(i == divisions[0] ? extent[0] : i * h0,
                                  j == divisions[1] ? extent[1] : j * h1);
        }
      }
      for (int j = 0; j < divisions[1]; ++j) {
        for (int i = 0; i < divisions[0]; ++i) {
          const Index a = i + static_cast<Index>(n0) * j;
          mesh.elements.push_back({a, a + 1, a + 1 + n0, a + n0});
        }
      }
      break;
    }
  }
  return mesh;
}

BaseShape base_shape(const BaseMesh& mesh, Index element, const Vec2& ref) {
  BaseShape s;
  if (mesh.dim == 0) {
    s.value[0] = 1.0;
    return s;
  }
  const auto& conn = mesh.elements.at(static_cast<std::size_t>(element));
  if (mesh.dim == 1) {
    const double len = mesh.nodes[conn[1]][0] - mesh.nodes[conn[0]][0];
    s.value[0] = 0.5 * (1.0 - ref[0]);
    s.value[1] = 0.5 * (1.0 + ref[0]);
    s.grad_sigma[0] = Vec2(-1.0 / len, 0.0);
    s.grad_sigma[1] = Vec2(1.0 / len, 0.0);
  } else if (mesh.dim == 2) {
    const Vec2 d = mesh.nodes[conn[2]] - mesh.nodes[conn[0]];
    static constexpr int sx[4] = {-1, 1, 1, -1};
    static constexpr int sy[4] = {-1, -1, 1, 1};
    for (int a = 0; a < 4; ++a) {
      s.value[a] = 0.25 * (1.0 + sx[a] * ref[0]) * (1.0 + sy[a] * ref[1]);
      s.grad_sigma[a] = Vec2(0.25 * sx[a] * (1.0 + sy[a] * ref[1]) * 2.0 / d[0],
                             0.25 * sy[a] * (1.0 + sx[a] * ref[0]) * 2.0 / d[1]);
    }
  }
  return s;
}

Vec2 base_point(const BaseMesh& mesh, Index element, const Vec2& ref) {
  if (mesh.dim == 0) return mesh.nodes[0];
  const BaseShape s = base_shape(mesh, element, ref);
  const auto& conn = mesh.elements.at(static_cast<std::size_t>(element));
  Vec2 p = Vec2::Zero();
  for (int a = 0; a < mesh.nodes_per_element(); ++a) p += s.value[a] * mesh.nodes[conn[a]];
  return p;
}

std::optional<std::pair<Index, Vec2>> locate_base(const BaseMesh& mesh, const Vec2& sigma) {
  if (mesh.dim == 0) return std::nullopt;
  Vec2 ref = Vec2::Zero();
  int cell[2] = {0, 0};
  for (int d = 0; d < mesh.dim; ++d) {
    const int n = mesh.divisions[d];
    double s = sigma[d] / mesh.extent[d] * n;
    const double r = std::round(s);
    if (std::abs(s - r) <= kLocateTolerance) s = r;
    if (s < -kLocateTolerance || s > n + kLocateTolerance) return std::nullopt;
    int i = static_cast<int>(std::ceil(s)) - 1;
    i = std::clamp(i, 0, n - 1);
    cell[d] = i;
    ref[d] = 2.0 * (s - i) - 1.0;
  }
  const Index e = mesh.dim == 1 ? cell[0] : cell[0] + static_cast<Index>(mesh.divisions[0]) * cell[1];
  return std::make_pair(e, ref);
}

}  // namespace embedfem
