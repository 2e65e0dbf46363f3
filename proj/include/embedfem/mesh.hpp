#pragma once

#include "embedfem/types.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace embedfem {

/// Trilinear hexahedron on the reference cube [-1, 1]^3.
///
/// Local node a sits at (corners[a][0], corners[a][1], corners[a][2]):
///
///     a   xi  eta zeta
///     0   -1  -1  -1
///     1   +1  -1  -1
///     2   +1  +1  -1
///     3   -1  +1  -1
///     4   -1  -1  +1
///     5   +1  -1  +1
///     6   +1  +1  +1
///     7   -1  +1  +1
///
/// Faces (outward normal): 0 = -xi, 1 = +xi, 2 = -eta, 3 = +eta, 4 = -zeta, 5 = +zeta.
namespace hex8 {

inline constexpr std::array<std::array<int, 3>, 8> corners{{
    {-1, -1, -1}, {1, -1, -1}, {1, 1, -1}, {-1, 1, -1},
    {-1, -1, 1},  {1, -1, 1},  {1, 1, 1},  {-1, 1, 1},
}};

/// Local node indices of each face, counter-clockwise seen from outside.
inline constexpr std::array<std::array<int, 4>, 6> faces{{
    {0, 4, 7, 3}, {1, 2, 6, 5}, {0, 1, 5, 4}, {3, 7, 6, 2}, {0, 3, 2, 1}, {4, 5, 6, 7},
}};

using ShapeValues = Eigen::Matrix<double, 8, 1>;
using ShapeGradients = Eigen::Matrix<double, 8, 3>;
using Coords = Eigen::Matrix<double, 8, 3>;

ShapeValues shape(const Vec3& xi);
ShapeGradients shape_gradients(const Vec3& xi);

/// Physical point of reference coordinates `xi`.
Vec3 map(const Coords& coords, const Vec3& xi);

/// Jacobian dx/dxi (rows: x components, cols: xi directions).
Mat3 jacobian(const Coords& coords, const Vec3& xi);

}  // namespace hex8

/// A boundary facet, identified by its hexahedron and local face number.
struct Facet {
  Index hex = 0;
  int face = 0;
  friend bool operator==(const Facet&, const Facet&) = default;
};

/// Structured, axis-aligned hexahedral grid.
struct SolidMesh {
  std::vector<Vec3> nodes;
  std::vector<std::array<Index, 8>> hexes;
  std::map<std::string, std::vector<Index>> node_sets;
  std::map<std::string, std::vector<Facet>> face_sets;
  Vec3 h = Vec3::Zero();

  Vec3 origin = Vec3::Zero();
  Vec3 extent = Vec3::Zero();
  std::array<int, 3> divisions{0, 0, 0};

  [[nodiscard]] Index num_nodes() const { return static_cast<Index>(nodes.size()); }
  [[nodiscard]] Index num_hexes() const { return static_cast<Index>(hexes.size()); }
  [[nodiscard]] Index num_dofs() const { return 3 * num_nodes(); }
  [[nodiscard]] Index node_index(int i, int j, int k) const;
  [[nodiscard]] Index hex_index(int i, int j, int k) const;
  [[nodiscard]] hex8::Coords hex_coords(Index e) const;
  [[nodiscard]] Vec3 hex_center(Index e) const;
  [[nodiscard]] double diameter() const { return extent.norm(); }
  [[nodiscard]] double volume() const { return extent.prod(); }
};

/// Builds an origin + [0, extent] box split into `divisions` hexahedra per axis.
/// Face sets and their node sets are named xmin, xmax, ymin, ymax, zmin, zmax.
SolidMesh build_hex_grid(const Vec3& origin, const Vec3& extent, const std::array<int, 3>& divisions);

struct LocalPoint {
  Index element = 0;
  Vec3 xi = Vec3::Zero();
};

inline constexpr double kLocateTolerance = 1e-10;

/// Locates `x` by integer arithmetic on the structured grid. Points on
/// shared faces go to the lowest-index element. Throws NotFound when the
/// point is outside the box by more than the tolerance.
LocalPoint locate_point(const SolidMesh& mesh, const Vec3& x);
std::optional<LocalPoint> try_locate_point(const SolidMesh& mesh, const Vec3& x);

/// Brute-force search: Newton inversion of every element map, first hit wins.
std::optional<LocalPoint> locate_point_by_search(const SolidMesh& mesh, const Vec3& x);

Vec3 to_physical(const SolidMesh& mesh, const LocalPoint& p);

// ---------------------------------------------------------------------------

/// Orthonormal, right-handed placement: x = origin + axes * local.
struct Frame {
  Vec3 origin = Vec3::Zero();
  Mat3 axes = Mat3::Identity();  // columns are E1, E2, E3

  [[nodiscard]] Vec3 to_global(const Vec3& local) const { return origin + axes * local; }
  [[nodiscard]] Vec3 to_local(const Vec3& x) const { return axes.transpose() * (x - origin); }
};

/// Throws InvalidArgument unless the axes are orthonormal and right-handed.
void validate_frame(const Frame& frame);

/// Frame whose third axis is `axis3` (normalized), first axis chosen orthogonal.
Frame frame_from_axis(const Vec3& origin, const Vec3& axis3);

enum class BaseKind { point, line, quad_grid };

struct BaseMesh {
  int dim = 0;
  std::vector<Vec2> nodes;                    // base coordinates (unused entries zero)
  std::vector<std::array<Index, 4>> elements;  // lines use the first two entries
  double h_base = 0.0;
  Vec2 extent = Vec2::Zero();
  std::array<int, 2> divisions{0, 0};
  Frame placement;

  [[nodiscard]] Index num_nodes() const { return static_cast<Index>(nodes.size()); }
  [[nodiscard]] Index num_elements() const { return static_cast<Index>(elements.size()); }
  [[nodiscard]] int nodes_per_element() const { return dim == 1 ? 2 : (dim == 2 ? 4 : 1); }
  [[nodiscard]] double measure() const;
};

/// Base meshes: point (one node), line [0, extent[0]] with divisions[0]
/// segments, or quad grid [0, extent[0]] x [0, extent[1]].
BaseMesh build_base_mesh(BaseKind kind, const Frame& placement, const Vec2& extent,
                         const std::array<int, 2>& divisions);

/// Linear / bilinear shape functions of a base element on [-1, 1]^dim.
struct BaseShape {
  std::array<double, 4> value{};
  std::array<Vec2, 4> grad_sigma{};  // d/dsigma (physical base coordinates)
};
BaseShape base_shape(const BaseMesh& mesh, Index element, const Vec2& ref);
Vec2 base_point(const BaseMesh& mesh, Index element, const Vec2& ref);

/// Element containing base coordinate `sigma` and its reference coordinates.
std::optional<std::pair<Index, Vec2>> locate_base(const BaseMesh& mesh, const Vec2& sigma);

}  // namespace embedfem
