#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <vector>

namespace embedfem {

using Index = std::int64_t;

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Square sparse matrix assembled symmetrically (both triangles stored).
///
/// Only the symmetric part of each element contribution is scattered, so
/// `matrix() - matrix().transpose()` is exactly zero, not merely small.
class SparseSym {
 public:
  SparseSym() = default;
  explicit SparseSym(SparseMatrix m);

  [[nodiscard]] Index size() const { return matrix_.rows(); }
  [[nodiscard]] const SparseMatrix& matrix() const { return matrix_; }
  [[nodiscard]] double quadratic_form(const Vector& x) const { return x.dot(matrix_ * x); }
  [[nodiscard]] double bilinear_form(const Vector& x, const Vector& y) const { return x.dot(matrix_ * y); }

 private:
  SparseMatrix matrix_;
};

/// Builds a SparseSym from triplets of the upper triangle (row <= col).
/// Off-diagonal entries are mirrored; diagonal entries are kept once.
SparseSym sparse_sym_from_upper(Index n, const std::vector<Triplet>& upper);

/// Skew-symmetric matrix with `[v]x * w == v.cross(w)`.
inline Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return s;
}

}  // namespace embedfem
