#pragma once

#include "embedfem/types.hpp"

#include <vector>

namespace embedfem {

/// Affine map from free unknowns to a full DOF vector.
///
/// Every full DOF is either free, prescribed (`fix`), or a copy of another
/// DOF plus a constant (`tie`, used for periodicity). After `finalize`,
/// full = T * free + g, with T a 0/1 selection matrix.
class DofMap {
 public:
  DofMap() = default;
  explicit DofMap(Index num_full);

  /// All DOFs free, already finalized.
  static DofMap identity(Index num_full);

  void fix(Index dof, double value);
  /// u[slave] = u[master] + shift.
  void tie(Index slave, Index master, double shift);

  /// Resolves tie chains and numbers the free DOFs in full-index order.
  /// Throws ConfigurationError on cyclic ties or conflicting constraints.
  void finalize();

  [[nodiscard]] bool finalized() const { return finalized_; }
  [[nodiscard]] Index num_full() const { return static_cast<Index>(kind_.size()); }
  [[nodiscard]] Index num_free() const { return num_free_; }
  [[nodiscard]] Index num_fixed() const;
  [[nodiscard]] Index num_tied() const;
  /// Free index a full DOF follows, or -1 if it is prescribed.
  [[nodiscard]] Index free_index(Index dof) const { return free_index_[static_cast<std::size_t>(dof)]; }
  [[nodiscard]] double offset(Index dof) const { return offset_[static_cast<std::size_t>(dof)]; }
  [[nodiscard]] bool is_fixed(Index dof) const { return free_index(dof) < 0; }

  [[nodiscard]] SparseMatrix transfer() const;
  [[nodiscard]] Vector offsets() const;
  [[nodiscard]] Vector expand(const Vector& free) const;
  /// T^T v: sums full-vector entries onto their free DOF.
  [[nodiscard]] Vector restrict_vector(const Vector& full) const;
  [[nodiscard]] SparseSym reduce(const SparseSym& full) const;
  [[nodiscard]] SparseMatrix reduce_columns(const SparseMatrix& full_cols) const;
  /// T^T (f - K g).
  [[nodiscard]] Vector reduce_rhs(const Vector& f, const SparseSym& k) const;

 private:
  enum class Kind : unsigned char { free, fixed, tied };
  void require_mutable() const;
  void require_finalized() const;

  std::vector<Kind> kind_;
  std::vector<Index> master_;
  std::vector<double> value_;
  std::vector<Index> free_index_;
  std::vector<double> offset_;
  Index num_free_ = 0;
  bool finalized_ = false;
};

}  // namespace embedfem
