#pragma once

#include "embedfem/types.hpp"

#include <memory>

namespace embedfem::detail {

/// Supernodal Cholesky of a sparse SPD matrix (full symmetric storage).
class SpdFactor {
 public:
  SpdFactor();
  ~SpdFactor();
  SpdFactor(const SpdFactor&) = delete;
  SpdFactor& operator=(const SpdFactor&) = delete;

  /// False if the matrix is not numerically positive definite.
  bool factor(const SparseMatrix& k);
  /// Reciprocal condition estimate (min L_ii / max L_ii)^2.
  [[nodiscard]] double rcond() const;
  [[nodiscard]] Matrix solve(const Matrix& b) const;
  [[nodiscard]] Vector solve(const Vector& b) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Whether SpdFactor is backed by a real factorization library.
bool have_spd_factor();

}  // namespace embedfem::detail
