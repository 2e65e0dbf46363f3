#include "embedfem/dof_map.hpp"

#include "embedfem/errors.hpp"

#include <cmath>
#include <string>

namespace embedfem {

DofMap::DofMap(Index num_full)
    : kind_(static_cast<std::size_t>(num_full), Kind::free),
      master_(static_cast<std::size_t>(num_full), -1),
      value_(static_cast<std::size_t>(num_full), 0.0) {
  if (num_full < 0) throw InvalidArgument("DofMap: negative size");
}

DofMap DofMap::identity(Index num_full) {
  DofMap m(num_full);
  m.finalize();
  return m;
}

void DofMap::require_mutable() const {
  if (finalized_) throw InternalError("DofMap: modified after finalize");
}

void DofMap::require_finalized() const {
  if (!finalized_) throw InternalError("DofMap: used before finalize");
}

void DofMap::fix(Index dof, double value) {
  require_mutable();
  if (dof < 0 || dof >= num_full()) throw InvalidArgument("DofMap::fix: DOF out of range");
  const auto i = static_cast<std::size_t>(dof);
  if (kind_[i] == Kind::tied) {
    throw ConfigurationError("DofMap: DOF " + std::to_string(dof) + " is both tied and prescribed");
  }
  if (kind_[i] == Kind::fixed && value_[i] != value) {
    throw ConfigurationError("DofMap: conflicting prescribed values for DOF " + std::to_string(dof));
  }
  kind_[i] = Kind::fixed;
  value_[i] = value;
}

void DofMap::tie(Index slave, Index master, double shift) {
  require_mutable();
  if (slave < 0 || slave >= num_full() || master < 0 || master >= num_full()) {
    throw InvalidArgument("DofMap::tie: DOF out of range");
  }
  if (slave == master) throw InvalidArgument("DofMap::tie: DOF tied to itself");
  const auto i = static_cast<std::size_t>(slave);
  if (kind_[i] != Kind::free) {
    throw ConfigurationError("DofMap: DOF " + std::to_string(slave) + " constrained twice");
  }
  kind_[i] = Kind::tied;
  master_[i] = master;
  value_[i] = shift;
}

void DofMap::finalize() {
  require_mutable();
  const std::size_t n = kind_.size();
  free_index_.assign(n, -1);
  offset_.assign(n, 0.0);
  num_free_ = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (kind_[i] == Kind::free) free_index_[i] = num_free_++;
    if (kind_[i] == Kind::fixed) offset_[i] = value_[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (kind_[i] != Kind::tied) continue;
    double shift = 0.0;
    std::size_t root = i;
    std::size_t steps = 0;
    while (kind_[root] == Kind::tied) {
      shift += value_[root];
      root = static_cast<std::size_t>(master_[root]);
      if (++steps > n) throw ConfigurationError("DofMap: cyclic tie chain");
    }
    free_index_[i] = free_index_[root];
    offset_[i] = offset_[root] + shift;
  }
  finalized_ = true;
}

Index DofMap::num_fixed() const {
  require_finalized();
  Index c = 0;
  for (Index f : free_index_) c += f < 0;
  return c;
}

Index DofMap::num_tied() const {
  Index c = 0;
  for (Kind k : kind_) c += k == Kind::tied;
  return c;
}

SparseMatrix DofMap::transfer() const {
  require_finalized();
  std::vector<Triplet> t;
  t.reserve(kind_.size());
  for (std::size_t i = 0; i < kind_.size(); ++i) {
    if (free_index_[i] >= 0) t.emplace_back(static_cast<Index>(i), free_index_[i], 1.0);
  }
  SparseMatrix m(num_full(), num_free_);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

Vector DofMap::offsets() const {
  require_finalized();
  return Eigen::Map<const Vector>(offset_.data(), static_cast<Index>(offset_.size()));
}

Vector DofMap::expand(const Vector& free) const {
  require_finalized();
  if (free.size() != num_free_) throw InvalidArgument("DofMap::expand: size mismatch");
  Vector full(num_full());
  for (std::size_t i = 0; i < kind_.size(); ++i) {
    full[static_cast<Index>(i)] = offset_[i] + (free_index_[i] >= 0 ? free[free_index_[i]] : 0.0);
  }
  return full;
}

Vector DofMap::restrict_vector(const Vector& full) const {
  require_finalized();
  if (full.size() != num_full()) throw InvalidArgument("DofMap::restrict_vector: size mismatch");
  Vector r = Vector::Zero(num_free_);
  for (std::size_t i = 0; i < kind_.size(); ++i) {
    if (free_index_[i] >= 0) r[free_index_[i]] += full[static_cast<Index>(i)];
  }
  return r;
}

SparseSym DofMap::reduce(const SparseSym& full) const {
  require_finalized();
  if (full.size() != num_full()) throw InvalidArgument("DofMap::reduce: size mismatch");
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(full.matrix().nonZeros()));
  const SparseMatrix& m = full.matrix();
  for (Index c = 0; c < m.outerSize(); ++c) {
    const Index fc = free_index_[static_cast<std::size_t>(c)];
    if (fc < 0) continue;
    for (SparseMatrix::InnerIterator it(m, c); it; ++it) {
      const Index fr = free_index_[static_cast<std::size_t>(it.row())];
      if (fr >= 0) t.emplace_back(fr, fc, it.value());
    }
  }
  SparseMatrix r(num_free_, num_free_);
  r.setFromTriplets(t.begin(), t.end());
  // Tied pairs can sum in different orders above and below the diagonal.
  SparseMatrix rt = r.transpose();
  return SparseSym(SparseMatrix(0.5 * (r + rt)));
}

SparseMatrix DofMap::reduce_columns(const SparseMatrix& full_cols) const {
  require_finalized();
  if (full_cols.cols() != num_full()) throw InvalidArgument("DofMap::reduce_columns: size mismatch");
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(full_cols.nonZeros()));
  for (Index c = 0; c < full_cols.outerSize(); ++c) {
    const Index fc = free_index_[static_cast<std::size_t>(c)];
    if (fc < 0) continue;
    for (SparseMatrix::InnerIterator it(full_cols, c); it; ++it) t.emplace_back(it.row(), fc, it.value());
  }
  SparseMatrix r(full_cols.rows(), num_free_);
  r.setFromTriplets(t.begin(), t.end());
  return r;
}

Vector DofMap::reduce_rhs(const Vector& f, const SparseSym& k) const {
  require_finalized();
  const Vector g = offsets();
  if (!(g.array() != 0.0).any()) return restrict_vector(f);
  return restrict_vector(f - k.matrix() * g);
}

}  // namespace embedfem
