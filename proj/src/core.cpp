#include "embedfem/errors.hpp"
#include "embedfem/types.hpp"

#include <sstream>

namespace embedfem {

SparseSym::SparseSym(SparseMatrix m) : matrix_(std::move(m)) {
  if (matrix_.rows() != matrix_.cols()) throw InvalidArgument("SparseSym: matrix is not square");
  matrix_.makeCompressed();
}

SparseSym sparse_sym_from_upper(Index n, const std::vector<Triplet>& upper) {
  std::vector<Triplet> all;
  all.reserve(2 * upper.size());
  for (const Triplet& t : upper) {
    if (t.row() > t.col()) throw InvalidArgument("sparse_sym_from_upper: entry below the diagonal");
    all.push_back(t);
    if (t.row() != t.col()) all.emplace_back(t.col(), t.row(), t.value());
  }
  SparseMatrix m(n, n);
  m.setFromTriplets(all.begin(), all.end());
  return SparseSym(std::move(m));
}

namespace {
std::string join_errors(const std::vector<std::string>& errors) {
  std::ostringstream os;
  os << "invalid configuration";
  for (const auto& e : errors) os << "\n  " << e;
  return os.str();
}
}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : Error(join_errors(errors)), errors_(std::move(errors)) {}

}  // namespace embedfem
