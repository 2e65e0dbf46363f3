#include "cholmod_backend.hpp"

#include "embedfem/errors.hpp"

#ifdef EMBEDFEM_HAVE_CHOLMOD
#include <cholmod.h>
#endif

#include <cstring>

namespace embedfem::detail {

#ifdef EMBEDFEM_HAVE_CHOLMOD

struct SpdFactor::Impl {
  cholmod_common common{};
  cholmod_factor* l = nullptr;
  Index n = 0;

  Impl() {
    cholmod_start(&common);
    common.print = 0;
    common.error_handler = nullptr;
  }
  ~Impl() {
    if (l) cholmod_free_factor(&l, &common);
    cholmod_finish(&common);
  }
};

SpdFactor::SpdFactor() : impl_(std::make_unique<Impl>()) {}
SpdFactor::~SpdFactor() = default;

bool SpdFactor::factor(const SparseMatrix& k) {
  if (impl_->l) cholmod_free_factor(&impl_->l, &impl_->common);
  SparseMatrix lower = k.triangularView<Eigen::Lower>();
  lower.makeCompressed();
  impl_->n = lower.rows();
  cholmod_sparse view{};
  view.nrow = lower.rows();
  view.ncol = lower.cols();
  view.nzmax = lower.nonZeros();
  view.p = lower.outerIndexPtr();
  view.i = lower.innerIndexPtr();
  view.x = lower.valuePtr();
  view.stype = -1;
  view.itype = CHOLMOD_INT;
  view.xtype = CHOLMOD_REAL;
  view.dtype = CHOLMOD_DOUBLE;
  view.sorted = 1;
  view.packed = 1;
  impl_->l = cholmod_analyze(&view, &impl_->common);
  if (!impl_->l) throw InternalError("cholmod_analyze failed");
  cholmod_factorize(&view, impl_->l, &impl_->common);
  return impl_->common.status == CHOLMOD_OK && impl_->l->minor == static_cast<size_t>(impl_->n);
}

double SpdFactor::rcond() const {
  if (!impl_->l) return 0.0;
  return cholmod_rcond(impl_->l, const_cast<cholmod_common*>(&impl_->common));
}

Matrix SpdFactor::solve(const Matrix& b) const {
  if (!impl_->l || b.rows() != impl_->n) throw InternalError("SpdFactor::solve: not factored");
  Matrix copy = b;
  cholmod_dense rhs{};
  rhs.nrow = copy.rows();
  rhs.ncol = copy.cols();
  rhs.nzmax = copy.size();
  rhs.d = copy.rows();
  rhs.x = copy.data();
  rhs.xtype = CHOLMOD_REAL;
  rhs.dtype = CHOLMOD_DOUBLE;
  auto* common = const_cast<cholmod_common*>(&impl_->common);
  cholmod_dense* x = cholmod_solve(CHOLMOD_A, impl_->l, &rhs, common);
  if (!x) throw InternalError("cholmod_solve failed");
  Matrix out(b.rows(), b.cols());
  std::memcpy(out.data(), x->x, sizeof(double) * static_cast<size_t>(out.size()));
  cholmod_free_dense(&x, common);
  return out;
}

Vector SpdFactor::solve(const Vector& b) const { return solve(Matrix(b)).col(0); }

bool have_spd_factor() { return true; }

#else

struct SpdFactor::Impl {};
SpdFactor::SpdFactor() : impl_(std::make_unique<Impl>()) {}
SpdFactor::~SpdFactor() = default;
bool SpdFactor::factor(const SparseMatrix&) { throw InternalError("built without CHOLMOD"); }
double SpdFactor::rcond() const { return 0.0; }
Matrix SpdFactor::solve(const Matrix&) const { throw InternalError("built without CHOLMOD"); }
Vector SpdFactor::solve(const Vector&) const { throw InternalError("built without CHOLMOD"); }
bool have_spd_factor() { return false; }

#endif

}  // namespace embedfem::detail
