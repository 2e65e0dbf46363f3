#include "embedfem/saddle.hpp"

#include "embedfem/errors.hpp"

namespace embedfem {

namespace {

void append_block(std::vector<Triplet>& t, const SparseMatrix& m, Index row0, Index col0) {
  for (Index c = 0; c < m.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(m, c); it; ++it) t.emplace_back(row0 + it.row(), col0 + it.col(), it.value());
  }
}

}  // namespace

SparseMatrix SaddleSystem::kkt() const {
  const Index n = size();
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(a.nonZeros() + 2 * b.nonZeros()));
  append_block(t, a, 0, 0);
  append_block(t, b, layout.primal, 0);
  const SparseMatrix bt = b.transpose();
  append_block(t, bt, 0, layout.primal);
  SparseMatrix k(n, n);
  k.setFromTriplets(t.begin(), t.end());
  return k;
}

Vector SaddleSystem::rhs() const {
  Vector r(size());
  r << f, g;
  return r;
}

SaddleSystem assemble_saddle(const SparseSym& solid_k, const DofMap& solid_dofs, const Vector& solid_load,
                             const std::vector<SaddleStructure>& structures) {
  if (solid_k.size() != solid_dofs.num_full() || solid_load.size() != solid_dofs.num_full()) {
    throw InvalidArgument("assemble_saddle: solid dimensions do not match");
  }
  SaddleSystem sys;
  SaddleLayout& lay = sys.layout;
  lay.solid_size = solid_dofs.num_free();
  Index offset = lay.solid_size;
  Index moffset = 0;
  for (const auto& s : structures) {
    if (!s.stiffness || !s.dofs) throw InvalidArgument("assemble_saddle: structure without stiffness or DOF map");
    if (s.stiffness->size() != s.dofs->num_full() || s.load.size() != s.dofs->num_full()) {
      throw InvalidArgument("assemble_saddle: structure dimensions do not match");
    }
    lay.structure_offset.push_back(offset);
    lay.structure_size.push_back(s.dofs->num_free());
    offset += s.dofs->num_free();
    const Index m = s.coupling ? s.coupling->rows() : 0;
    if (s.coupling && (s.coupling->b_structure.cols() != s.dofs->num_full() ||
                       s.coupling->b_solid.cols() != solid_dofs.num_full())) {
      throw InvalidArgument("assemble_saddle: coupling dimensions do not match");
    }
    lay.multiplier_offset.push_back(moffset);
    lay.multiplier_size.push_back(m);
    moffset += m;
  }
  lay.primal = offset;
  lay.multipliers = moffset;

  std::vector<Triplet> ta;
  const SparseSym ks = solid_dofs.reduce(solid_k);
  append_block(ta, ks.matrix(), 0, 0);
  sys.f = Vector::Zero(lay.primal);
  sys.f.head(lay.solid_size) = solid_dofs.reduce_rhs(solid_load, solid_k);
  sys.g = Vector::Zero(lay.multipliers);
  std::vector<Triplet> tb;
  const Vector solid_offsets = solid_dofs.offsets();
  for (std::size_t i = 0; i < structures.size(); ++i) {
    const auto& s = structures[i];
    const Index o = lay.structure_offset[i];
    append_block(ta, s.dofs->reduce(*s.stiffness).matrix(), o, o);
    sys.f.segment(o, lay.structure_size[i]) = s.dofs->reduce_rhs(s.load, *s.stiffness);
    if (!s.coupling) continue;
    const Index mo = lay.multiplier_offset[i];
    append_block(tb, s.dofs->reduce_columns(s.coupling->b_structure), mo, o);
    append_block(tb, solid_dofs.reduce_columns(s.coupling->b_solid), mo, 0);
    sys.g.segment(mo, lay.multiplier_size[i]) = s.coupling->rhs - s.coupling->b_structure * s.dofs->offsets() -
                                                s.coupling->b_solid * solid_offsets;
  }
  sys.a.resize(lay.primal, lay.primal);
  sys.a.setFromTriplets(ta.begin(), ta.end());
  sys.b.resize(lay.multipliers, lay.primal);
  sys.b.setFromTriplets(tb.begin(), tb.end());
  return sys;
}

SaddleSolution solve(const SaddleSystem& system, const SolverOptions& options) {
  SaddleSolution sol;
  Vector z;
  if (system.layout.multipliers == 0) {
    z = solve_spd(system.a, system.f, options, &sol.stats);
  } else {
    z = solve_kkt(system.a, system.b, system.f, system.g, options, &sol.stats);
  }
  sol.x = z.head(system.layout.primal);
  sol.lambda = z.tail(system.layout.multipliers);
  return sol;
}

}  // namespace embedfem
