#include "embedfem/coupling.hpp"

#include "embedfem/errors.hpp"
#include "embedfem/quadrature.hpp"

#include <cmath>
#include <iostream>
#include <numbers>

namespace embedfem {

namespace {

struct RulePoint {
  Vec3 xi;
  double w;
};

std::vector<RulePoint> fiber_rule(const FiberSpec& fiber, int n) {
  std::vector<RulePoint> pts;
  const GaussRule& g = gauss_legendre(n);
  switch (fiber.shape) {
    case FiberShape::segment:
      for (int i = 0; i < n; ++i) {
        pts.push_back({Vec3(0.5 * fiber.size[0] * g.points[i], 0.0, 0.0), 0.5 * fiber.size[0] * g.weights[i]});
      }
      break;
    case FiberShape::rectangle:
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          pts.push_back({Vec3(0.5 * fiber.size[0] * g.points[i], 0.5 * fiber.size[1] * g.points[j], 0.0),
                         0.25 * fiber.size[0] * fiber.size[1] * g.weights[i] * g.weights[j]});
        }
      }
      break;
    case FiberShape::circle: {
      const double r = fiber.size[0];
      const int na = 2 * n;
      for (int i = 0; i < n; ++i) {
        const double rho = 0.5 * r * (1.0 + g.points[i]);
        const double wr = 0.5 * r * g.weights[i] * rho;
        for (int k = 0; k < na; ++k) {
          const double phi = 2.0 * std::numbers::pi * (k + 0.5) / na;
          pts.push_back({Vec3(rho * std::cos(phi), rho * std::sin(phi), 0.0), wr * 2.0 * std::numbers::pi / na});
        }
      }
      break;
    }
    case FiberShape::box:
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          for (int k = 0; k < n; ++k) {
            pts.push_back({0.5 * fiber.size.cwiseProduct(Vec3(g.points[i], g.points[j], g.points[k])),
                           0.125 * fiber.size.prod() * g.weights[i] * g.weights[j] * g.weights[k]});
          }
        }
      }
      break;
  }
  return pts;
}

struct BasePoint {
  Index element;
  Vec2 ref;
  double w;
};

std::vector<BasePoint> base_rule(const StructureModel& model) {
  std::vector<BasePoint> pts;
  const BaseMesh& base = model.base;
  if (base.dim == 0) {
    pts.push_back({0, Vec2::Zero(), 1.0});
    return pts;
  }
  const GaussRule& g = gauss_legendre(2);
  for (Index e = 0; e < base.num_elements(); ++e) {
    const auto& conn = base.elements[static_cast<std::size_t>(e)];
    if (base.dim == 1) {
      pts.push_back({e, Vec2::Zero(), base.nodes[conn[1]][0] - base.nodes[conn[0]][0]});
    } else {
      const Vec2 d = base.nodes[conn[2]] - base.nodes[conn[0]];
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          pts.push_back({e, Vec2(g.points[i], g.points[j]), 0.25 * d[0] * d[1] * g.weights[i] * g.weights[j]});
        }
      }
    }
  }
  return pts;
}

Vec3 wrap_point(const PeriodicWrap& wrap, const Vec3& x) {
  Vec3 y;
  for (int d = 0; d < 3; ++d) {
    const double len = wrap.hi[d] - wrap.lo[d];
    double s = x[d] - wrap.lo[d];
    s -= len * std::floor(s / len);
    y[d] = wrap.lo[d] + s;
  }
  return y;
}

}  // namespace

FiberQuadrature build_fiber_quadrature(const StructureModel& model, const SolidMesh& solid, int n_fiber,
                                       const std::optional<PeriodicWrap>& wrap) {
  if (n_fiber < 1) throw InvalidArgument("build_fiber_quadrature: need at least one fiber point per axis");
  FiberQuadrature quad;
  quad.fiber_points = n_fiber;
  const auto fiber = fiber_rule(model.fiber, n_fiber);
  for (const BasePoint& b : base_rule(model)) {
    const Vec2 sigma = base_point(model.base, b.element, b.ref);
    for (const RulePoint& f : fiber) {
      FiberQuadraturePoint p;
      p.base_element = b.element;
      p.base_ref = b.ref;
      p.sigma = sigma;
      p.xi = f.xi;
      p.weight = b.w * f.w;
      const Vec3 x = model.embed(sigma, f.xi);
      p.x = wrap ? wrap_point(*wrap, x) : x;
      if (wrap) p.shift = wrap->macro_gradient * (x - p.x);
      const auto loc = try_locate_point(solid, p.x);
      if (!loc) {
        ++quad.dropped;
        quad.dropped_weight += p.weight;
        continue;
      }
      p.solid = *loc;
      quad.points.push_back(p);
    }
  }
  if (quad.points.empty()) throw ConfigurationError("structure has no quadrature point inside the solid");
  if (quad.dropped > 0) {
    std::clog << "embedfem: dropped " << quad.dropped << " coupling quadrature points outside the solid\n";
  }
  return quad;
}

Vector CouplingOperator::apply(const Vector& structure, const Vector& solid) const {
  return b_structure * structure + b_solid * solid;
}

CouplingOperator assemble_coupling(const FiberQuadrature& quad, const SolidMesh& solid, const StructureModel& model,
                                   const CouplingOptions& options) {
  CouplingOperator op;
  op.ell_c = options.ell_c > 0.0 ? options.ell_c : model.ell;
  op.dropped_points = quad.dropped;
  const double l2 = op.ell_c * op.ell_c;
  const int r = model.rotation_dofs();

  std::vector<bool> embedded(static_cast<std::size_t>(model.num_nodes()), false);
  for (const auto& p : quad.points) {
    if (model.base.dim == 0) {
      embedded[0] = true;
      continue;
    }
    const auto& conn = model.base.elements[static_cast<std::size_t>(p.base_element)];
    for (int a = 0; a < model.base.nodes_per_element(); ++a) embedded[static_cast<std::size_t>(conn[a])] = true;
  }
  op.space.rotation_dofs = r;
  op.space.rotation_rows = options.rotation_rows;
  for (Index n = 0; n < model.num_nodes(); ++n) {
    if (embedded[static_cast<std::size_t>(n)]) op.space.nodes.push_back(n);
  }
  const Index nn = static_cast<Index>(op.space.nodes.size());
  std::vector<Index> row_of(static_cast<std::size_t>(model.num_dofs()), -1);
  for (Index k = 0; k < nn; ++k) {
    const Index n = op.space.nodes[static_cast<std::size_t>(k)];
    for (int c = 0; c < 3; ++c) row_of[static_cast<std::size_t>(model.sigma_dof(n, c))] = 3 * k + c;
    if (options.rotation_rows) {
      for (int c = 0; c < r; ++c) row_of[static_cast<std::size_t>(model.theta_dof(n, c))] = 3 * nn + r * k + c;
    }
  }
  const Index rows = op.space.size();

  const Mat3 rot = model.frame().axes;
  std::vector<Triplet> ts;
  std::vector<Triplet> tu;
  op.rhs = Vector::Zero(rows);
  for (const auto& p : quad.points) {
    const hex8::Coords coords = solid.hex_coords(p.solid.element);
    if ((hex8::map(coords, p.solid.xi) - p.x).norm() > 1e-9 * solid.h.maxCoeff()) {
      throw InternalError("coupling: cached solid location does not match the quadrature point");
    }
    const AnsatzOperator a = ansatz_operator(model, p.base_element, p.base_ref, p.xi);
    const Index na = static_cast<Index>(a.dofs.size());

    const Matrix kss = p.weight * (a.value.transpose() * a.value + l2 * a.gradient.transpose() * a.gradient);
    for (Index i = 0; i < na; ++i) {
      const Index row = row_of[static_cast<std::size_t>(a.dofs[static_cast<std::size_t>(i)])];
      if (row < 0) continue;
      for (Index j = 0; j < na; ++j) {
        if (kss(i, j) != 0.0) ts.emplace_back(row, a.dofs[static_cast<std::size_t>(j)], kss(i, j));
      }
    }

    const hex8::ShapeValues nsh = hex8::shape(p.solid.xi);
    const Mat3 jac = hex8::jacobian(coords, p.solid.xi);
    const hex8::ShapeGradients dn = hex8::shape_gradients(p.solid.xi) * jac.inverse();
    Eigen::Matrix<double, 3, 24> sv;
    Eigen::Matrix<double, 9, 24> sg;
    for (int n = 0; n < 8; ++n) {
      sv.block<3, 3>(0, 3 * n) = nsh[n] * rot.transpose();
      const Vec3 h = rot.transpose() * dn.row(n).transpose();
      for (int j = 0; j < 3; ++j) {
        for (int i = 0; i < 3; ++i) {
          for (int k = 0; k < 3; ++k) sg(i + 3 * j, 3 * n + k) = rot(k, i) * h[j];
        }
      }
    }
    const Matrix ksu = -p.weight * (a.value.transpose() * sv + l2 * a.gradient.transpose() * sg);
    const Vector g = p.weight * (a.value.transpose() * (rot.transpose() * p.shift));
    const auto& conn = solid.hexes[static_cast<std::size_t>(p.solid.element)];
    for (Index i = 0; i < na; ++i) {
      const Index row = row_of[static_cast<std::size_t>(a.dofs[static_cast<std::size_t>(i)])];
      if (row < 0) continue;
      op.rhs[row] += g[i];
      for (int j = 0; j < 24; ++j) {
        if (ksu(i, j) != 0.0) tu.emplace_back(row, 3 * conn[j / 3] + j % 3, ksu(i, j));
      }
    }
  }
  op.b_structure.resize(rows, model.num_dofs());
  op.b_structure.setFromTriplets(ts.begin(), ts.end());
  op.b_solid.resize(rows, solid.num_dofs());
  op.b_solid.setFromTriplets(tu.begin(), tu.end());
  op.b_structure.makeCompressed();
  op.b_solid.makeCompressed();
  return op;
}

double kernel_residual(const CouplingOperator& op, const Vector& structure, const Vector& solid) {
  const Vector res = op.apply(structure, solid) - op.rhs;
  Vector row_sum = Vector::Zero(op.rows());
  for (Index c = 0; c < op.b_structure.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(op.b_structure, c); it; ++it) row_sum[it.row()] += std::abs(it.value());
  }
  for (Index c = 0; c < op.b_solid.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(op.b_solid, c); it; ++it) row_sum[it.row()] += std::abs(it.value());
  }
  const double bnorm = op.rows() > 0 ? row_sum.maxCoeff() : 0.0;
  const double xnorm = std::max(structure.size() ? structure.cwiseAbs().maxCoeff() : 0.0,
                                solid.size() ? solid.cwiseAbs().maxCoeff() : 0.0);
  const double rnorm = op.rows() > 0 ? res.cwiseAbs().maxCoeff() : 0.0;
  if (rnorm == 0.0) return 0.0;
  if (bnorm == 0.0 || xnorm == 0.0) return rnorm;
  return rnorm / (bnorm * xnorm);
}

}  // namespace embedfem
