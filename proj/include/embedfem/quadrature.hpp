#pragma once

#include <vector>

namespace embedfem {

struct GaussRule {
  std::vector<double> points;   // on [-1, 1]
  std::vector<double> weights;  // sum to 2
};

/// Gauss-Legendre rule with `n` points, exact for polynomials of degree 2n-1.
const GaussRule& gauss_legendre(int n);

}  // namespace embedfem
