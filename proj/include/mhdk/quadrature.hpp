#pragma once

#include "mhdk/types.hpp"

#include <vector>

namespace mhdk {

// Points live in reference coordinates; weights sum to the reference measure
// (1/6 tetrahedron, 1/2 triangle, 1 unit segment).
struct QuadratureRule {
  int degree = 0;
  std::vector<Vec3> points;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
};

// Gauss-Jacobi nodes/weights on [0,1] for the weight (1-u)^alpha.
void gauss_jacobi_unit(int npoints, int alpha, std::vector<double>& nodes,
                       std::vector<double>& weights);

// Collapsed tensor-product rules; all weights positive.
QuadratureRule tet_rule(int degree);       // degree in {1,2,4,6}
QuadratureRule triangle_rule(int degree);  // z-coordinate of points is 0
QuadratureRule segment_rule(int degree);   // points on the x-axis in [0,1]

// The rule every PDE form and error norm uses.
const QuadratureRule& default_tet_rule();
// Rules used by facet/edge moments and boundary integrals.
const QuadratureRule& default_triangle_rule();
const QuadratureRule& default_segment_rule();

}  // namespace mhdk
