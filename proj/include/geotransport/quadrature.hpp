#pragma once

#include <array>
#include <vector>

namespace geotransport {

/// One node of a rule on the reference triangle, in barycentric coordinates.
struct TriangleNode {
  std::array<double, 3> bary;
  double weight;  // weights sum to 1
};

/// Symmetric 16-point rule, exact for polynomials of total degree <= 8
/// (Dunavant 1985). All nodes are interior and all weights positive.
const std::vector<TriangleNode>& triangle_rule_degree8();

struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1], nodes ascending.
GaussLegendre gauss_legendre(int n);

}  // namespace geotransport
