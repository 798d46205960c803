#include "geotransport/geodesic_grid.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>

#include <Eigen/Dense>

#include "geotransport/quadrature.hpp"

namespace geotransport {

namespace {

double det3(const Vec3& a, const Vec3& b, const Vec3& c) { return a.dot(b.cross(c)); }

// Rebuild edges, adjacency and incidence from the triangle list.
void finalize_topology(GeodesicGrid& grid) {
  const int n = grid.num_points();
  std::vector<std::array<int, 2>> edges;
  edges.reserve(grid.triangles.size() * 3);
  for (const auto& t : grid.triangles) {
    for (int e = 0; e < 3; ++e) {
      const int a = t[e], b = t[(e + 1) % 3];
      edges.push_back({std::min(a, b), std::max(a, b)});
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  grid.edges = std::move(edges);

  grid.vertex_neighbors.assign(n, {});
  for (const auto& e : grid.edges) {
    grid.vertex_neighbors[e[0]].push_back(e[1]);
    grid.vertex_neighbors[e[1]].push_back(e[0]);
  }
  for (auto& nb : grid.vertex_neighbors) std::sort(nb.begin(), nb.end());

  grid.vertex_triangles.assign(n, {});
  for (int t = 0; t < grid.num_triangles(); ++t) {
    for (int v : grid.triangles[t]) grid.vertex_triangles[v].push_back(t);
  }
}

}  // namespace

GeodesicGrid build_base_icosahedron() {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  const double scale = 1.0 / std::sqrt(1.0 + phi * phi);

  GeodesicGrid grid;
  grid.level = 0;
  // Cyclic families (0, ±1, ±φ), (±1, ±φ, 0), (±φ, 0, ±1), plus signs first.
  for (int family = 0; family < 3; ++family) {
    for (double s1 : {1.0, -1.0}) {
      for (double s2 : {1.0, -1.0}) {
        Vec3 v;
        switch (family) {
          case 0: v = {0.0, s1, s2 * phi}; break;
          case 1: v = {s1, s2 * phi, 0.0}; break;
          default: v = {s1 * phi, 0.0, s2}; break;
        }
        grid.vertices.push_back(v * scale);
      }
    }
  }

  // Adjacent vertices are those at the minimal chord distance.
  const int n = grid.num_points();
  double min_d2 = std::numeric_limits<double>::max();
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) min_d2 = std::min(min_d2, (grid.vertices[a] - grid.vertices[b]).squaredNorm());
  auto adjacent = [&](int a, int b) {
    return std::abs((grid.vertices[a] - grid.vertices[b]).squaredNorm() - min_d2) < 1e-9;
  };
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (!adjacent(a, b)) continue;
      for (int c = b + 1; c < n; ++c) {
        if (!adjacent(a, c) || !adjacent(b, c)) continue;
        if (det3(grid.vertices[a], grid.vertices[b], grid.vertices[c]) > 0.0)
          grid.triangles.push_back({a, b, c});
        else
          grid.triangles.push_back({a, c, b});
      }
    }
  }
  finalize_topology(grid);
  return grid;
}

GeodesicGrid refine(const GeodesicGrid& grid) {
  GeodesicGrid fine;
  fine.level = grid.level + 1;
  fine.vertices = grid.vertices;
  fine.vertices.reserve(grid.vertices.size() + grid.edges.size());

  // grid.edges is sorted, so the midpoint index follows the edge rank.
  const int base = grid.num_points();
  for (const auto& e : grid.edges) {
    const Vec3 mid = 0.5 * (grid.vertices[e[0]] + grid.vertices[e[1]]);
    fine.vertices.push_back(mid / mid.norm());
  }
  auto midpoint = [&](int a, int b) {
    const std::array<int, 2> key{std::min(a, b), std::max(a, b)};
    const auto it = std::lower_bound(grid.edges.begin(), grid.edges.end(), key);
    return base + static_cast<int>(it - grid.edges.begin());
  };

  fine.triangles.reserve(grid.triangles.size() * 4);
  for (const auto& t : grid.triangles) {
    const int ab = midpoint(t[0], t[1]);
    const int bc = midpoint(t[1], t[2]);
    const int ca = midpoint(t[2], t[0]);
    fine.triangles.push_back({t[0], ab, ca});
    fine.triangles.push_back({t[1], bc, ab});
    fine.triangles.push_back({t[2], ca, bc});
    fine.triangles.push_back({ab, bc, ca});
  }
  finalize_topology(fine);
  return fine;
}

GeodesicGrid build_geodesic_grid(int k) {
  if (k < 0) throw std::invalid_argument("geodesic grid level must be non-negative");
  GeodesicGrid grid = build_base_icosahedron();
  for (int i = 0; i < k; ++i) grid = refine(grid);
  return grid;
}

GridCounts expected_counts(int k) {
  if (k < 0) throw std::invalid_argument("expected_counts: k must be non-negative");
  long pow4 = 1;
  long partial = 0;  // sum_{i<k} 4^i
  for (int i = 0; i < k; ++i) {
    partial += pow4;
    pow4 *= 4;
  }
  GridCounts c;
  c.points = 12 * pow4 - 6 * partial;
  c.edges = 3 * (c.points - 2);
  c.triangles = 2 * (c.points - 2);
  return c;
}

Vec3 barycentric_to_unit_vector(const GeodesicGrid& grid, int triangle, const BarycentricPoint& p) {
  if (triangle < 0 || triangle >= grid.num_triangles())
    throw std::out_of_range("barycentric_to_unit_vector: triangle index out of range");
  constexpr double tol = 1e-14;
  const std::array<double, 3> xi{p.xi1, p.xi2, p.xi3};
  for (double x : xi) {
    if (!(x >= -tol && x <= 1.0 + tol))
      throw std::invalid_argument("barycentric coordinate outside [0, 1]");
  }
  if (std::abs(xi[0] + xi[1] + xi[2] - 1.0) > tol)
    throw std::invalid_argument("barycentric coordinates do not sum to 1");
  const auto& t = grid.triangles[triangle];
  const Vec3 x = xi[0] * grid.vertices[t[0]] + xi[1] * grid.vertices[t[1]] + xi[2] * grid.vertices[t[2]];
  return x / x.norm();
}

std::array<double, 3> central_barycentric(const GeodesicGrid& grid, int triangle, const Vec3& omega) {
  const auto& t = grid.triangles[triangle];
  Eigen::Matrix3d basis;
  basis.col(0) = grid.vertices[t[0]];
  basis.col(1) = grid.vertices[t[1]];
  basis.col(2) = grid.vertices[t[2]];
  const Vec3 alpha = basis.partialPivLu().solve(omega);
  const double sum = alpha.sum();
  return {alpha[0] / sum, alpha[1] / sum, alpha[2] / sum};
}

TriangleLocation locate_triangle(const GeodesicGrid& grid, const Vec3& omega, double tol) {
  for (int t = 0; t < grid.num_triangles(); ++t) {
    const auto& tri = grid.triangles[t];
    // Reject the antipodal triangle cheaply: its centroid points away.
    const Vec3 centroid = grid.vertices[tri[0]] + grid.vertices[tri[1]] + grid.vertices[tri[2]];
    if (centroid.dot(omega) <= 0.0) continue;
    const auto xi = central_barycentric(grid, t, omega);
    if (xi[0] >= -tol && xi[1] >= -tol && xi[2] >= -tol) {
      TriangleLocation loc;
      loc.triangle = t;
      std::array<double, 3> clipped{std::max(xi[0], 0.0), std::max(xi[1], 0.0), std::max(xi[2], 0.0)};
      const double s = clipped[0] + clipped[1] + clipped[2];
      loc.bary = {clipped[0] / s, clipped[1] / s, clipped[2] / s};
      return loc;
    }
  }
  throw std::runtime_error("locate_triangle: direction not covered by grid");
}

SphericalTriangleQuadrature::SphericalTriangleQuadrature(int subdivisions) : subdivisions_(subdivisions) {
  if (subdivisions < 1) throw std::invalid_argument("quadrature subdivisions must be positive");
}

int SphericalTriangleQuadrature::default_subdivisions(int level) {
  // Each sub-triangle is about the size of a level-4 triangle.
  return level >= 4 ? 1 : (1 << (4 - level));
}

void SphericalTriangleQuadrature::for_each_node(
    const GeodesicGrid& grid, int triangle, const std::array<std::array<double, 3>, 3>& corners,
    const std::function<void(const Vec3&, const std::array<double, 3>&, double)>& visit) const {
  const auto& t = grid.triangles[triangle];
  const Vec3& x1 = grid.vertices[t[0]];
  const Vec3& x2 = grid.vertices[t[1]];
  const Vec3& x3 = grid.vertices[t[2]];
  const double jac_num = det3(x1, x2, x3);

  // Area of the region in the (xi1, xi2) parameter plane.
  const double d11 = corners[1][0] - corners[0][0], d12 = corners[1][1] - corners[0][1];
  const double d21 = corners[2][0] - corners[0][0], d22 = corners[2][1] - corners[0][1];
  const int s = subdivisions_;
  const double sub_area = 0.5 * std::abs(d11 * d22 - d12 * d21) / (s * s);

  const auto& rule = triangle_rule_degree8();
  auto lattice = [&](int a, int b) {
    std::array<double, 3> q;
    for (int c = 0; c < 3; ++c)
      q[c] = corners[0][c] + (a * (corners[1][c] - corners[0][c]) + b * (corners[2][c] - corners[0][c])) / s;
    return q;
  };
  auto visit_sub = [&](const std::array<double, 3>& p0, const std::array<double, 3>& p1,
                       const std::array<double, 3>& p2) {
    for (const auto& node : rule) {
      std::array<double, 3> xi;
      for (int c = 0; c < 3; ++c) xi[c] = node.bary[0] * p0[c] + node.bary[1] * p1[c] + node.bary[2] * p2[c];
      const Vec3 p = xi[0] * x1 + xi[1] * x2 + xi[2] * x3;
      const double r = p.norm();
      const double w = node.weight * sub_area * jac_num / (r * r * r);
      visit(p / r, xi, w);
    }
  };
  for (int a = 0; a < s; ++a) {
    for (int b = 0; a + b < s; ++b) {
      visit_sub(lattice(a, b), lattice(a + 1, b), lattice(a, b + 1));
      if (a + b + 2 <= s) visit_sub(lattice(a + 1, b), lattice(a + 1, b + 1), lattice(a, b + 1));
    }
  }
}

double SphericalTriangleQuadrature::integrate_region(const GeodesicGrid& grid, int triangle,
                                                     const std::array<std::array<double, 3>, 3>& corners,
                                                     const SphereIntegrand& f) const {
  double sum = 0.0;
  for_each_node(grid, triangle, corners,
                [&](const Vec3& omega, const std::array<double, 3>& xi, double w) { sum += w * f(omega, xi); });
  return sum;
}

double SphericalTriangleQuadrature::integrate(const GeodesicGrid& grid, int triangle,
                                              const SphereIntegrand& f) const {
  static constexpr std::array<std::array<double, 3>, 3> whole{{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};
  return integrate_region(grid, triangle, whole, f);
}

double integrate_triangle(const GeodesicGrid& grid, int triangle, const SphereIntegrand& f) {
  const SphericalTriangleQuadrature quad(SphericalTriangleQuadrature::default_subdivisions(grid.level));
  return quad.integrate(grid, triangle, f);
}

double spherical_triangle_area(const GeodesicGrid& grid, int triangle) {
  const auto& t = grid.triangles[triangle];
  const Vec3& a = grid.vertices[t[0]];
  const Vec3& b = grid.vertices[t[1]];
  const Vec3& c = grid.vertices[t[2]];
  return 2.0 * std::atan2(std::abs(det3(a, b, c)), 1.0 + a.dot(b) + b.dot(c) + c.dot(a));
}

void write_grid(std::ostream& out, const GeodesicGrid& grid) {
  out << "geogrid " << grid.level << ' ' << grid.num_points() << ' ' << grid.num_edges() << ' '
      << grid.num_triangles() << '\n';
  const auto old_precision = out.precision(17);
  for (const auto& v : grid.vertices) out << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
  out.precision(old_precision);
  for (const auto& e : grid.edges) out << e[0] << ' ' << e[1] << '\n';
  for (const auto& t : grid.triangles) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

}  // namespace geotransport
