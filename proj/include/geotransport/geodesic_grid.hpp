#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

namespace geotransport {

using Vec3 = Eigen::Vector3d;

/// Refined icosahedral triangulation of the unit sphere.
///
/// Vertex order is deterministic: the 12 icosahedron vertices first, then
/// at each refinement the parent vertices followed by one midpoint per
/// parent edge in sorted (min, max) edge order. Triangles are oriented
/// so that det(x1, x2, x3) > 0.
struct GeodesicGrid {
  int level = 0;
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 2>> edges;      // sorted, first < second
  std::vector<std::array<int, 3>> triangles;  // outward orientation
  std::vector<std::vector<int>> vertex_neighbors;
  std::vector<std::vector<int>> vertex_triangles;

  int num_points() const { return static_cast<int>(vertices.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
};

struct GridCounts {
  long points = 0;
  long edges = 0;
  long triangles = 0;
  bool operator==(const GridCounts&) const = default;
};

/// Areal coordinates on a triangle; each in [0, 1], summing to 1.
struct BarycentricPoint {
  double xi1 = 0.0;
  double xi2 = 0.0;
  double xi3 = 0.0;
};

GeodesicGrid build_base_icosahedron();
GeodesicGrid refine(const GeodesicGrid& grid);
/// Base icosahedron refined k times.
GeodesicGrid build_geodesic_grid(int k);

/// Closed-form point/edge/triangle counts after k refinements.
GridCounts expected_counts(int k);

/// Planar combination xi1*x1 + xi2*x2 + xi3*x3 projected onto the sphere.
/// Throws std::invalid_argument if p is not on the simplex.
Vec3 barycentric_to_unit_vector(const GeodesicGrid& grid, int triangle, const BarycentricPoint& p);

/// Central-projection barycentric coordinates of a direction with respect
/// to a triangle: omega = s * (xi1 x1 + xi2 x2 + xi3 x3), s > 0.
/// Coordinates may be negative when omega lies outside the triangle.
std::array<double, 3> central_barycentric(const GeodesicGrid& grid, int triangle, const Vec3& omega);

/// Lowest-index triangle whose central-projection coordinates are all
/// >= -tol. Returns the triangle and its (renormalized) coordinates.
struct TriangleLocation {
  int triangle = -1;
  std::array<double, 3> bary{};
};
TriangleLocation locate_triangle(const GeodesicGrid& grid, const Vec3& omega, double tol = 1e-13);

/// Integrand evaluated at a quadrature node: direction on the sphere and the
/// node's barycentric coordinates in the parent triangle.
using SphereIntegrand = std::function<double(const Vec3& omega, const std::array<double, 3>& bary)>;

/// Composite quadrature for spherical triangles: the planar triangle is
/// split into subdivisions^2 congruent pieces, each integrated with the
/// degree-8 rule and the exact Jacobian of the central projection.
class SphericalTriangleQuadrature {
 public:
  explicit SphericalTriangleQuadrature(int subdivisions);
  /// Subdivision count giving roughly uniform accuracy for a level-k grid.
  static int default_subdivisions(int level);

  int subdivisions() const { return subdivisions_; }

  /// Integral over the whole spherical triangle.
  double integrate(const GeodesicGrid& grid, int triangle, const SphereIntegrand& f) const;

  /// Integral over the sub-region of the spherical triangle whose planar
  /// pre-image is the triangle with the given barycentric corners.
  double integrate_region(const GeodesicGrid& grid, int triangle,
                          const std::array<std::array<double, 3>, 3>& corners,
                          const SphereIntegrand& f) const;

  /// Visit every node of the composite rule over a barycentric region;
  /// the callback receives (omega, bary, weight) with the weight already
  /// including the area element dOmega.
  void for_each_node(const GeodesicGrid& grid, int triangle,
                     const std::array<std::array<double, 3>, 3>& corners,
                     const std::function<void(const Vec3&, const std::array<double, 3>&, double)>& visit) const;

 private:
  int subdivisions_;
};

/// Integral of f over one spherical triangle with the default subdivision
/// for the grid's level.
double integrate_triangle(const GeodesicGrid& grid, int triangle, const SphereIntegrand& f);

/// Spherical-excess area of a triangle (Van Oosterom-Strackee formula).
double spherical_triangle_area(const GeodesicGrid& grid, int triangle);

/// Text export: header `geogrid k N_points N_edges N_triangles`, then
/// vertices (17 significant digits), edges, triangles; 0-based indices.
void write_grid(std::ostream& out, const GeodesicGrid& grid);

}  // namespace geotransport
