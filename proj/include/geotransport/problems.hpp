#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "geotransport/angular_basis.hpp"
#include "geotransport/dg_solver.hpp"
#include "geotransport/transport_core.hpp"

namespace geotransport {

enum class Beams { both, left, right };
Beams parse_beams(std::string_view name);

/// Overrides of the published default parameters.
struct ProblemOptions {
  double scale = 1.0;             // multiplies cell counts, divides the step count
  std::optional<int> cells;       // nx = ny, overrides scale
  std::optional<double> dt;
  std::optional<double> t_end;
  bool lattice_text_variant = false;  // background kappa_s = 10 instead of 1
  Beams beams = Beams::both;
  double beam_width = 0.105;
};

struct Problem {
  std::string name;
  SpatialGrid2D grid;
  MediumMap medium;
  BoundaryCondition bc;
  Eigen::MatrixXd initial;  // N x cells
  double dt = 0.0;
  double t_end = 0.0;
  SlopeLimiter slope = SlopeLimiter::minmod;
  double sigma_eff = 0.0;
  bool has_oracle = false;
};

/// line_source, searchlight, lattice or cylinder.
Problem make_problem(std::string_view name, const AngularBasis& basis, const ProblemOptions& options = {});
const std::vector<std::string>& problem_names();

// Line source ---------------------------------------------------------------

inline constexpr double kLineSourceWidth = 0.03;   // omega
inline constexpr double kLineSourceFloor = 1e-4;   // floor of F

/// Green's function of free streaming for a unit line pulse:
/// H(t - r) / (2 pi t sqrt(t^2 - r^2)). Throws for t <= 0.
double line_source_kernel(double t, double r);

/// Energy density of the line source at time t: the kernel convolved with
/// the initial E = 4 pi max(g/(4 pi), floor), g the unit 2-D Gaussian of width
/// omega. The uniform floor streams unchanged; the excess is convolved
/// in polar coordinates with u = sqrt(t^2 - r^2) removing the singularity.
class LineSourceOracle {
 public:
  explicit LineSourceOracle(double omega = kLineSourceWidth, double floor_f = kLineSourceFloor);
  double initial_energy(double rho) const;
  double energy(double t, double rho) const;
  /// Integral over the plane of the part of E above the floor.
  double excess_mass() const;
  double support_radius() const { return support_; }

 private:
  double excess(double s) const;
  double omega_, floor_e_, support_;
};

// Cylinder -------------------------------------------------------------------

/// Length of the backward ray from (x, y) along -(cos phi, sin phi) inside the unit disk.
double disk_chord(double x, double y, double phi);

/// Integral over theta in [0, pi/2] of exp(-a / sin theta) sin theta.
double bickley_like(double a);

/// Steady-state E for a unit cylinder with emissivity eta and absorption kappa
/// (vacuum outside): the angular integral of (eta/kappa)(1 - exp(-kappa s)).
double cylinder_steady_energy(double x, double y, double eta = 10.0, double kappa = 10.0);

/// Oracle E per cell, or throws std::invalid_argument when the problem has none.
Eigen::VectorXd oracle_energy(const Problem& problem, double t);

/// Mean absolute difference. Throws on size mismatch.
double l1_error(const Eigen::VectorXd& numerical, const Eigen::VectorXd& exact);

/// Index of the grid vertex closest to omega.
int nearest_vertex(const GeodesicGrid& grid, const Vec3& omega);

/// Searchlight beam directions (+-1, phi, 0)/|.|, icosahedron vertices.
Vec3 searchlight_direction(bool left);
/// Angular state of a unit beam along omega in the given basis.
Eigen::VectorXd beam_state(const AngularBasis& basis, const Vec3& omega);

}  // namespace geotransport
