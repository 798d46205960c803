#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "geotransport/angular_basis.hpp"
#include "geotransport/transport_core.hpp"

namespace geotransport {

/// Cell-centred Cartesian grid. Cell (i, j) is centred at
/// (x0 + (i + 1/2) dx, y0 + (j + 1/2) dy); cells (2m, 2m+1) form element m
/// along each axis, so nx and ny must be even.
struct SpatialGrid2D {
  int nx = 0, ny = 0;
  double dx = 0.0, dy = 0.0;
  double x0 = 0.0, y0 = 0.0;

  /// Grid covering [x_lo, x_hi] x [y_lo, y_hi]. Throws on odd or non-positive counts.
  static SpatialGrid2D covering(double x_lo, double x_hi, double y_lo, double y_hi, int nx, int ny);

  void validate() const;
  int cells() const { return nx * ny; }
  int index(int i, int j) const { return i + nx * j; }
  double center_x(int i) const { return x0 + (i + 0.5) * dx; }
  double center_y(int j) const { return y0 + (j + 0.5) * dy; }
  bool operator==(const SpatialGrid2D&) const = default;
};

/// Coefficients F^A at cell centres: column index(i, j), row A.
struct FieldState {
  SpatialGrid2D grid;
  Eigen::MatrixXd coeffs;
  double time = 0.0;
};

enum class Side { x_lo = 0, x_hi = 1, y_lo = 2, y_hi = 3 };

enum class BoundaryKind { zero_gradient, periodic, inflow };

/// Ghost cells whose tangential centre coordinate lies in [lo, hi] take `state`.
struct InflowSegment {
  double lo = 0.0, hi = 0.0;
  Eigen::VectorXd state;
};

struct SideCondition {
  BoundaryKind kind = BoundaryKind::zero_gradient;
  std::vector<InflowSegment> segments;  // inflow only; uncovered ghosts are zero
};

struct BoundaryCondition {
  std::array<SideCondition, 4> sides;

  static BoundaryCondition uniform(BoundaryKind kind);
  SideCondition& operator[](Side s) { return sides[static_cast<int>(s)]; }
  const SideCondition& operator[](Side s) const { return sides[static_cast<int>(s)]; }
  /// Periodic sides must come in opposite pairs; inflow states must have size n.
  void validate(int n) const;
};

/// Raised when the state handed to the spatial operator is not finite.
class NonFiniteError : public std::runtime_error {
 public:
  NonFiniteError(int i, int j, int a);
  int i, j, a;
};

/// The 1-D element edge values from the two cell-centre values of an element:
/// (3/2 f_i - 1/2 f_{i+1},  -1/2 f_i + 3/2 f_{i+1}).
std::pair<double, double> edge_from_centers(double f_i, double f_ip1);

enum class SlopeLimiter { none, minmod, sminmod2, modminmod2 };
std::string_view to_string(SlopeLimiter mode);
SlopeLimiter parse_slope_limiter(std::string_view name);

double minmod(double a, double b, double c);
/// Sawtooth-free double minmod: s|a| if |a| < 2 min(|b|, |c|), else s min(|b|, |c|),
/// s the common sign (0 if the signs disagree).
double sminmod2(double a, double b, double c);
double modminmod2(double a, double b, double c);
double limiter_function(SlopeLimiter mode, double a, double b, double c);

/// Angular operators the spatial scheme needs, per in-plane direction.
struct TransportOperators {
  std::array<Eigen::MatrixXd, 2> advection;    // S-tilde^x, S-tilde^y
  std::array<Eigen::MatrixXd, 2> dissipation;  // S-hat^x, S-hat^y
  Eigen::VectorXd unit;                        // u = M-bar^-1 V
  Eigen::VectorXd integrals;                   // V

  static TransportOperators from(const AngularBasis& basis, const AngularMatrices& matrices);
  int size() const { return static_cast<int>(unit.size()); }
};

/// Semi-discrete right-hand side of the 2-D DG scheme plus its slope limiter.
///
/// Per element and direction the cell-centre fluxes are
///   (3/2 F- - Fbar - 1/2 F+)/Dx,  (1/2 F- + Fbar - 3/2 F+)/Dx
/// with F-, F+ the Riemann fluxes 1/2[S(F_L + F_R) - S-hat(F_R - F_L)] at the
/// element edges and Fbar the element-average flux. Directions are added
/// dimension by dimension. Holds scratch buffers: one instance per thread.
class DGOperator {
 public:
  DGOperator(const SpatialGrid2D& grid, TransportOperators ops, const MediumMap& medium, BoundaryCondition bc);

  const SpatialGrid2D& grid() const { return grid_; }
  int size() const { return n_; }

  /// out = dF/dt. Throws NonFiniteError if f has a non-finite entry.
  void rhs(const Eigen::MatrixXd& f, Eigen::MatrixXd& out) const;
  Eigen::MatrixXd rhs(const Eigen::MatrixXd& f) const;

  /// Limit slopes in x, then in y. Element averages are unchanged.
  void slope_limit(Eigen::MatrixXd& f, SlopeLimiter mode) const;

 private:
  void fill_padded(const Eigen::MatrixXd& f) const;
  template <class Limiter>
  void limit_slopes(Eigen::MatrixXd& f, Limiter limiter) const;
  void directional_flux(int dir, Eigen::MatrixXd& out) const;
  void add_sources(const Eigen::MatrixXd& f, Eigen::MatrixXd& out) const;
  int padded_index(int i, int j) const { return (i + 2) + (grid_.nx + 4) * (j + 2); }

  SpatialGrid2D grid_;
  int n_;
  std::array<Eigen::SparseMatrix<double>, 2> advection_t_;  // transposed S-tilde
  std::array<Eigen::MatrixXd, 2> dissipation_;
  std::array<bool, 2> diagonal_dissipation_{};
  Eigen::VectorXd unit_, integrals_;
  std::vector<MediumCell> medium_;
  bool vacuum_ = true;
  BoundaryCondition bc_;

  struct Scratch {
    Eigen::MatrixXd padded, transposed, advected_t, advected, sum, jump, damped;
  };
  mutable Eigen::MatrixXd padded_;
  mutable std::vector<Scratch> scratch_;  // one per thread
};

}  // namespace geotransport
