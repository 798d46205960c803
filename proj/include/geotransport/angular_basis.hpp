#pragma once

#include <array>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "geotransport/geodesic_grid.hpp"

namespace geotransport {

enum class BasisKind { femn, sn, fpn };

std::string_view to_string(BasisKind kind);
/// Accepts "femn", "sn", "fpn"; throws std::invalid_argument otherwise.
BasisKind parse_basis_kind(std::string_view name);

inline constexpr double kDefaultDissipation = 1.0 / std::numbers::sqrt3;

/// Angular basis {Psi_A} together with its moments.
///
/// FEMN: continuous piecewise-linear hat functions on a geodesic grid.
/// SN: piecewise-constant "honeycomb" cells around each grid vertex.
/// FPN: real spherical harmonics up to l_max.
class AngularBasis {
 public:
  static AngularBasis femn(int k);
  static AngularBasis sn(int k);
  static AngularBasis fpn(int l_max);
  static AngularBasis make(BasisKind kind, int resolution);

  BasisKind kind() const { return kind_; }
  /// Number of basis functions N.
  int size() const { return size_; }
  /// Refinement level k (FEMN/SN) or l_max (FPN).
  int resolution() const { return resolution_; }
  /// Geodesic grid; null for FPN.
  const GeodesicGrid* grid() const { return grid_.get(); }
  std::shared_ptr<const GeodesicGrid> shared_grid() const { return grid_; }

  /// V_A = integral of Psi_A over the sphere.
  const Eigen::VectorXd& basis_integrals() const { return integrals_; }
  /// Row i holds the integral of Omega_i Psi_A.
  const Eigen::Matrix<double, 3, Eigen::Dynamic>& first_moments() const { return first_; }
  /// Rows xx, yy, zz, xy, xz, yz of the integral of Omega_i Omega_j Psi_A.
  const Eigen::Matrix<double, 6, Eigen::Dynamic>& second_moments() const { return second_; }

  /// Psi_A(omega). omega must be a unit vector.
  double eval(int a, const Vec3& omega) const;

  /// Coefficients of the angle-independent distribution with energy density E.
  Eigen::VectorXd isotropic(double energy) const;

  /// Quadrature nodes with the basis functions that are non-zero there.
  /// For FEMN/SN the node lies in one triangle; `indices` names the vertices
  /// and `values` their basis values. For FPN all N harmonics are listed.
  struct NodeVisitor {
    virtual ~NodeVisitor() = default;
    virtual void visit(const Vec3& omega, double weight, std::span<const int> indices,
                       std::span<const double> values) = 0;
  };
  void for_each_node(NodeVisitor& visitor) const;

 private:
  AngularBasis(BasisKind kind, int resolution, std::shared_ptr<const GeodesicGrid> grid);
  void compute_moments();

  BasisKind kind_;
  int resolution_ = 0;
  int size_ = 0;
  std::shared_ptr<const GeodesicGrid> grid_;
  Eigen::VectorXd integrals_;
  Eigen::Matrix<double, 3, Eigen::Dynamic> first_;
  Eigen::Matrix<double, 6, Eigen::Dynamic> second_;
};

/// Hat function of vertex a: 2 xi1 + xi2 + xi3 - 1 in the containing
/// triangle (xi1 belonging to a), zero if a is not one of its vertices.
double fem_basis_eval(const GeodesicGrid& grid, int a, const Vec3& omega);

/// Indicator of the honeycomb cell of vertex a. Inside a triangle (a, b, c)
/// in cyclic order the cell is xi_a >= xi_b and xi_a > xi_c; a three-way tie
/// goes to the lowest vertex index.
double sn_basis_eval(const GeodesicGrid& grid, int a, const Vec3& omega);

/// Vertex whose honeycomb cell contains omega.
int sn_owner(const GeodesicGrid& grid, const Vec3& omega);

/// Right/left eigenvectors and real eigenvalues: A = R diag(values) L, L R = I.
struct EigenFactorization {
  Eigen::MatrixXd right;
  Eigen::VectorXd values;
  Eigen::MatrixXd left;
};

/// Angle-space operators of the semi-discrete system.
struct AngularMatrices {
  BasisKind kind = BasisKind::femn;
  int size = 0;
  int resolution = 0;
  double dissipation = kDefaultDissipation;  // v

  Eigen::MatrixXd mass;          // M, consistent
  Eigen::VectorXd lumped_mass;   // diagonal of M-bar
  std::array<Eigen::MatrixXd, 3> stiffness;    // S^i
  std::array<Eigen::MatrixXd, 3> advection;    // S-tilde^i = M-bar^-1 S^i
  std::array<Eigen::MatrixXd, 3> dissipation_matrix;  // S-hat^i
  std::array<EigenFactorization, 3> eigen;

  /// Largest |X - X^T| entry over M and S^i before symmetrization.
  double assembly_asymmetry = 0.0;
};

/// Assemble mass, stiffness, advection and dissipation matrices.
///
/// The eigen-factorization of M-bar^-1 S uses the similarity with the
/// symmetric matrix M-bar^-1/2 S M-bar^-1/2, so eigenvalues are real and
/// L = R^-1 holds to rounding. Throws std::runtime_error if a lumped mass
/// entry is not positive.
AngularMatrices assemble_matrices(const AngularBasis& basis, double dissipation = kDefaultDissipation);

/// R diag(max(v, |lambda|)) L.
Eigen::MatrixXd dissipation_from_factorization(const EigenFactorization& eig, double v);

}  // namespace geotransport
