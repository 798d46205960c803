#pragma once

#include <vector>

#include <Eigen/Core>

#include "geotransport/angular_basis.hpp"

namespace geotransport {

/// Emissivity and opacities of one spatial cell (all in 1/length).
struct MediumCell {
  double eta = 0.0;
  double kappa_a = 0.0;
  double kappa_s = 0.0;
};

/// Piecewise-constant medium on an nx x ny cell grid, cell (i, j) at i + nx j.
class MediumMap {
 public:
  MediumMap() = default;
  MediumMap(int nx, int ny, MediumCell fill = {});

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  const MediumCell& at(int i, int j) const { return cells_[i + nx_ * j]; }
  /// Throws std::invalid_argument on negative coefficients.
  void set(int i, int j, const MediumCell& cell);
  const std::vector<MediumCell>& cells() const { return cells_; }
  bool is_vacuum() const;

 private:
  int nx_ = 0, ny_ = 0;
  std::vector<MediumCell> cells_;
};

/// Galerkin projection of  eta - kappa_a F + kappa_s (E/4pi - F):
///   e = eta u,   P F = (kappa_s/4pi) u (V.F) - (kappa_a + kappa_s) F,
/// with V_A the basis integrals and u = M-bar^-1 V the coefficients of the
/// constant function 1.
class SourceOperator {
 public:
  SourceOperator(const MediumCell& medium, Eigen::VectorXd unit, Eigen::VectorXd integrals);

  const MediumCell& medium() const { return medium_; }
  Eigen::VectorXd emission() const { return medium_.eta * unit_; }
  /// P F
  Eigen::VectorXd apply(const Eigen::VectorXd& f) const;
  /// Dense P, for inspection.
  Eigen::MatrixXd matrix() const;

 private:
  MediumCell medium_;
  Eigen::VectorXd unit_;       // u
  Eigen::VectorXd integrals_;  // V
};

/// u = M-bar^-1 V, the expansion of the constant function 1.
Eigen::VectorXd unit_coefficients(const AngularMatrices& matrices, const AngularBasis& basis);

SourceOperator build_source_operator(const MediumCell& medium, const AngularBasis& basis,
                                     const AngularMatrices& matrices);

/// E = sum_A F^A V_A.
double compute_energy(const Eigen::VectorXd& f, const AngularBasis& basis);

struct RadiationMoments {
  Eigen::Vector3d flux;
  Eigen::Matrix3d pressure;
};

RadiationMoments compute_flux_and_pressure(const Eigen::VectorXd& f, const AngularBasis& basis);

}  // namespace geotransport
