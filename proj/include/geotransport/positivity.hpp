#pragma once

#include <optional>

#include <Eigen/Core>

#include "geotransport/angular_basis.hpp"

namespace geotransport {

enum class ClipOutcome { unchanged, rescaled, isotropized, zeroed };

/// Clipping limiter: negative coefficients go to zero, positive ones are
/// scaled by theta = sum_AB M_AB F^A / sum_AB M_AB max(F^A, 0), which keeps
/// E = sum_AB M_AB F^A (consistent mass) point-wise.
///
/// Fallbacks: a cell with non-positive energy is zeroed; a cell with positive
/// energy but no positive coefficient becomes isotropic with the same energy.
class ClipLimiter {
 public:
  ClipLimiter(const AngularBasis& basis, const AngularMatrices& matrices);
  /// Explicit column-sum weights and isotropic direction, for tests.
  ClipLimiter(Eigen::VectorXd weights, Eigen::VectorXd isotropic);

  ClipOutcome apply(Eigen::Ref<Eigen::VectorXd> f) const;

  struct Stats {
    long rescaled = 0, isotropized = 0, zeroed = 0;
    double clipped_energy = 0.0;  // weighted magnitude of the removed negative parts
  };
  /// Every column of f; stats accumulate.
  void apply(Eigen::MatrixXd& f, Stats& stats) const;

  const Eigen::VectorXd& weights() const { return weights_; }

 private:
  Eigen::VectorXd weights_;    // column sums of M
  Eigen::VectorXd isotropic_;  // coefficients of the constant function 1
};

/// One-cell convenience form of the limiter.
Eigen::VectorXd clip_limiter(const Eigen::VectorXd& f, const AngularBasis& basis, const AngularMatrices& matrices);

/// Lanczos filter sin(x)/x, with value 1 at x = 0.
double lanczos_sigma(double x);

/// Strength is either given directly or derived from the effective opacity
/// so the top mode l_max decays at rate sigma_eff:
///   s = -dt sigma_eff / log sigma_L(l_max / (l_max + 1)).
struct FilterSpec {
  double sigma_eff = 0.0;
  int l_max = 0;
  std::optional<double> strength;

  void validate() const;
  double strength_for(double dt) const;
};

/// Multiplier sigma_L(l / (l_max + 1))^s of every (l, m) mode.
Eigen::VectorXd lanczos_factors(const FilterSpec& spec, double dt);

/// Filter every column of f (FPN coefficients).
void lanczos_filter(Eigen::MatrixXd& f, const FilterSpec& spec, double dt);
Eigen::VectorXd lanczos_filter(const Eigen::VectorXd& f, const FilterSpec& spec, double dt);

/// Fraction of (cell, angle) coefficients that are negative.
double limiter_indicator(const Eigen::MatrixXd& f);

}  // namespace geotransport
