#include "geotransport/positivity.hpp"

#include <cmath>
#include <stdexcept>

#include "geotransport/spherical_harmonics.hpp"
#include "geotransport/transport_core.hpp"

namespace geotransport {

ClipLimiter::ClipLimiter(const AngularBasis& basis, const AngularMatrices& matrices)
    : ClipLimiter(matrices.mass.colwise().sum().transpose(), unit_coefficients(matrices, basis)) {}

ClipLimiter::ClipLimiter(Eigen::VectorXd weights, Eigen::VectorXd isotropic)
    : weights_(std::move(weights)), isotropic_(std::move(isotropic)) {
  if (weights_.size() != isotropic_.size()) throw std::invalid_argument("clip limiter size mismatch");
  if (!(weights_.dot(isotropic_) > 0.0)) throw std::invalid_argument("isotropic state must carry positive energy");
}

ClipOutcome ClipLimiter::apply(Eigen::Ref<Eigen::VectorXd> f) const {
  if ((f.array() >= 0.0).all()) return ClipOutcome::unchanged;
  const double energy = weights_.dot(f);
  const double kept = weights_.dot(f.cwiseMax(0.0));
  if (!(energy > 0.0)) {
    f.setZero();
    return ClipOutcome::zeroed;
  }
  if (!(kept > 0.0)) {
    f = (energy / weights_.dot(isotropic_)) * isotropic_;
    return ClipOutcome::isotropized;
  }
  const double theta = energy / kept;
  for (Eigen::Index a = 0; a < f.size(); ++a) f[a] = f[a] > 0.0 ? theta * f[a] : 0.0;
  return ClipOutcome::rescaled;
}

void ClipLimiter::apply(Eigen::MatrixXd& f, Stats& stats) const {
  for (Eigen::Index c = 0; c < f.cols(); ++c) {
    auto col = f.col(c);
    if ((col.array() >= 0.0).all()) continue;
    stats.clipped_energy -= weights_.dot(col.cwiseMin(0.0));
    switch (apply(Eigen::Ref<Eigen::VectorXd>(col))) {
      case ClipOutcome::rescaled: ++stats.rescaled; break;
      case ClipOutcome::isotropized: ++stats.isotropized; break;
      case ClipOutcome::zeroed: ++stats.zeroed; break;
      case ClipOutcome::unchanged: break;
    }
  }
}

Eigen::VectorXd clip_limiter(const Eigen::VectorXd& f, const AngularBasis& basis, const AngularMatrices& matrices) {
  Eigen::VectorXd out = f;
  ClipLimiter(basis, matrices).apply(out);
  return out;
}

double lanczos_sigma(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

void FilterSpec::validate() const {
  if (!(sigma_eff >= 0.0)) throw std::invalid_argument("effective opacity must be non-negative");
  if (l_max < 0) throw std::invalid_argument("l_max must be non-negative");
  if (strength && !(*strength >= 0.0)) throw std::invalid_argument("filter strength must be non-negative");
}

double FilterSpec::strength_for(double dt) const {
  validate();
  if (strength) return *strength;
  if (l_max == 0 || sigma_eff == 0.0) return 0.0;
  return -dt * sigma_eff / std::log(lanczos_sigma(static_cast<double>(l_max) / (l_max + 1)));
}

Eigen::VectorXd lanczos_factors(const FilterSpec& spec, double dt) {
  const double s = spec.strength_for(dt);
  Eigen::VectorXd out(sh_count(spec.l_max));
  for (int idx = 0; idx < out.size(); ++idx) {
    const int l = sh_mode(idx).l;
    out[idx] = s == 0.0 ? 1.0 : std::pow(lanczos_sigma(static_cast<double>(l) / (spec.l_max + 1)), s);
  }
  return out;
}

void lanczos_filter(Eigen::MatrixXd& f, const FilterSpec& spec, double dt) {
  const Eigen::VectorXd factors = lanczos_factors(spec, dt);
  if (f.rows() != factors.size()) throw std::invalid_argument("filter size does not match the coefficient count");
  f = factors.asDiagonal() * f;
}

Eigen::VectorXd lanczos_filter(const Eigen::VectorXd& f, const FilterSpec& spec, double dt) {
  Eigen::MatrixXd m = f;
  lanczos_filter(m, spec, dt);
  return m.col(0);
}

double limiter_indicator(const Eigen::MatrixXd& f) {
  if (f.size() == 0) return 0.0;
  return static_cast<double>((f.array() < 0.0).count()) / static_cast<double>(f.size());
}

}  // namespace geotransport
