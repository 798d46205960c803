#include "geotransport/transport_core.hpp"

#include <algorithm>
#include <numbers>
#include <stdexcept>

namespace geotransport {

namespace {

void validate(const MediumCell& c) {
  if (!(c.eta >= 0.0) || !(c.kappa_a >= 0.0) || !(c.kappa_s >= 0.0))
    throw std::invalid_argument("medium coefficients must be non-negative");
}

}  // namespace

MediumMap::MediumMap(int nx, int ny, MediumCell fill) : nx_(nx), ny_(ny) {
  if (nx <= 0 || ny <= 0) throw std::invalid_argument("medium map needs positive dimensions");
  validate(fill);
  cells_.assign(static_cast<std::size_t>(nx) * ny, fill);
}

void MediumMap::set(int i, int j, const MediumCell& cell) {
  validate(cell);
  cells_.at(static_cast<std::size_t>(i) + static_cast<std::size_t>(nx_) * j) = cell;
}

bool MediumMap::is_vacuum() const {
  return std::all_of(cells_.begin(), cells_.end(),
                     [](const MediumCell& c) { return c.eta == 0.0 && c.kappa_a == 0.0 && c.kappa_s == 0.0; });
}

SourceOperator::SourceOperator(const MediumCell& medium, Eigen::VectorXd unit, Eigen::VectorXd integrals)
    : medium_(medium), unit_(std::move(unit)), integrals_(std::move(integrals)) {
  validate(medium_);
  if (unit_.size() != integrals_.size()) throw std::invalid_argument("source operator size mismatch");
}

Eigen::VectorXd SourceOperator::apply(const Eigen::VectorXd& f) const {
  const double scatter = medium_.kappa_s / (4.0 * std::numbers::pi) * integrals_.dot(f);
  return scatter * unit_ - (medium_.kappa_a + medium_.kappa_s) * f;
}

Eigen::MatrixXd SourceOperator::matrix() const {
  Eigen::MatrixXd p = medium_.kappa_s / (4.0 * std::numbers::pi) * unit_ * integrals_.transpose();
  p.diagonal().array() -= medium_.kappa_a + medium_.kappa_s;
  return p;
}

Eigen::VectorXd unit_coefficients(const AngularMatrices& matrices, const AngularBasis& basis) {
  return basis.basis_integrals().cwiseQuotient(matrices.lumped_mass);
}

SourceOperator build_source_operator(const MediumCell& medium, const AngularBasis& basis,
                                     const AngularMatrices& matrices) {
  return SourceOperator(medium, unit_coefficients(matrices, basis), basis.basis_integrals());
}

double compute_energy(const Eigen::VectorXd& f, const AngularBasis& basis) {
  return basis.basis_integrals().dot(f);
}

RadiationMoments compute_flux_and_pressure(const Eigen::VectorXd& f, const AngularBasis& basis) {
  RadiationMoments out;
  out.flux = basis.first_moments() * f;
  const Eigen::Matrix<double, 6, 1> p = basis.second_moments() * f;
  out.pressure << p[0], p[3], p[4],  //
      p[3], p[1], p[5],              //
      p[4], p[5], p[2];
  return out;
}

}  // namespace geotransport
