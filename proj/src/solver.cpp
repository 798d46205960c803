#include "geotransport/solver.hpp"

#include <stdexcept>
#include <string>

namespace geotransport {

std::string_view to_string(Positivity p) {
  switch (p) {
    case Positivity::none: return "none";
    case Positivity::clip: return "clip";
    case Positivity::filter: return "filter";
  }
  return "?";
}

Positivity parse_positivity(std::string_view name) {
  for (auto p : {Positivity::none, Positivity::clip, Positivity::filter})
    if (name == to_string(p)) return p;
  throw std::invalid_argument("unknown positivity treatment '" + std::string(name) + "'");
}

TransportSolver::TransportSolver(const AngularBasis& basis, const AngularMatrices& matrices,
                                 const SpatialGrid2D& grid, const MediumMap& medium, BoundaryCondition bc,
                                 SolverOptions options)
    : basis_(basis), options_(options), op_(grid, TransportOperators::from(basis, matrices), medium, std::move(bc)) {
  const bool fpn = basis.kind() == BasisKind::fpn;
  if (options_.positivity == Positivity::clip) {
    if (fpn) throw std::invalid_argument("the clipping limiter applies to femn/sn only");
    clip_ = std::make_unique<ClipLimiter>(basis, matrices);
  }
  if (options_.positivity == Positivity::filter) {
    if (!fpn) throw std::invalid_argument("the Lanczos filter applies to fpn only");
    options_.filter.l_max = basis.resolution();
    options_.filter.validate();
  }
}

void TransportSolver::post_process(Eigen::MatrixXd& f, double dt, StepDiagnostics* diag) const {
  op_.slope_limit(f, options_.slope);
  if (clip_) {
    ClipLimiter::Stats stats;
    clip_->apply(f, stats);
    if (diag) {
      diag->clipped_energy += stats.clipped_energy;
      diag->fallback_cells += stats.zeroed + stats.isotropized;
    }
  } else if (options_.positivity == Positivity::filter) {
    lanczos_filter(f, options_.filter, dt);
  }
}

void TransportSolver::prepare(FieldState& state, double dt) { post_process(state.coeffs, dt, nullptr); }

StepDiagnostics TransportSolver::step(FieldState& state, double dt) {
  StepDiagnostics diag;
  diag.step = ++steps_;
  const RhsFunction rhs = [this](const Eigen::MatrixXd& f, Eigen::MatrixXd& out) { op_.rhs(f, out); };
  const PostProcess post = [&](Eigen::MatrixXd& f) { post_process(f, dt, &diag); };
  stepper_.step(state.coeffs, dt, rhs, post, diag.step, state.time,
                [&](const Eigen::MatrixXd& f) { diag.indicator = limiter_indicator(f); });
  state.time += dt;
  diag.time = state.time;
  return diag;
}

Eigen::VectorXd TransportSolver::energy(const FieldState& state) const { return energy_field(state.coeffs, basis_); }

Eigen::VectorXd energy_field(const Eigen::MatrixXd& coeffs, const AngularBasis& basis) {
  return coeffs.transpose() * basis.basis_integrals();
}

}  // namespace geotransport
