#pragma once

#include <memory>
#include <string_view>

#include <Eigen/Core>

#include "geotransport/angular_basis.hpp"
#include "geotransport/dg_solver.hpp"
#include "geotransport/positivity.hpp"
#include "geotransport/time_integrator.hpp"
#include "geotransport/transport_core.hpp"

namespace geotransport {

enum class Positivity { none, clip, filter };
std::string_view to_string(Positivity p);
Positivity parse_positivity(std::string_view name);

struct SolverOptions {
  SlopeLimiter slope = SlopeLimiter::none;
  Positivity positivity = Positivity::none;
  FilterSpec filter;  // used when positivity == filter
};

struct StepDiagnostics {
  long step = 0;
  double time = 0.0;
  double indicator = 0.0;       // fraction of negative coefficients before the final clip
  double clipped_energy = 0.0;  // summed over both stages
  long fallback_cells = 0;      // zeroed or isotropized cells
};

/// Full discretization: angular matrices, DG operator, limiters and RK2.
class TransportSolver {
 public:
  /// Throws std::invalid_argument for clip with FPN or filter without FPN.
  TransportSolver(const AngularBasis& basis, const AngularMatrices& matrices, const SpatialGrid2D& grid,
                  const MediumMap& medium, BoundaryCondition bc, SolverOptions options);

  /// Apply the post-processing hooks once to an initial state.
  void prepare(FieldState& state, double dt);
  StepDiagnostics step(FieldState& state, double dt);

  const DGOperator& spatial() const { return op_; }
  const AngularBasis& basis() const { return basis_; }

  /// E per cell (length nx * ny).
  Eigen::VectorXd energy(const FieldState& state) const;

 private:
  void post_process(Eigen::MatrixXd& f, double dt, StepDiagnostics* diag) const;

  const AngularBasis& basis_;
  SolverOptions options_;
  DGOperator op_;
  std::unique_ptr<ClipLimiter> clip_;
  Rk2Stepper stepper_;
  long steps_ = 0;
};

/// E per cell of a coefficient array.
Eigen::VectorXd energy_field(const Eigen::MatrixXd& coeffs, const AngularBasis& basis);

}  // namespace geotransport
