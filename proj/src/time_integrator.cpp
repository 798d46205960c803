#include "geotransport/time_integrator.hpp"

#include <sstream>

#include "geotransport/dg_solver.hpp"

namespace geotransport {

namespace {

std::string describe(long step, double time, const std::string& detail) {
  std::ostringstream os;
  os << "numerical blow-up at step " << step << ", t = " << time << ": " << detail;
  return os.str();
}

}  // namespace

NumericalBlowup::NumericalBlowup(long step_, double time_, const std::string& detail)
    : std::runtime_error(describe(step_, time_, detail)), step(step_), time(time_) {}

void Rk2Stepper::step(Eigen::MatrixXd& f, double dt, const RhsFunction& rhs, const PostProcess& post,
                      long step_index, double time, const std::function<void(const Eigen::MatrixXd&)>& before_post) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  try {
    rhs(f, rate_);
    half_ = f + 0.5 * dt * rate_;
    if (post) post(half_);
    if (!half_.allFinite()) throw NumericalBlowup(step_index, time + 0.5 * dt, "midpoint stage is not finite");
    rhs(half_, rate_);
  } catch (const NonFiniteError& e) {
    throw NumericalBlowup(step_index, time, e.what());
  }
  f += dt * rate_;
  if (!f.allFinite()) throw NumericalBlowup(step_index, time + dt, "updated state is not finite");
  if (before_post) before_post(f);
  if (post) post(f);
}

void step_rk2(Eigen::MatrixXd& f, double dt, const RhsFunction& rhs, const PostProcess& post) {
  Rk2Stepper stepper;
  stepper.step(f, dt, rhs, post);
}

}  // namespace geotransport
