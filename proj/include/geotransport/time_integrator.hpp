#pragma once

#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace geotransport {

using RhsFunction = std::function<void(const Eigen::MatrixXd& f, Eigen::MatrixXd& dfdt)>;
using PostProcess = std::function<void(Eigen::MatrixXd& f)>;

/// A stage produced a non-finite state.
class NumericalBlowup : public std::runtime_error {
 public:
  NumericalBlowup(long step, double time, const std::string& detail);
  long step;
  double time;
};

/// Midpoint Runge-Kutta:
///   F_half = post(F + dt/2 R(F)),  F_next = post(F + dt R(F_half)).
/// `before_post`, if set, sees F + dt R(F_half) before the final post-processing
/// (the limiter indicator is measured there). The incoming f is assumed to be
/// post-processed already.
class Rk2Stepper {
 public:
  void step(Eigen::MatrixXd& f, double dt, const RhsFunction& rhs, const PostProcess& post, long step_index = 0,
            double time = 0.0, const std::function<void(const Eigen::MatrixXd&)>& before_post = {});

 private:
  Eigen::MatrixXd rate_, half_;
};

void step_rk2(Eigen::MatrixXd& f, double dt, const RhsFunction& rhs, const PostProcess& post = {});

}  // namespace geotransport
