#include <cmath>
#include <numbers>

#include "doctest.h"
#include "geotransport/solver.hpp"
#include "geotransport/time_integrator.hpp"

using namespace geotransport;

TEST_CASE("midpoint method on linear decay") {
  Eigen::MatrixXd f = Eigen::MatrixXd::Constant(3, 2, 2.0);
  step_rk2(f, 0.01, [](const Eigen::MatrixXd& x, Eigen::MatrixXd& o) { o = -10.0 * x; });
  CHECK((f.array() - 2.0 * 0.905).abs().maxCoeff() < 1e-15);
}

TEST_CASE("constant right-hand side is integrated exactly") {
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(1, 1);
  for (int k = 0; k < 10; ++k)
    step_rk2(f, 0.125, [](const Eigen::MatrixXd&, Eigen::MatrixXd& o) { o = Eigen::MatrixXd::Constant(1, 1, 3.0); });
  CHECK(f(0, 0) == 3.75);
}

TEST_CASE("global order two on a rotation") {
  // dF/dt = J F, J a rotation generator; exact solution is a rotation.
  auto rhs = [](const Eigen::MatrixXd& x, Eigen::MatrixXd& o) {
    o.resize(2, 1);
    o(0, 0) = -x(1, 0);
    o(1, 0) = x(0, 0);
  };
  std::vector<double> err;
  for (int n : {20, 40, 80, 160}) {
    Eigen::MatrixXd f(2, 1);
    f << 1.0, 0.0;
    for (int k = 0; k < n; ++k) step_rk2(f, 1.0 / n, rhs);
    err.push_back(std::hypot(f(0, 0) - std::cos(1.0), f(1, 0) - std::sin(1.0)));
  }
  for (std::size_t i = 1; i < err.size(); ++i) CHECK(std::log2(err[i - 1] / err[i]) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("post-processing runs after both stages") {
  int calls = 0;
  bool seen = false;
  Eigen::MatrixXd f = Eigen::MatrixXd::Ones(1, 1);
  Rk2Stepper stepper;
  stepper.step(
      f, 0.1, [](const Eigen::MatrixXd& x, Eigen::MatrixXd& o) { o = -x; }, [&](Eigen::MatrixXd&) { ++calls; }, 0, 0.0,
      [&](const Eigen::MatrixXd&) { seen = calls == 1; });
  CHECK(calls == 2);
  CHECK(seen);
}

TEST_CASE("blow-up is reported with context") {
  Eigen::MatrixXd f = Eigen::MatrixXd::Ones(1, 1);
  Rk2Stepper stepper;
  try {
    stepper.step(f, 0.1, [](const Eigen::MatrixXd&, Eigen::MatrixXd& o) { o = Eigen::MatrixXd::Constant(1, 1, NAN); },
                 {}, 7, 1.5);
    FAIL("expected blow-up");
  } catch (const NumericalBlowup& e) {
    CHECK(e.step == 7);
  }
  CHECK_THROWS_AS(step_rk2(f, -1.0, [](const Eigen::MatrixXd& x, Eigen::MatrixXd& o) { o = x; }), std::invalid_argument);
}

TEST_CASE("emission in vacuum grows the energy linearly") {
  const AngularBasis basis = AngularBasis::femn(0);
  const AngularMatrices m = assemble_matrices(basis);
  const SpatialGrid2D g = SpatialGrid2D::covering(0, 1, 0, 1, 4, 4);
  const double eta = 0.3;
  TransportSolver solver(basis, m, g, MediumMap(4, 4, {eta, 0, 0}),
                         BoundaryCondition::uniform(BoundaryKind::zero_gradient), {});
  FieldState state{g, Eigen::MatrixXd::Zero(basis.size(), g.cells()), 0.0};
  for (int k = 0; k < 8; ++k) solver.step(state, 0.05);
  const Eigen::VectorXd e = solver.energy(state);
  CHECK((e.array() - 4 * std::numbers::pi * eta * 0.4).abs().maxCoeff() < 1e-12);
}

TEST_CASE("solver option validation") {
  const AngularBasis fpn = AngularBasis::fpn(2);
  const AngularMatrices m = assemble_matrices(fpn);
  const SpatialGrid2D g = SpatialGrid2D::covering(0, 1, 0, 1, 4, 4);
  SolverOptions opt;
  opt.positivity = Positivity::clip;
  CHECK_THROWS_AS(TransportSolver(fpn, m, g, MediumMap(4, 4), BoundaryCondition::uniform(BoundaryKind::zero_gradient), opt),
                  std::invalid_argument);
  const AngularBasis femn = AngularBasis::femn(0);
  const AngularMatrices mf = assemble_matrices(femn);
  opt.positivity = Positivity::filter;
  CHECK_THROWS_AS(TransportSolver(femn, mf, g, MediumMap(4, 4), BoundaryCondition::uniform(BoundaryKind::zero_gradient), opt),
                  std::invalid_argument);
}
