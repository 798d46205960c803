#include <cmath>
#include <random>

#include "doctest.h"
#include "geotransport/angular_basis.hpp"
#include "geotransport/positivity.hpp"
#include "geotransport/spherical_harmonics.hpp"

using namespace geotransport;

TEST_CASE("clipping limiter hand cases") {
  const ClipLimiter lim(Eigen::Vector2d(1, 1), Eigen::Vector2d(1, 1));
  Eigen::VectorXd f = Eigen::Vector2d(-1, 3);
  CHECK(lim.apply(f) == ClipOutcome::rescaled);
  CHECK(f[0] == 0.0);
  CHECK(f[1] == doctest::Approx(2.0).epsilon(1e-15));

  Eigen::VectorXd pos = Eigen::Vector2d(0.5, 3);
  CHECK(lim.apply(pos) == ClipOutcome::unchanged);
  CHECK(pos == Eigen::Vector2d(0.5, 3));

  Eigen::VectorXd neg = Eigen::Vector2d(-1, -2);
  CHECK(lim.apply(neg) == ClipOutcome::zeroed);
  CHECK(neg == Eigen::Vector2d(0, 0));

  // Positive energy without a positive coefficient needs signed weights.
  const ClipLimiter signed_weights(Eigen::Vector2d(1, -1), Eigen::Vector2d(2, 1));
  Eigen::VectorXd odd = Eigen::Vector2d(-1, -3);
  CHECK(signed_weights.apply(odd) == ClipOutcome::isotropized);
  CHECK(odd[0] == doctest::Approx(4.0));
  CHECK(odd[1] == doctest::Approx(2.0));

  ClipLimiter::Stats stats;
  Eigen::MatrixXd cells(2, 3);
  cells << -1, 1, -1, 3, 2, -2;
  lim.apply(cells, stats);
  CHECK(stats.rescaled == 1);
  CHECK(stats.zeroed == 1);
  CHECK(stats.clipped_energy == doctest::Approx(4.0));
}

TEST_CASE("clipping limiter on random coefficient vectors") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-0.3, 1.0);
  for (auto basis : {AngularBasis::femn(1), AngularBasis::sn(1)}) {
    const AngularMatrices m = assemble_matrices(basis);
    const ClipLimiter lim(basis, m);
    for (int trial = 0; trial < 2000; ++trial) {
      Eigen::VectorXd f(basis.size());
      for (auto& x : f) x = u(rng);
      const double before = lim.weights().dot(f);
      Eigen::VectorXd g = f;
      const auto outcome = lim.apply(g);
      CHECK((g.array() >= 0.0).all());
      if (outcome == ClipOutcome::rescaled) CHECK(std::abs(lim.weights().dot(g) - before) <= 1e-12 * std::abs(before));
      Eigen::VectorXd h = g;
      lim.apply(h);
      CHECK(h == g);
    }
  }
}

TEST_CASE("Lanczos filter") {
  CHECK(lanczos_sigma(0.0) == 1.0);
  CHECK(lanczos_sigma(M_PI / 2) == doctest::Approx(2 / M_PI));

  FilterSpec spec;
  spec.l_max = 5;
  const Eigen::VectorXd f = Eigen::VectorXd::Ones(sh_count(5));
  CHECK(lanczos_filter(f, spec, 0.01) == f);

  spec.sigma_eff = 20.0;
  const double dt = 0.01;
  const Eigen::VectorXd factors = lanczos_factors(spec, dt);
  CHECK(factors[0] == 1.0);
  for (int idx = 1; idx < factors.size(); ++idx) {
    CHECK(factors[idx] <= factors[idx - 1]);
    CHECK(factors[idx] > 0.0);
  }
  // the top mode decays at rate sigma_eff
  CHECK(factors[sh_index(5, 0)] == doctest::Approx(std::exp(-dt * spec.sigma_eff)).epsilon(1e-12));
  const Eigen::VectorXd g = lanczos_filter(f, spec, dt);
  CHECK(g[0] == f[0]);

  spec.strength = 0.0;
  CHECK(lanczos_filter(f, spec, dt) == f);
  spec.strength.reset();
  spec.sigma_eff = -1.0;
  CHECK_THROWS_AS(lanczos_factors(spec, dt), std::invalid_argument);

  FilterSpec p0;
  p0.sigma_eff = 10;
  CHECK(lanczos_factors(p0, 0.1)[0] == 1.0);
}

TEST_CASE("limiter indicator") {
  CHECK(limiter_indicator(Eigen::MatrixXd::Ones(3, 4)) == 0.0);
  Eigen::MatrixXd half(2, 2);
  half << -1, 2, 3, -4;
  CHECK(limiter_indicator(half) == 0.5);
}
