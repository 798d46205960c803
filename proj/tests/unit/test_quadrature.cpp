#include <cmath>

#include "doctest.h"
#include "geotransport/quadrature.hpp"

using namespace geotransport;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// Integral of x^a y^b over the reference triangle {x, y >= 0, x + y <= 1}.
double reference_monomial(int a, int b) { return factorial(a) * factorial(b) / factorial(a + b + 2); }

}  // namespace

TEST_CASE("degree-8 triangle rule integrates monomials exactly") {
  const auto& rule = triangle_rule_degree8();
  CHECK(rule.size() == 16);
  double wsum = 0.0;
  for (const auto& n : rule) {
    wsum += n.weight;
    CHECK(n.weight > 0.0);
    CHECK(n.bary[0] + n.bary[1] + n.bary[2] == doctest::Approx(1.0).epsilon(1e-15));
  }
  CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
  for (int a = 0; a <= 8; ++a) {
    for (int b = 0; a + b <= 8; ++b) {
      double q = 0.0;
      for (const auto& n : rule) q += 0.5 * n.weight * std::pow(n.bary[0], a) * std::pow(n.bary[1], b);
      CHECK(std::abs(q - reference_monomial(a, b)) < 1e-15);
    }
  }
}

TEST_CASE("Gauss-Legendre rules") {
  const auto two = gauss_legendre(2);
  CHECK(two.nodes[0] == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(two.nodes[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(two.weights[0] == doctest::Approx(1.0).epsilon(1e-15));

  const auto one = gauss_legendre(1);
  CHECK(one.nodes[0] == 0.0);
  CHECK(one.weights[0] == doctest::Approx(2.0));

  for (int n : {3, 5, 8, 13}) {
    const auto gl = gauss_legendre(n);
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double q = 0.0;
      for (int i = 0; i < n; ++i) q += gl.weights[i] * std::pow(gl.nodes[i], p);
      const double exact = p % 2 == 1 ? 0.0 : 2.0 / (p + 1);
      CHECK(std::abs(q - exact) < 1e-14);
    }
    for (int i = 1; i < n; ++i) CHECK(gl.nodes[i] > gl.nodes[i - 1]);
  }
  CHECK_THROWS(gauss_legendre(0));
}
