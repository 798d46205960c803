#include "geotransport/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace geotransport {

namespace {

void add_orbit3(std::vector<TriangleNode>& rule, double a, double w) {
  const double b = 1.0 - 2.0 * a;
  rule.push_back({{a, a, b}, w});
  rule.push_back({{a, b, a}, w});
  rule.push_back({{b, a, a}, w});
}

void add_orbit6(std::vector<TriangleNode>& rule, double a, double b, double w) {
  const double c = 1.0 - a - b;
  rule.push_back({{a, b, c}, w});
  rule.push_back({{a, c, b}, w});
  rule.push_back({{b, a, c}, w});
  rule.push_back({{b, c, a}, w});
  rule.push_back({{c, a, b}, w});
  rule.push_back({{c, b, a}, w});
}

std::vector<TriangleNode> make_degree8() {
  std::vector<TriangleNode> rule;
  rule.reserve(16);
  rule.push_back({{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, 0.144315607677787});
  add_orbit3(rule, 0.459292588292723, 0.095091634267285);
  add_orbit3(rule, 0.170569307751760, 0.103217370534718);
  add_orbit3(rule, 0.050547228317031, 0.032458497623198);
  add_orbit6(rule, 0.263112829634638, 0.008394777409958, 0.027230314174435);
  return rule;
}

}  // namespace

const std::vector<TriangleNode>& triangle_rule_degree8() {
  static const std::vector<TriangleNode> rule = make_degree8();
  return rule;
}

GaussLegendre gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  GaussLegendre gl;
  gl.nodes.resize(n);
  gl.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Tricomi initial guess, refined by Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = n == 1 ? x : p1;
      const double pnm1 = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pnm1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double pn = n == 1 ? x : p1;
    const double pnm1 = n == 1 ? 1.0 : p0;
    dp = n * (x * pn - pnm1) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    gl.nodes[i] = -x;
    gl.nodes[n - 1 - i] = x;
    gl.weights[i] = w;
    gl.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) gl.nodes[n / 2] = 0.0;
  return gl;
}

}  // namespace geotransport
