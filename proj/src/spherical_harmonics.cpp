#include "geotransport/spherical_harmonics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace geotransport {

ShMode sh_mode(int index) {
  const int l = static_cast<int>(std::sqrt(static_cast<double>(index)));
  // guard against sqrt rounding
  int ll = l;
  while (ll * ll > index) --ll;
  while ((ll + 1) * (ll + 1) <= index) ++ll;
  return {ll, index - ll * ll - ll};
}

namespace {

// Fills table[l] = N_l^m P_l^m(x) for l = m .. l_max.
void legendre_column(int l_max, int m, double x, std::vector<double>& table) {
  table.assign(l_max + 1, 0.0);
  const double s = std::sqrt(std::max(0.0, 1.0 - x * x));
  double pmm = 1.0 / std::sqrt(4.0 * std::numbers::pi);
  for (int k = 1; k <= m; ++k) pmm *= std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * s;
  table[m] = pmm;
  if (m + 1 > l_max) return;
  table[m + 1] = std::sqrt(2.0 * m + 3.0) * x * pmm;
  for (int l = m + 2; l <= l_max; ++l) {
    const double l2 = static_cast<double>(l) * l;
    const double m2 = static_cast<double>(m) * m;
    const double a = std::sqrt((4.0 * l2 - 1.0) / (l2 - m2));
    const double lm1 = l - 1.0;
    const double b = std::sqrt((lm1 * lm1 - m2) / (4.0 * lm1 * lm1 - 1.0));
    table[l] = a * (x * table[l - 1] - b * table[l - 2]);
  }
}

}  // namespace

double normalized_legendre(int l, int m, double x) {
  if (l < 0 || m < 0 || m > l) throw std::invalid_argument("normalized_legendre: need 0 <= m <= l");
  std::vector<double> table;
  legendre_column(l, m, x, table);
  return table[l];
}

double real_spherical_harmonic(int l, int m, const Vec3& omega) {
  if (l < 0 || std::abs(m) > l) throw std::invalid_argument("real_spherical_harmonic: need |m| <= l");
  const double x = std::clamp(omega.z(), -1.0, 1.0);
  const double phi = std::atan2(omega.y(), omega.x());
  const int am = std::abs(m);
  const double p = normalized_legendre(l, am, x);
  if (m == 0) return p;
  const double trig = m > 0 ? std::cos(am * phi) : std::sin(am * phi);
  return std::numbers::sqrt2 * p * trig;
}

Eigen::VectorXd real_spherical_harmonics(int l_max, const Vec3& omega) {
  if (l_max < 0) throw std::invalid_argument("real_spherical_harmonics: l_max must be non-negative");
  Eigen::VectorXd y(sh_count(l_max));
  const double x = std::clamp(omega.z(), -1.0, 1.0);
  const double phi = std::atan2(omega.y(), omega.x());
  std::vector<double> table;
  for (int m = 0; m <= l_max; ++m) {
    legendre_column(l_max, m, x, table);
    if (m == 0) {
      for (int l = 0; l <= l_max; ++l) y[sh_index(l, 0)] = table[l];
      continue;
    }
    const double c = std::numbers::sqrt2 * std::cos(m * phi);
    const double s = std::numbers::sqrt2 * std::sin(m * phi);
    for (int l = m; l <= l_max; ++l) {
      y[sh_index(l, m)] = c * table[l];
      y[sh_index(l, -m)] = s * table[l];
    }
  }
  return y;
}

}  // namespace geotransport
