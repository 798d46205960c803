#pragma once

#include <Eigen/Core>

#include "geotransport/geodesic_grid.hpp"

namespace geotransport {

/// Flat index of the real (l, m) mode: l*l + l + m.
constexpr int sh_index(int l, int m) { return l * l + l + m; }
constexpr int sh_count(int l_max) { return (l_max + 1) * (l_max + 1); }

/// Inverse of sh_index.
struct ShMode {
  int l;
  int m;
};
ShMode sh_mode(int index);

/// Normalized associated Legendre function N_l^m P_l^m(x) for 0 <= m <= l,
/// with N_l^m = sqrt((2l+1)(l-m)! / (4 pi (l+m)!)).
///
/// Phase: no Condon-Shortley factor, i.e. P_l^l(x) = (2l-1)!! (1-x^2)^{l/2}
/// is non-negative on [-1, 1].
double normalized_legendre(int l, int m, double x);

/// Real spherical harmonic Y_lm: sqrt(2) N P_l^m cos(m phi) for m > 0,
/// N P_l^0 for m = 0, sqrt(2) N P_l^|m| sin(|m| phi) for m < 0.
/// Orthonormal on the unit sphere. Throws std::invalid_argument for |m| > l
/// or l < 0.
double real_spherical_harmonic(int l, int m, const Vec3& omega);

/// All (l_max+1)^2 real harmonics at one direction, ordered by sh_index.
Eigen::VectorXd real_spherical_harmonics(int l_max, const Vec3& omega);

}  // namespace geotransport
