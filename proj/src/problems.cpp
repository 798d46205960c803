#include "geotransport/problems.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "geotransport/spherical_harmonics.hpp"

namespace geotransport {

namespace {

using boost::math::quadrature::gauss_kronrod;
constexpr double kPi = std::numbers::pi;
constexpr double kPhi = std::numbers::phi;

template <class F>
double integrate(F f, double a, double b, double tol = 1e-10, unsigned depth = 8) {
  if (!(b > a)) return 0.0;
  // depth is capped: near-zero integrands never meet a relative tolerance
  return gauss_kronrod<double, 31>::integrate(f, a, b, depth, tol);
}

struct Defaults {
  double lo, hi;
  int cells;
  double dt, t_end;
  SlopeLimiter slope;
  double sigma_eff;
};

Defaults defaults_for(std::string_view name) {
  if (name == "line_source") return {-1.5, 1.5, 500, 0.002, 1.0, SlopeLimiter::minmod, 20.0};
  if (name == "searchlight") return {-1.5, 1.5, 400, 0.0067, 10.0, SlopeLimiter::modminmod2, 30.0};
  if (name == "lattice") return {0.0, 7.0, 350, 0.0064, 3.2, SlopeLimiter::sminmod2, 5.0};
  if (name == "cylinder") return {-2.5, 2.5, 150, 0.0075, 18.75, SlopeLimiter::sminmod2, 5.0};
  throw std::invalid_argument("unknown problem '" + std::string(name) + "'");
}

int even_cells(double n) { return std::max(2, 2 * static_cast<int>(std::lround(n / 2.0))); }

// Radially symmetric oracle evaluated once per distinct cell radius.
template <class F>
Eigen::VectorXd radial_field(const SpatialGrid2D& g, F f) {
  std::map<long long, double> cache;
  Eigen::VectorXd out(g.cells());
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double r = std::hypot(g.center_x(i), g.center_y(j));
      const long long key = std::llround(r * 1e12);
      auto it = cache.find(key);
      if (it == cache.end()) it = cache.emplace(key, f(r)).first;
      out[g.index(i, j)] = it->second;
    }
  }
  return out;
}

}  // namespace

Beams parse_beams(std::string_view name) {
  if (name == "both") return Beams::both;
  if (name == "left") return Beams::left;
  if (name == "right") return Beams::right;
  throw std::invalid_argument("beams must be both, left or right");
}

const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> names{"line_source", "searchlight", "lattice", "cylinder"};
  return names;
}

int nearest_vertex(const GeodesicGrid& grid, const Vec3& omega) {
  int best = 0;
  for (int a = 1; a < grid.num_points(); ++a)
    if (grid.vertices[a].dot(omega) > grid.vertices[best].dot(omega)) best = a;
  return best;
}

Vec3 searchlight_direction(bool left) { return Vec3(left ? 1.0 : -1.0, kPhi, 0.0).normalized(); }

Eigen::VectorXd beam_state(const AngularBasis& basis, const Vec3& omega) {
  if (basis.kind() == BasisKind::fpn) return real_spherical_harmonics(basis.resolution(), omega);
  return Eigen::VectorXd::Unit(basis.size(), nearest_vertex(*basis.grid(), omega));
}

Problem make_problem(std::string_view name, const AngularBasis& basis, const ProblemOptions& options) {
  const Defaults d = defaults_for(name);
  if (!(options.scale > 0.0)) throw std::invalid_argument("scale must be positive");
  Problem p;
  p.name = std::string(name);
  const int cells = options.cells ? *options.cells : even_cells(d.cells * options.scale);
  p.grid = SpatialGrid2D::covering(d.lo, d.hi, d.lo, d.hi, cells, cells);
  p.dt = options.dt ? *options.dt : d.dt / options.scale;
  p.t_end = options.t_end ? *options.t_end : d.t_end;
  if (!(p.dt > 0.0) || !(p.t_end >= 0.0)) throw std::invalid_argument("time step and end time must be positive");
  p.slope = d.slope;
  p.sigma_eff = d.sigma_eff;
  p.medium = MediumMap(cells, cells);
  p.bc = BoundaryCondition::uniform(BoundaryKind::zero_gradient);
  p.initial = Eigen::MatrixXd::Zero(basis.size(), p.grid.cells());
  const SpatialGrid2D& g = p.grid;

  if (name == "line_source") {
    const LineSourceOracle oracle;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        p.initial.col(g.index(i, j)) = basis.isotropic(oracle.initial_energy(std::hypot(g.center_x(i), g.center_y(j))));
    p.has_oracle = true;
  } else if (name == "searchlight") {
    auto& side = p.bc[Side::y_lo];
    side.kind = BoundaryKind::inflow;
    for (bool left : {true, false}) {
      if ((left && options.beams == Beams::right) || (!left && options.beams == Beams::left)) continue;
      // entry points chosen so the two beams cross at the origin
      const double x0 = (left ? -1.5 : 1.5) / kPhi;
      side.segments.push_back({x0 - 0.5 * options.beam_width, x0 + 0.5 * options.beam_width,
                               beam_state(basis, searchlight_direction(left))});
    }
  } else if (name == "lattice") {
    // 1-indexed (column, row) unit squares of the 7 x 7 checkerboard
    static const int absorbers[][2] = {{2, 2}, {6, 2}, {3, 3}, {5, 3}, {2, 4}, {6, 4},
                                       {3, 5}, {5, 5}, {2, 6}, {4, 6}, {6, 6}};
    const double background = options.lattice_text_variant ? 10.0 : 1.0;
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        const int col = static_cast<int>(std::floor(g.center_x(i))) + 1;
        const int row = static_cast<int>(std::floor(g.center_y(j))) + 1;
        MediumCell c{0.0, 0.0, background};
        if (col == 4 && row == 4) c = {1.0 / (4.0 * kPi), 0.0, 10.0};
        for (const auto& a : absorbers)
          if (a[0] == col && a[1] == row) c = {0.0, 1.0, 0.0};
        p.medium.set(i, j, c);
      }
    }
  } else if (name == "cylinder") {
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        if (std::hypot(g.center_x(i), g.center_y(j)) < 1.0) p.medium.set(i, j, {10.0, 10.0, 0.0});
    p.has_oracle = true;
  }
  return p;
}

// ---------------------------------------------------------------------------

double line_source_kernel(double t, double r) {
  if (!(t > 0.0)) throw std::invalid_argument("line source kernel needs t > 0");
  if (r >= t) return 0.0;
  return 1.0 / (2.0 * kPi * t * std::sqrt(t * t - r * r));
}

LineSourceOracle::LineSourceOracle(double omega, double floor_f) : omega_(omega), floor_e_(4.0 * kPi * floor_f) {
  if (!(omega > 0.0) || !(floor_f >= 0.0)) throw std::invalid_argument("invalid line source parameters");
  const double peak = 1.0 / (2.0 * kPi * omega * omega);
  // g(S) = floor; with no floor the Gaussian is cut where it is negligible
  const double ratio = floor_e_ > 0.0 ? peak / floor_e_ : 1e30;
  support_ = ratio > 1.0 ? omega * std::sqrt(2.0 * std::log(ratio)) : 0.0;
}

double LineSourceOracle::excess(double s) const {
  if (s >= support_) return 0.0;
  const double g = std::exp(-s * s / (2.0 * omega_ * omega_)) / (2.0 * kPi * omega_ * omega_);
  return std::max(g - floor_e_, 0.0);
}

double LineSourceOracle::initial_energy(double rho) const { return floor_e_ + excess(rho); }

double LineSourceOracle::excess_mass() const {
  const double s2 = support_ * support_;
  return 1.0 - std::exp(-s2 / (2.0 * omega_ * omega_)) - floor_e_ * kPi * s2;
}

double LineSourceOracle::energy(double t, double rho) const {
  if (!(t > 0.0)) throw std::invalid_argument("line source oracle needs t > 0");
  const double S = support_;
  // Mean of the excess over the circle of radius r about the target point.
  auto ring = [&](double r) {
    if (rho * r == 0.0) return excess(rho + r);
    const double c = (S * S - rho * rho - r * r) / (2.0 * rho * r);
    if (c <= -1.0) return 0.0;
    const double a0 = c >= 1.0 ? 0.0 : std::acos(c);
    return integrate([&](double a) { return excess(std::sqrt(std::max(rho * rho + r * r + 2 * rho * r * std::cos(a), 0.0))); },
                     a0, kPi) /
           kPi;
  };
  const double r_lo = std::max(0.0, rho - S), r_hi = std::min(t, rho + S);
  if (!(r_hi > r_lo)) return floor_e_;

  std::vector<double> breaks{r_lo, r_hi, std::clamp(0.5 * t, r_lo, r_hi)};
  if (S - rho > r_lo && S - rho < r_hi) breaks.push_back(S - rho);
  std::sort(breaks.begin(), breaks.end());
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double a = breaks[k], b = breaks[k + 1];
    if (!(b > a)) continue;
    if (b <= 0.5 * t) {
      total += integrate([&](double r) { return r / std::sqrt(t * t - r * r) * ring(r); }, a, b);
    } else {
      // u = sqrt(t^2 - r^2) absorbs the inverse square root at r = t
      const double ua = std::sqrt(std::max(t * t - b * b, 0.0)), ub = std::sqrt(std::max(t * t - a * a, 0.0));
      total += integrate([&](double u) { return ring(std::sqrt(std::max(t * t - u * u, 0.0))); }, ua, ub);
    }
  }
  return floor_e_ + total / t;
}

double disk_chord(double x, double y, double phi) {
  const double b = x * std::cos(phi) + y * std::sin(phi);
  const double disc = b * b - (x * x + y * y) + 1.0;
  if (disc <= 0.0) return 0.0;
  const double sq = std::sqrt(disc);
  return std::max(b + sq, 0.0) - std::max(b - sq, 0.0);
}

double bickley_like(double a) {
  if (a == 0.0) return 1.0;
  return integrate([a](double th) { return th <= 0.0 ? 0.0 : std::exp(-a / std::sin(th)) * std::sin(th); }, 0.0,
                   0.5 * kPi, 1e-12);
}

double cylinder_steady_energy(double x, double y, double eta, double kappa) {
  if (!(kappa > 0.0)) throw std::invalid_argument("cylinder oracle needs kappa > 0");
  // theta integral of (1 - exp(-kappa c / sin theta)) sin theta over [0, pi]
  auto polar = [&](double phi) { return 2.0 - 2.0 * bickley_like(kappa * disk_chord(x, y, phi)); };
  const double p = std::hypot(x, y);
  double azimuthal;
  if (p < 1.0) {
    azimuthal = integrate(polar, 0.0, kPi) + integrate(polar, kPi, 2.0 * kPi);
  } else {
    // only backward rays within asin(1/p) of the direction to the axis hit the disk
    const double centre = std::atan2(y, x), half = std::asin(1.0 / p);
    boost::math::quadrature::tanh_sinh<double> ts;
    azimuthal = ts.integrate(polar, centre - half, centre) + ts.integrate(polar, centre, centre + half);
  }
  return eta / kappa * azimuthal;
}

Eigen::VectorXd oracle_energy(const Problem& problem, double t) {
  if (problem.name == "line_source") {
    const LineSourceOracle oracle;
    return radial_field(problem.grid, [&](double r) { return oracle.energy(t, r); });
  }
  if (problem.name == "cylinder")
    return radial_field(problem.grid, [](double r) { return cylinder_steady_energy(r, 0.0); });
  throw std::invalid_argument("problem '" + problem.name + "' has no oracle");
}

double l1_error(const Eigen::VectorXd& numerical, const Eigen::VectorXd& exact) {
  if (numerical.size() != exact.size() || numerical.size() == 0)
    throw std::invalid_argument("l1_error: field sizes differ");
  return (numerical - exact).cwiseAbs().mean();
}

}  // namespace geotransport
