#include "geotransport/dg_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <omp.h>

namespace geotransport {

namespace {

// Target column count of a block of grid lines.
constexpr Eigen::Index kChunk = 512;

Eigen::SparseMatrix<double> to_sparse(const Eigen::MatrixXd& m) {
  const double cut = 1e-14 * std::max(1.0, m.cwiseAbs().maxCoeff());
  return m.sparseView(1.0, cut);
}

bool is_diagonal(const Eigen::MatrixXd& m) {
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      if (r != c && m(r, c) != 0.0) return false;
  return true;
}


// Common sign of a, b, c; 0 if they disagree or any vanishes.
// Written without short-circuits so it stays branch-free.
double common_sign(double a, double b, double c) {
  const bool pos = (a > 0.0) & (b > 0.0) & (c > 0.0);
  const bool neg = (a < 0.0) & (b < 0.0) & (c < 0.0);
  return static_cast<double>(pos) - static_cast<double>(neg);
}

}  // namespace

SpatialGrid2D SpatialGrid2D::covering(double x_lo, double x_hi, double y_lo, double y_hi, int nx, int ny) {
  SpatialGrid2D g;
  g.nx = nx;
  g.ny = ny;
  g.x0 = x_lo;
  g.y0 = y_lo;
  g.dx = (x_hi - x_lo) / nx;
  g.dy = (y_hi - y_lo) / ny;
  g.validate();
  return g;
}

void SpatialGrid2D::validate() const {
  if (nx < 2 || ny < 2 || nx % 2 || ny % 2)
    throw std::invalid_argument("cell counts must be positive and even (2 cells per element), got " +
                                std::to_string(nx) + " x " + std::to_string(ny));
  if (!(dx > 0.0) || !(dy > 0.0)) throw std::invalid_argument("cell spacing must be positive");
}

BoundaryCondition BoundaryCondition::uniform(BoundaryKind kind) {
  BoundaryCondition bc;
  for (auto& s : bc.sides) s.kind = kind;
  return bc;
}

void BoundaryCondition::validate(int n) const {
  auto periodic = [&](Side s) { return (*this)[s].kind == BoundaryKind::periodic; };
  if (periodic(Side::x_lo) != periodic(Side::x_hi) || periodic(Side::y_lo) != periodic(Side::y_hi))
    throw std::invalid_argument("periodic boundaries must be paired");
  for (const auto& side : sides) {
    for (const auto& seg : side.segments) {
      if (side.kind != BoundaryKind::inflow) throw std::invalid_argument("inflow segment on a non-inflow side");
      if (seg.state.size() != n) throw std::invalid_argument("inflow state has the wrong size");
      if (!(seg.hi >= seg.lo)) throw std::invalid_argument("inflow segment bounds reversed");
    }
  }
}

NonFiniteError::NonFiniteError(int i_, int j_, int a_)
    : std::runtime_error("non-finite coefficient at cell (" + std::to_string(i_) + ", " + std::to_string(j_) +
                         "), angular index " + std::to_string(a_)),
      i(i_), j(j_), a(a_) {}

std::pair<double, double> edge_from_centers(double f_i, double f_ip1) {
  return {1.5 * f_i - 0.5 * f_ip1, -0.5 * f_i + 1.5 * f_ip1};
}

std::string_view to_string(SlopeLimiter mode) {
  switch (mode) {
    case SlopeLimiter::none: return "none";
    case SlopeLimiter::minmod: return "minmod";
    case SlopeLimiter::sminmod2: return "sminmod2";
    case SlopeLimiter::modminmod2: return "modminmod2";
  }
  return "?";
}

SlopeLimiter parse_slope_limiter(std::string_view name) {
  for (auto m : {SlopeLimiter::none, SlopeLimiter::minmod, SlopeLimiter::sminmod2, SlopeLimiter::modminmod2})
    if (name == to_string(m)) return m;
  throw std::invalid_argument("unknown slope limiter '" + std::string(name) + "'");
}

double minmod(double a, double b, double c) {
  return common_sign(a, b, c) * std::min(std::abs(a), std::min(std::abs(b), std::abs(c)));
}

double sminmod2(double a, double b, double c) {
  const double s = common_sign(a, b, c);
  const double m = std::min(std::abs(b), std::abs(c));
  return std::abs(a) < 2.0 * m ? s * std::abs(a) : s * m;
}

double modminmod2(double a, double b, double c) { return sminmod2(a, 0.5 * b, 0.5 * c); }

double limiter_function(SlopeLimiter mode, double a, double b, double c) {
  switch (mode) {
    case SlopeLimiter::none: return a;
    case SlopeLimiter::minmod: return minmod(a, b, c);
    case SlopeLimiter::sminmod2: return sminmod2(a, b, c);
    case SlopeLimiter::modminmod2: return modminmod2(a, b, c);
  }
  return a;
}

TransportOperators TransportOperators::from(const AngularBasis& basis, const AngularMatrices& matrices) {
  TransportOperators ops;
  for (int d = 0; d < 2; ++d) {
    ops.advection[d] = matrices.advection[d];
    ops.dissipation[d] = matrices.dissipation_matrix[d];
  }
  ops.unit = unit_coefficients(matrices, basis);
  ops.integrals = basis.basis_integrals();
  return ops;
}

DGOperator::DGOperator(const SpatialGrid2D& grid, TransportOperators ops, const MediumMap& medium,
                       BoundaryCondition bc)
    : grid_(grid), n_(ops.size()), bc_(std::move(bc)) {
  grid_.validate();
  bc_.validate(n_);
  if (medium.nx() != grid.nx || medium.ny() != grid.ny) throw std::invalid_argument("medium map does not match grid");
  for (int d = 0; d < 2; ++d) {
    if (ops.advection[d].rows() != n_ || ops.advection[d].cols() != n_ || ops.dissipation[d].rows() != n_ ||
        ops.dissipation[d].cols() != n_)
      throw std::invalid_argument("transport operator size mismatch");
    advection_t_[d] = to_sparse(ops.advection[d].transpose());
    diagonal_dissipation_[d] = is_diagonal(ops.dissipation[d]);
    dissipation_[d] = std::move(ops.dissipation[d]);
  }
  unit_ = std::move(ops.unit);
  integrals_ = std::move(ops.integrals);
  medium_ = medium.cells();
  vacuum_ = medium.is_vacuum();
  padded_.resize(n_, static_cast<Eigen::Index>(grid_.nx + 4) * (grid_.ny + 4));
  padded_.setZero();
}

void DGOperator::fill_padded(const Eigen::MatrixXd& f) const {
  const int nx = grid_.nx, ny = grid_.ny;
  for (int j = 0; j < ny; ++j) padded_.middleCols(padded_index(0, j), nx) = f.middleCols(grid_.index(0, j), nx);

  // Ghost value at depth d (1 or 2) beyond side s, tangential cell index t.
  auto ghost = [&](Side s, int d, int t) -> Eigen::VectorXd {
    const SideCondition& sc = bc_[s];
    const bool along_x = s == Side::x_lo || s == Side::x_hi;
    const int len = along_x ? nx : ny;
    const bool low = s == Side::x_lo || s == Side::y_lo;
    int inner = low ? 0 : len - 1;
    if (sc.kind == BoundaryKind::periodic) inner = low ? len - d : d - 1;
    if (sc.kind == BoundaryKind::inflow) {
      const double coord = along_x ? grid_.center_y(t) : grid_.center_x(t);
      for (const auto& seg : sc.segments)
        if (coord >= seg.lo && coord <= seg.hi) return seg.state;
      return Eigen::VectorXd::Zero(n_);  // nothing enters outside the segments
    }
    return along_x ? f.col(grid_.index(inner, t)) : f.col(grid_.index(t, inner));
  };
  for (int j = 0; j < ny; ++j) {
    for (int d = 1; d <= 2; ++d) {
      padded_.col(padded_index(-d, j)) = ghost(Side::x_lo, d, j);
      padded_.col(padded_index(nx - 1 + d, j)) = ghost(Side::x_hi, d, j);
    }
  }
  for (int i = 0; i < nx; ++i) {
    for (int d = 1; d <= 2; ++d) {
      padded_.col(padded_index(i, -d)) = ghost(Side::y_lo, d, i);
      padded_.col(padded_index(i, ny - 1 + d)) = ghost(Side::y_hi, d, i);
    }
  }
}

void DGOperator::directional_flux(int dir, Eigen::MatrixXd& out) const {
  const int len = dir == 0 ? grid_.nx : grid_.ny;
  const int lines = dir == 0 ? grid_.ny : grid_.nx;
  const double inv_width = 1.0 / (2.0 * (dir == 0 ? grid_.dx : grid_.dy));  // 1/Dx
  const int edges = len / 2 + 1, span = len + 4;
  auto pcol = [&](int along, int line) { return dir == 0 ? padded_index(along, line) : padded_index(line, along); };
  auto ccol = [&](int along, int line) { return dir == 0 ? grid_.index(along, line) : grid_.index(line, along); };

  // Blocks of whole lines small enough to stay in cache. The block layout
  // depends on the grid only, so results are independent of the thread count.
  const int block = std::max(1, static_cast<int>(kChunk) / span);
  const int blocks = (lines + block - 1) / block;
  if (scratch_.size() < static_cast<std::size_t>(omp_get_max_threads())) scratch_.resize(omp_get_max_threads());

#pragma omp parallel for schedule(static)
  for (int b = 0; b < blocks; ++b) {
    Scratch& s = scratch_[omp_get_thread_num()];
    const int l0 = b * block, nl = std::min(block, lines - l0);
    s.padded.resize(n_, static_cast<Eigen::Index>(nl) * span);
    for (int l = 0; l < nl; ++l)
      for (int a = -2; a < len + 2; ++a) s.padded.col(l * span + a + 2) = padded_.col(pcol(a, l0 + l));
    // sparse product with the cells along the vectorized dimension
    s.transposed = s.padded.transpose();
    s.advected_t.noalias() = s.transposed * advection_t_[dir];
    s.advected = s.advected_t.transpose();

    const Eigen::Index total = static_cast<Eigen::Index>(nl) * edges;
    s.sum.resize(n_, total);
    s.jump.resize(n_, total);
    for (int l = 0; l < nl; ++l) {
      for (int e = 0; e < edges; ++e) {
        const Eigen::Index k = static_cast<Eigen::Index>(l) * edges + e;
        const int a = l * span + 2 * e, bb = a + 1, c = a + 2, d = a + 3;
        // left state -1/2 F_{2e-2} + 3/2 F_{2e-1}; right state 3/2 F_{2e} - 1/2 F_{2e+1}
        s.sum.col(k) = -0.5 * s.advected.col(a) + 1.5 * s.advected.col(bb) + 1.5 * s.advected.col(c) -
                       0.5 * s.advected.col(d);
        s.jump.col(k) = 1.5 * s.padded.col(c) - 0.5 * s.padded.col(d) + 0.5 * s.padded.col(a) - 1.5 * s.padded.col(bb);
      }
    }
    if (diagonal_dissipation_[dir])
      s.damped.noalias() = dissipation_[dir].diagonal().asDiagonal() * s.jump;
    else
      s.damped.noalias() = dissipation_[dir] * s.jump;
    // Riemann flux at every edge, stored in place of the sum
    s.sum = 0.5 * (s.sum - s.damped);

    for (int l = 0; l < nl; ++l) {
      for (int m = 0; m < len / 2; ++m) {
        const Eigen::Index k = static_cast<Eigen::Index>(l) * edges + m;
        const int c0 = ccol(2 * m, l0 + l), c1 = ccol(2 * m + 1, l0 + l);
        const auto lo = s.sum.col(k);
        const auto hi = s.sum.col(k + 1);
        const auto g0 = s.advected.col(l * span + 2 * m + 2);
        const auto g1 = s.advected.col(l * span + 2 * m + 3);
        // element-average flux 1/2 (S F_i + S F_{i+1})
        out.col(c0) += inv_width * (1.5 * lo - 0.5 * (g0 + g1) - 0.5 * hi);
        out.col(c1) += inv_width * (0.5 * lo + 0.5 * (g0 + g1) - 1.5 * hi);
      }
    }
  }
}

void DGOperator::add_sources(const Eigen::MatrixXd& f, Eigen::MatrixXd& out) const {
  if (vacuum_) return;
  const double inv4pi = 0.25 / std::numbers::pi;
#pragma omp parallel for schedule(static)
  for (Eigen::Index c = 0; c < f.cols(); ++c) {
    const MediumCell& m = medium_[c];
    if (m.eta == 0.0 && m.kappa_a == 0.0 && m.kappa_s == 0.0) continue;
    const double iso = m.eta + m.kappa_s * inv4pi * integrals_.dot(f.col(c));
    out.col(c) += iso * unit_ - (m.kappa_a + m.kappa_s) * f.col(c);
  }
}

void DGOperator::rhs(const Eigen::MatrixXd& f, Eigen::MatrixXd& out) const {
  if (f.rows() != n_ || f.cols() != grid_.cells()) throw std::invalid_argument("state shape mismatch");
  if (!f.allFinite()) {
    for (Eigen::Index c = 0; c < f.cols(); ++c)
      for (int a = 0; a < n_; ++a)
        if (!std::isfinite(f(a, c))) throw NonFiniteError(static_cast<int>(c % grid_.nx), static_cast<int>(c / grid_.nx), a);
  }
  out.setZero(n_, grid_.cells());
  fill_padded(f);
  directional_flux(0, out);
  directional_flux(1, out);
  add_sources(f, out);
}

Eigen::MatrixXd DGOperator::rhs(const Eigen::MatrixXd& f) const {
  Eigen::MatrixXd out;
  rhs(f, out);
  return out;
}

void DGOperator::slope_limit(Eigen::MatrixXd& f, SlopeLimiter mode) const {
  switch (mode) {
    case SlopeLimiter::none: return;
    case SlopeLimiter::minmod: return limit_slopes(f, [](double a, double b, double c) { return minmod(a, b, c); });
    case SlopeLimiter::sminmod2: return limit_slopes(f, [](double a, double b, double c) { return sminmod2(a, b, c); });
    case SlopeLimiter::modminmod2:
      return limit_slopes(f, [](double a, double b, double c) { return modminmod2(a, b, c); });
  }
}

template <class Limiter>
void DGOperator::limit_slopes(Eigen::MatrixXd& f, Limiter limiter) const {
  for (int dir = 0; dir < 2; ++dir) {
    fill_padded(f);
    const int len = dir == 0 ? grid_.nx : grid_.ny;
    const int lines = dir == 0 ? grid_.ny : grid_.nx;
    const double width = 2.0 * (dir == 0 ? grid_.dx : grid_.dy);
    const double inv = 1.0 / width;
    auto pcol = [&](int along, int line) { return dir == 0 ? padded_index(along, line) : padded_index(line, along); };
    auto ccol = [&](int along, int line) { return dir == 0 ? grid_.index(along, line) : grid_.index(line, along); };
#pragma omp parallel for schedule(static)
    for (int line = 0; line < lines; ++line) {
      for (int m = 0; m < len / 2; ++m) {
        const int c0 = ccol(2 * m, line), c1 = ccol(2 * m + 1, line);
        const double* p0 = padded_.col(pcol(2 * m, line)).data();
        const double* p1 = padded_.col(pcol(2 * m + 1, line)).data();
        const double* prev0 = padded_.col(pcol(2 * m - 2, line)).data();
        const double* prev1 = padded_.col(pcol(2 * m - 1, line)).data();
        const double* next0 = padded_.col(pcol(2 * m + 2, line)).data();
        const double* next1 = padded_.col(pcol(2 * m + 3, line)).data();
        double* __restrict f0 = f.col(c0).data();
        double* __restrict f1 = f.col(c1).data();
        for (int a = 0; a < n_; ++a) {
          const double mean = 0.5 * (p0[a] + p1[a]);
          // inner slope over the half-element spacing, outer slopes over Dx
          const double sigma = limiter((p1[a] - p0[a]) * (2.0 * inv), (mean - 0.5 * (prev0[a] + prev1[a])) * inv,
                                       (0.5 * (next0[a] + next1[a]) - mean) * inv);
          // cell centres sit at -/+ Dx/4 from the element centre
          f0[a] = mean - 0.25 * width * sigma;
          f1[a] = mean + 0.25 * width * sigma;
        }
      }
    }
  }
}

}  // namespace geotransport
