#include "geotransport/angular_basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "geotransport/quadrature.hpp"
#include "geotransport/spherical_harmonics.hpp"

namespace geotransport {

std::string_view to_string(BasisKind kind) {
  switch (kind) {
    case BasisKind::femn: return "femn";
    case BasisKind::sn: return "sn";
    case BasisKind::fpn: return "fpn";
  }
  return "unknown";
}

BasisKind parse_basis_kind(std::string_view name) {
  if (name == "femn") return BasisKind::femn;
  if (name == "sn") return BasisKind::sn;
  if (name == "fpn") return BasisKind::fpn;
  throw std::invalid_argument("unknown scheme '" + std::string(name) + "' (expected femn, sn or fpn)");
}

AngularBasis::AngularBasis(BasisKind kind, int resolution, std::shared_ptr<const GeodesicGrid> grid)
    : kind_(kind), resolution_(resolution), grid_(std::move(grid)) {
  size_ = grid_ ? grid_->num_points() : sh_count(resolution);
  compute_moments();
}

AngularBasis AngularBasis::femn(int k) {
  return AngularBasis(BasisKind::femn, k, std::make_shared<const GeodesicGrid>(build_geodesic_grid(k)));
}

AngularBasis AngularBasis::sn(int k) {
  return AngularBasis(BasisKind::sn, k, std::make_shared<const GeodesicGrid>(build_geodesic_grid(k)));
}

AngularBasis AngularBasis::fpn(int l_max) {
  if (l_max < 0) throw std::invalid_argument("l_max must be non-negative");
  return AngularBasis(BasisKind::fpn, l_max, nullptr);
}

AngularBasis AngularBasis::make(BasisKind kind, int resolution) {
  switch (kind) {
    case BasisKind::femn: return femn(resolution);
    case BasisKind::sn: return sn(resolution);
    case BasisKind::fpn: return fpn(resolution);
  }
  throw std::invalid_argument("unknown basis kind");
}

void AngularBasis::for_each_node(NodeVisitor& visitor) const {
  if (kind_ == BasisKind::fpn) {
    // Product rule: Gauss-Legendre in cos(theta) times uniform phi; exact for
    // the band-limited products assembled from these harmonics.
    const int l_max = resolution_;
    const GaussLegendre gl = gauss_legendre(l_max + 2);
    const int n_phi = 2 * l_max + 4;
    std::vector<int> indices(size_);
    for (int a = 0; a < size_; ++a) indices[a] = a;
    std::vector<double> values(size_);
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double mu = gl.nodes[i];
      const double s = std::sqrt(1.0 - mu * mu);
      for (int j = 0; j < n_phi; ++j) {
        const double phi = 2.0 * std::numbers::pi * (j + 0.5) / n_phi;
        const Vec3 omega(s * std::cos(phi), s * std::sin(phi), mu);
        const Eigen::VectorXd y = real_spherical_harmonics(l_max, omega);
        std::copy(y.data(), y.data() + size_, values.begin());
        visitor.visit(omega, gl.weights[i] * 2.0 * std::numbers::pi / n_phi, indices, values);
      }
    }
    return;
  }

  const GeodesicGrid& grid = *grid_;
  const SphericalTriangleQuadrature quad(SphericalTriangleQuadrature::default_subdivisions(grid.level));
  if (kind_ == BasisKind::femn) {
    static constexpr std::array<std::array<double, 3>, 3> whole{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    for (int t = 0; t < grid.num_triangles(); ++t) {
      const auto& tri = grid.triangles[t];
      quad.for_each_node(grid, t, whole, [&](const Vec3& omega, const std::array<double, 3>& xi, double w) {
        // 2 xi1 + xi2 + xi3 - 1 reduces to the vertex's own coordinate.
        const std::array<double, 3> vals{2 * xi[0] + xi[1] + xi[2] - 1, xi[0] + 2 * xi[1] + xi[2] - 1,
                                         xi[0] + xi[1] + 2 * xi[2] - 1};
        visitor.visit(omega, w, tri, vals);
      });
    }
    return;
  }

  // SN: the cell of local vertex a inside a triangle is the kite bounded by
  // the vertex, the two adjacent edge midpoints and the centroid.
  constexpr double third = 1.0 / 3.0;
  for (int t = 0; t < grid.num_triangles(); ++t) {
    const auto& tri = grid.triangles[t];
    for (int a = 0; a < 3; ++a) {
      const int b = (a + 1) % 3, c = (a + 2) % 3;
      std::array<double, 3> va{}, mab{}, mac{};
      va[a] = 1.0;
      mab[a] = mab[b] = 0.5;
      mac[a] = mac[c] = 0.5;
      const std::array<double, 3> centroid{third, third, third};
      const std::array<int, 1> idx{tri[a]};
      const std::array<double, 1> one{1.0};
      auto visit = [&](const Vec3& omega, const std::array<double, 3>&, double w) {
        visitor.visit(omega, w, idx, one);
      };
      quad.for_each_node(grid, t, {va, mab, centroid}, visit);
      quad.for_each_node(grid, t, {va, centroid, mac}, visit);
    }
  }
}

void AngularBasis::compute_moments() {
  struct MomentVisitor final : NodeVisitor {
    Eigen::VectorXd v;
    Eigen::Matrix<double, 3, Eigen::Dynamic> first;
    Eigen::Matrix<double, 6, Eigen::Dynamic> second;
    void visit(const Vec3& o, double w, std::span<const int> idx, std::span<const double> val) override {
      const double q[6] = {o.x() * o.x(), o.y() * o.y(), o.z() * o.z(), o.x() * o.y(), o.x() * o.z(), o.y() * o.z()};
      for (std::size_t k = 0; k < idx.size(); ++k) {
        const double wv = w * val[k];
        const int a = idx[k];
        v[a] += wv;
        first.col(a) += wv * o;
        for (int r = 0; r < 6; ++r) second(r, a) += wv * q[r];
      }
    }
  } acc;
  acc.v = Eigen::VectorXd::Zero(size_);
  acc.first = Eigen::Matrix<double, 3, Eigen::Dynamic>::Zero(3, size_);
  acc.second = Eigen::Matrix<double, 6, Eigen::Dynamic>::Zero(6, size_);
  for_each_node(acc);
  integrals_ = std::move(acc.v);
  if (kind_ == BasisKind::fpn) {
    // Orthogonality to Y_00 makes every other integral vanish exactly.
    integrals_.setZero();
    integrals_[0] = std::sqrt(4.0 * std::numbers::pi);
  }
  first_ = std::move(acc.first);
  second_ = std::move(acc.second);
}

double AngularBasis::eval(int a, const Vec3& omega) const {
  if (a < 0 || a >= size_) throw std::out_of_range("basis index out of range");
  switch (kind_) {
    case BasisKind::femn: return fem_basis_eval(*grid_, a, omega);
    case BasisKind::sn: return sn_basis_eval(*grid_, a, omega);
    case BasisKind::fpn: {
      const ShMode mode = sh_mode(a);
      return real_spherical_harmonic(mode.l, mode.m, omega);
    }
  }
  return 0.0;
}

Eigen::VectorXd AngularBasis::isotropic(double energy) const {
  if (kind_ == BasisKind::fpn) {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(size_);
    f[0] = energy / std::sqrt(4.0 * std::numbers::pi);
    return f;
  }
  return Eigen::VectorXd::Constant(size_, energy / (4.0 * std::numbers::pi));
}

double fem_basis_eval(const GeodesicGrid& grid, int a, const Vec3& omega) {
  const TriangleLocation loc = locate_triangle(grid, omega);
  const auto& tri = grid.triangles[loc.triangle];
  const auto& xi = loc.bary;
  for (int k = 0; k < 3; ++k) {
    if (tri[k] == a) return 2.0 * xi[k] + xi[(k + 1) % 3] + xi[(k + 2) % 3] - 1.0;
  }
  return 0.0;
}

int sn_owner(const GeodesicGrid& grid, const Vec3& omega) {
  const TriangleLocation loc = locate_triangle(grid, omega);
  const auto& tri = grid.triangles[loc.triangle];
  const auto& xi = loc.bary;
  for (int k = 0; k < 3; ++k) {
    if (xi[k] >= xi[(k + 1) % 3] && xi[k] > xi[(k + 2) % 3]) return tri[k];
  }
  return std::min({tri[0], tri[1], tri[2]});
}

double sn_basis_eval(const GeodesicGrid& grid, int a, const Vec3& omega) {
  return sn_owner(grid, omega) == a ? 1.0 : 0.0;
}

Eigen::MatrixXd dissipation_from_factorization(const EigenFactorization& eig, double v) {
  const Eigen::VectorXd speeds = eig.values.cwiseAbs().cwiseMax(v);
  return eig.right * speeds.asDiagonal() * eig.left;
}

AngularMatrices assemble_matrices(const AngularBasis& basis, double dissipation) {
  if (!(dissipation >= 0.0)) throw std::invalid_argument("dissipation parameter must be non-negative");
  const int n = basis.size();

  struct MatrixVisitor final : AngularBasis::NodeVisitor {
    Eigen::MatrixXd m;
    std::array<Eigen::MatrixXd, 3> s;
    // FPN lists every mode at every node; batch those into dense products.
    std::vector<Eigen::VectorXd> dense_values;
    std::vector<Vec3> dense_omega;
    std::vector<double> dense_weight;
    bool dense = false;
    void visit(const Vec3& o, double w, std::span<const int> idx, std::span<const double> val) override {
      if (dense) {
        dense_values.emplace_back(Eigen::Map<const Eigen::VectorXd>(val.data(), val.size()));
        dense_omega.push_back(o);
        dense_weight.push_back(w);
        return;
      }
      for (std::size_t p = 0; p < idx.size(); ++p) {
        for (std::size_t q = 0; q < idx.size(); ++q) {
          const double wv = w * val[p] * val[q];
          m(idx[p], idx[q]) += wv;
          for (int i = 0; i < 3; ++i) s[i](idx[p], idx[q]) += wv * o[i];
        }
      }
    }
  } acc;
  acc.m = Eigen::MatrixXd::Zero(n, n);
  for (auto& si : acc.s) si = Eigen::MatrixXd::Zero(n, n);
  acc.dense = basis.kind() == BasisKind::fpn;
  basis.for_each_node(acc);
  if (acc.dense) {
    const int q = static_cast<int>(acc.dense_values.size());
    Eigen::MatrixXd y(n, q);
    for (int j = 0; j < q; ++j) y.col(j) = acc.dense_values[j];
    Eigen::VectorXd w(q);
    for (int j = 0; j < q; ++j) w[j] = acc.dense_weight[j];
    acc.m = y * w.asDiagonal() * y.transpose();
    for (int i = 0; i < 3; ++i) {
      Eigen::VectorXd wi(q);
      for (int j = 0; j < q; ++j) wi[j] = w[j] * acc.dense_omega[j][i];
      acc.s[i] = y * wi.asDiagonal() * y.transpose();
    }
  }

  AngularMatrices out;
  out.kind = basis.kind();
  out.size = n;
  out.resolution = basis.resolution();
  out.dissipation = dissipation;

  auto symmetrize = [&](Eigen::MatrixXd& x) {
    out.assembly_asymmetry = std::max(out.assembly_asymmetry, (x - x.transpose()).cwiseAbs().maxCoeff());
    x = 0.5 * (x + x.transpose()).eval();
  };
  symmetrize(acc.m);
  for (auto& si : acc.s) symmetrize(si);
  out.mass = std::move(acc.m);
  out.stiffness = std::move(acc.s);

  if (basis.kind() == BasisKind::fpn) {
    out.lumped_mass = Eigen::VectorXd::Ones(n);
  } else {
    out.lumped_mass = out.mass.rowwise().sum();
  }
  for (int a = 0; a < n; ++a) {
    if (!(out.lumped_mass[a] > 0.0))
      throw std::runtime_error("lumped mass matrix has a non-positive diagonal entry at index " + std::to_string(a));
  }

  const Eigen::VectorXd inv_mass = out.lumped_mass.cwiseInverse();
  const Eigen::VectorXd inv_sqrt = out.lumped_mass.cwiseSqrt().cwiseInverse();
  const Eigen::VectorXd sqrt_mass = out.lumped_mass.cwiseSqrt();
  for (int i = 0; i < 3; ++i) {
    out.advection[i] = inv_mass.asDiagonal() * out.stiffness[i];
    const Eigen::MatrixXd sym = inv_sqrt.asDiagonal() * out.stiffness[i] * inv_sqrt.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigen-decomposition of advection matrix failed");
    EigenFactorization& eig = out.eigen[i];
    eig.values = solver.eigenvalues();
    eig.right = inv_sqrt.asDiagonal() * solver.eigenvectors();
    eig.left = solver.eigenvectors().transpose() * sqrt_mass.asDiagonal();
    out.dissipation_matrix[i] = dissipation_from_factorization(eig, dissipation);
  }
  return out;
}

}  // namespace geotransport
