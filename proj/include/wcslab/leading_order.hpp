#pragma once

// Leading-order first Chern class of a family of loops in S^2, checked against
// vol(S^1) times the pullback at a fixed basepoint.
//
// Parameter space K = S^2, loops parametrised by theta in [0, 2pi); the family sends
// x in K to the loop theta -> R_{theta + phase}(x), rotation about the z-axis.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "wcslab/errors.hpp"

namespace wcslab::leading_order {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct SphereQuadrature {
  std::vector<Vec3> points;
  std::vector<double> weights;  // sum to 4 pi
};

struct LoopQuadrature {
  std::vector<double> angles;
  std::vector<double> weights;  // sum to 2 pi
};

/// Gauss-Legendre nodes/weights on [-1, 1] via the eigen-decomposition of the Jacobi matrix.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

[[nodiscard]] inline GaussLegendre gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: need at least one node");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double beta = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = beta;
    jacobi(k - 1, k) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  GaussLegendre gl;
  for (int i = 0; i < n; ++i) {
    gl.nodes.push_back(eig.eigenvalues()(i));
    gl.weights.push_back(2.0 * eig.eigenvectors()(0, i) * eig.eigenvectors()(0, i));
  }
  return gl;
}

/// Product rule: Gauss-Legendre in cos(colatitude) times the uniform rule in longitude.
[[nodiscard]] inline SphereQuadrature sphere_quadrature(int n_colatitude, int n_longitude) {
  if (n_colatitude < 2 || n_longitude < 4) throw DomainError("sphere_quadrature: grid too coarse");
  const GaussLegendre gl = gauss_legendre(n_colatitude);
  SphereQuadrature q;
  const double dphi = 2.0 * std::numbers::pi / n_longitude;
  for (int i = 0; i < n_colatitude; ++i) {
    const double z = gl.nodes[static_cast<std::size_t>(i)];
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    for (int j = 0; j < n_longitude; ++j) {
      const double phi = j * dphi;
      q.points.emplace_back(rho * std::cos(phi), rho * std::sin(phi), z);
      q.weights.push_back(gl.weights[static_cast<std::size_t>(i)] * dphi);
    }
  }
  return q;
}

[[nodiscard]] inline LoopQuadrature loop_quadrature(int n) {
  if (n < 1) throw DomainError("loop_quadrature: need at least one node");
  LoopQuadrature q;
  for (int j = 0; j < n; ++j) {
    q.angles.push_back(2.0 * std::numbers::pi * j / n);
    q.weights.push_back(2.0 * std::numbers::pi / n);
  }
  return q;
}

[[nodiscard]] inline Mat3 rotation_z(double angle) {
  Mat3 r;
  r << std::cos(angle), -std::sin(angle), 0.0, std::sin(angle), std::cos(angle), 0.0, 0.0, 0.0, 1.0;
  return r;
}

/// The rotation family u(x)(theta) = R_{theta + phase}(x).
class MappedFamily {
 public:
  /// `grid` sets the longitude and loop resolution; colatitude uses grid / 2 nodes.
  explicit MappedFamily(int grid, double phase = 0.0)
      : grid_(grid),
        phase_(phase),
        sphere_(sphere_quadrature(std::max(2, grid / 2), grid)),
        loop_(loop_quadrature(grid)) {
    if (grid < 16) throw DomainError("MappedFamily: grid must be >= 16");
  }

  [[nodiscard]] int grid() const noexcept { return grid_; }
  [[nodiscard]] double phase() const noexcept { return phase_; }
  [[nodiscard]] const SphereQuadrature& parameter_grid() const noexcept { return sphere_; }
  [[nodiscard]] const LoopQuadrature& loop_grid() const noexcept { return loop_; }

  [[nodiscard]] Vec3 map(const Vec3& x, double theta) const { return rotation_z(theta + phase_) * x; }

  /// Differential of x -> u(x)(theta) as a map of R^3 (restricted to T_x S^2 by the caller).
  [[nodiscard]] Mat3 differential(const Vec3& /*x*/, double theta) const { return rotation_z(theta + phase_); }

  /// Same family precomposed with the loop reparametrisation theta -> theta + shift.
  [[nodiscard]] MappedFamily shifted(double shift) const { return MappedFamily(grid_, phase_ + shift); }

 private:
  int grid_;
  double phase_;
  SphereQuadrature sphere_;
  LoopQuadrature loop_;
};

/// Line bundle of charge q on S^2 with (i/2pi) Omega = f dA, f(y) = q/(4pi) (1 + y_x / 2).
/// The non-constant term integrates to zero but makes each pullback integrand theta-dependent.
struct LineBundleCurvature {
  int charge = 0;

  [[nodiscard]] double chern_density(const Vec3& y) const {
    return charge / (4.0 * std::numbers::pi) * (1.0 + 0.5 * y.x());
  }
};

/// (i/2pi) int_{S^2} Omega on the parameter grid.
[[nodiscard]] inline double total_charge(const SphereQuadrature& grid, const LineBundleCurvature& bundle) {
  double sum = 0.0;
  for (std::size_t i = 0; i < grid.points.size(); ++i) sum += grid.weights[i] * bundle.chern_density(grid.points[i]);
  return sum;
}

namespace detail {

/// Oriented tangent basis of S^2 at x with v1 x v2 parallel to x.
inline void tangent_basis(const Vec3& x, Vec3& v1, Vec3& v2) {
  const Vec3 seed = std::abs(x.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
  v1 = seed.cross(x).normalized();
  v2 = x.cross(v1);
}

/// Factor by which f^*(dA) multiplies dA at x, for f: S^2 -> S^2 with differential df.
inline double area_pullback_factor(const Vec3& x, const Vec3& fx, const Mat3& df) {
  Vec3 v1;
  Vec3 v2;
  tangent_basis(x, v1, v2);
  return fx.dot((df * v1).cross(df * v2)) / x.dot(v1.cross(v2));
}

/// int_K (u_theta)^* (i/2pi) tr Omega.
inline double pullback_integral(const MappedFamily& fam, const LineBundleCurvature& bundle, double theta) {
  const auto& k = fam.parameter_grid();
  double sum = 0.0;
  for (std::size_t i = 0; i < k.points.size(); ++i) {
    const Vec3& x = k.points[i];
    const Vec3 y = fam.map(x, theta);
    sum += k.weights[i] * bundle.chern_density(y) * area_pullback_factor(x, y, fam.differential(x, theta));
  }
  return sum;
}

}  // namespace detail

/// Leading-order class paired with [K]: int_{S^1} [ int_K (u_theta)^* (i/2pi) tr Omega ] dtheta.
[[nodiscard]] inline double c_lo_pairing(const MappedFamily& fam, const LineBundleCurvature& bundle) {
  const auto& loop = fam.loop_grid();
  double sum = 0.0;
  for (std::size_t j = 0; j < loop.angles.size(); ++j) sum += loop.weights[j] * detail::pullback_integral(fam, bundle, loop.angles[j]);
  return sum;
}

/// vol(S^1) * int_K (ev_{n0} o u)^* (i/2pi) tr Omega, with n0 the loop-grid node `index`.
[[nodiscard]] inline double basepoint_side(const MappedFamily& fam, const LineBundleCurvature& bundle, int index) {
  const auto& loop = fam.loop_grid();
  if (index < 0 || index >= static_cast<int>(loop.angles.size())) throw DomainError("rhs: basepoint index off the loop grid");
  return 2.0 * std::numbers::pi * detail::pullback_integral(fam, bundle, loop.angles[static_cast<std::size_t>(index)]);
}

/// Basepoint given as an angle; it must coincide with a loop-grid node.
[[nodiscard]] inline double basepoint_side(const MappedFamily& fam, const LineBundleCurvature& bundle, double n0) {
  const auto& loop = fam.loop_grid();
  const double two_pi = 2.0 * std::numbers::pi;
  const double wrapped = n0 - two_pi * std::floor(n0 / two_pi);
  for (std::size_t j = 0; j < loop.angles.size(); ++j) {
    const double gap = std::abs(wrapped - loop.angles[j]);
    if (gap < 1e-12 || std::abs(gap - two_pi) < 1e-12) return basepoint_side(fam, bundle, static_cast<int>(j));
  }
  throw DomainError("rhs: basepoint is not a loop-grid node");
}

struct IdentityReport {
  int charge = 0;
  int grid = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double relative_error = 0.0;
  bool passes = false;
};

inline constexpr double kIdentityTolerance = 1e-6;

/// |lhs - rhs| / max(1, |rhs|), basepoint at theta = 0.
[[nodiscard]] inline IdentityReport verify_leading_identity(const MappedFamily& fam, const LineBundleCurvature& bundle) {
  IdentityReport r;
  r.charge = bundle.charge;
  r.grid = fam.grid();
  r.lhs = c_lo_pairing(fam, bundle);
  r.rhs = basepoint_side(fam, bundle, 0);
  r.relative_error = std::abs(r.lhs - r.rhs) / std::max(1.0, std::abs(r.rhs));
  r.passes = r.relative_error <= kIdentityTolerance;
  return r;
}

}  // namespace wcslab::leading_order
