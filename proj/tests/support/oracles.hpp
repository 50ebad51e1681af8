#pragma once

// Independent reference computations used only by the tests. None of these call the
// library routine they check.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

namespace oracle {

using Idx = std::array<int, 4>;

/// Rebuilds the 5d lift curvature from the three defining identities by closing the
/// partially known table under R(abcd) = -R(bacd) = -R(abdc) = R(cdab).
/// `base(x,y,z,w)` and `jpair(a,b) = <J e_a, e_b>` are on frame indices 0..3.
template <class Base, class JPair>
std::map<Idx, double> lift_by_closure(Base&& base, JPair&& jpair, int k) {
  const double k2 = static_cast<double>(k) * k;
  std::map<Idx, double> known;
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 4; ++y)
      for (int z = 0; z < 4; ++z)
        for (int w = 0; w < 4; ++w) {
          known[{x + 1, y + 1, z + 1, w + 1}] =
              base(x, y, z, w) + k2 * (-jpair(y, z) * jpair(x, w) + jpair(x, z) * jpair(y, w) + 2.0 * jpair(x, y) * jpair(z, w));
          known[{x + 1, y + 1, z + 1, 0}] = 0.0;
        }
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 4; ++y) known[{0, x + 1, y + 1, 0}] = x == y ? k2 : 0.0;

  bool grew = true;
  while (grew) {
    grew = false;
    const auto snapshot = known;
    for (const auto& [i, v] : snapshot) {
      const Idx images[3] = {{i[1], i[0], i[2], i[3]}, {i[0], i[1], i[3], i[2]}, {i[2], i[3], i[0], i[1]}};
      const double values[3] = {-v, -v, v};
      for (int t = 0; t < 3; ++t) {
        if (!known.contains(images[t])) {
          known[images[t]] = values[t];
          grew = true;
        }
      }
    }
  }
  // Whatever is still missing has a repeated slot inside an antisymmetric pair.
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b)
      for (int c = 0; c < 5; ++c)
        for (int d = 0; d < 5; ++d)
          if (!known.contains({a, b, c, d}) && (a == b || c == d)) known[{a, b, c, d}] = 0.0;
  return known;
}

/// Largest |R(e_a,e_b,e_c,e_d)| seen over `samples` Haar frames drawn with minstd_rand.
/// A lower bound for the true sup; used to bracket the library's optimiser.
template <class Tensor>
double sampled_max_abs(const Tensor& r, int dim, unsigned seed, int samples) {
  std::minstd_rand rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double best = 0.0;
  for (int s = 0; s < samples; ++s) {
    Eigen::MatrixXd g(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) g(i, j) = normal(rng);
    const Eigen::MatrixXd q = g.householderQr().householderQ();
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b)
        for (int c = 0; c < dim; ++c)
          for (int d = 0; d < dim; ++d) {
            double v = 0.0;
            for (int i = 0; i < dim; ++i)
              for (int j = 0; j < dim; ++j)
                for (int kk = 0; kk < dim; ++kk)
                  for (int l = 0; l < dim; ++l) v += q(i, a) * q(j, b) * q(kk, c) * q(l, d) * r(i, j, kk, l);
            best = std::max(best, std::abs(v));
          }
  }
  return best;
}

/// Gauss curvature of the round sphere of area `area` from its metric
/// E = rho^2, G = rho^2 sin^2(t) by central differences in the orthogonal-metric formula
/// K = -1/(2 sqrt(EG)) d/dt (G_t / sqrt(EG)).
inline double sphere_gauss_curvature_fd(double area, double t, double h = 1e-4) {
  const double rho2 = area / (4.0 * std::numbers::pi);
  const auto e = [&](double) { return rho2; };
  const auto g = [&](double s) { return rho2 * std::sin(s) * std::sin(s); };
  const auto g_t = [&](double s) { return (g(s + h) - g(s - h)) / (2.0 * h); };
  const auto inner = [&](double s) { return g_t(s) / std::sqrt(e(s) * g(s)); };
  const double d_inner = (inner(t + h) - inner(t - h)) / (2.0 * h);
  return -d_inner / (2.0 * std::sqrt(e(t) * g(t)));
}

/// 1 / (xi^2 + beta xi + c) expanded at xi -> +infinity: sum_n t_n xi^{-2-n} with
/// t_0 = 1, t_1 = -beta, t_n = -beta t_{n-1} - c t_{n-2}.
inline std::vector<std::complex<double>> resolvent_series(std::complex<double> beta, std::complex<double> c, int depth) {
  std::vector<std::complex<double>> t(static_cast<std::size_t>(depth));
  for (int n = 0; n < depth; ++n) {
    if (n == 0) t[0] = 1.0;
    else if (n == 1) t[1] = -beta;
    else t[static_cast<std::size_t>(n)] = -beta * t[static_cast<std::size_t>(n - 1)] - c * t[static_cast<std::size_t>(n - 2)];
  }
  return t;
}

/// vol(S^1) * int_{S^2} f(R_phi x) dA by the midpoint rule in (colatitude, longitude) with
/// the sin(t) area element; independent of the Gauss-Legendre product rule.
template <class Density>
double rotated_pullback_midpoint(Density&& f, double phi, int n_t, int n_p) {
  const double pi = std::numbers::pi;
  double sum = 0.0;
  for (int i = 0; i < n_t; ++i) {
    const double t = (i + 0.5) * pi / n_t;
    for (int j = 0; j < n_p; ++j) {
      const double p = (j + 0.5) * 2.0 * pi / n_p + phi;
      const Eigen::Vector3d y(std::sin(t) * std::cos(p), std::sin(t) * std::sin(p), std::cos(t));
      sum += f(y) * std::sin(t) * (pi / n_t) * (2.0 * pi / n_p);
    }
  }
  return 2.0 * pi * sum;
}

}  // namespace oracle
