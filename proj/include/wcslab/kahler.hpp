#pragma once

// Frame-homogeneous Kahler surfaces. Every curvature tensor is expressed in the
// J-adapted frame (e2, Je2, e3, Je3), i.e. frame indices 0..3 with J e0 = e1, J e2 = e3.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wcslab/errors.hpp"
#include "wcslab/tensor.hpp"

namespace wcslab {

struct KahlerSurface {
  std::string name;
  std::vector<std::pair<std::string, double>> params;
  RiemannTensor curvature{4};
  ComplexStructure J;
  double volume = 1.0;
  int signature = 0;
  bool curvature_known = true;
  double r_inf = 0.0;

  [[nodiscard]] std::optional<double> param(const std::string& key) const {
    for (const auto& [k, v] : params) {
      if (k == key) return v;
    }
    return std::nullopt;
  }
};

namespace detail {

inline double metric(int a, int b) { return a == b ? 1.0 : 0.0; }

/// Algebraic curvature tensor of constant sectional curvature 1 on span(idx).
inline double round_part(int x, int y, int z, int w) {
  return metric(x, w) * metric(y, z) - metric(x, z) * metric(y, w);
}

/// The J-part of the complex space form:
/// <JX,W><JY,Z> - <JX,Z><JY,W> + 2<JX,Y><JW,Z>.
inline double j_part(const ComplexStructure& j, int x, int y, int z, int w) {
  return j.pairing(x, w) * j.pairing(y, z) - j.pairing(x, z) * j.pairing(y, w) +
         2.0 * j.pairing(x, y) * j.pairing(w, z);
}

}  // namespace detail

/// Curvature of constant holomorphic sectional curvature c:
/// R = (c/4)[<X,W><Y,Z> - <X,Z><Y,W> + <JX,W><JY,Z> - <JX,Z><JY,W> + 2<JX,Y><JW,Z>].
[[nodiscard]] inline RiemannTensor complex_space_form(double c, const ComplexStructure& j = {}) {
  return RiemannTensor::generate(4, [&](int x, int y, int z, int w) {
    return 0.25 * c * (detail::round_part(x, y, z, w) + detail::j_part(j, x, y, z, w));
  });
}

/// Product of two round surfaces, curvatures k1 on span(e0,e1) and k2 on span(e2,e3).
[[nodiscard]] inline RiemannTensor product_of_surfaces(double k1, double k2) {
  return RiemannTensor::generate(4, [&](int x, int y, int z, int w) {
    const auto block = [](int i) { return i / 2; };
    if (block(x) != block(y) || block(y) != block(z) || block(z) != block(w)) return 0.0;
    return (block(x) == 0 ? k1 : k2) * detail::round_part(x, y, z, w);
  });
}

/// Max violation of R(JX,JY,Z,W) = R(X,Y,Z,W) over frame vectors.
[[nodiscard]] inline double j_invariance_violation(const RiemannTensor& r, const ComplexStructure& j) {
  if (r.dim() != 4) throw DomainError("j_invariance_violation: curvature must be 4-dimensional");
  const Matrix& jm = j.matrix();
  double worst = 0.0;
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 4; ++y)
      for (int z = 0; z < 4; ++z)
        for (int w = 0; w < 4; ++w) {
          double rotated = 0.0;
          for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) rotated += jm(a, x) * jm(b, y) * r(a, b, z, w);
          worst = std::max(worst, std::abs(rotated - r(x, y, z, w)));
        }
  return worst;
}

/// Unit-period flat torus with the standard complex structure.
[[nodiscard]] inline KahlerSurface flat_torus() {
  KahlerSurface s;
  s.name = "t4";
  s.curvature = RiemannTensor(4);
  s.volume = 1.0;
  s.signature = 0;
  s.r_inf = 0.0;
  return s;
}

/// Holomorphic sectional curvature of the catalog Fubini-Study metric. This is the value
/// at which the closed-form WCS density vanishes at k = +-1 (the Hopf normalization: the
/// k = 1 circle bundle is the round S^5).
inline constexpr double kFubiniStudyCurvature = 4.0;

[[nodiscard]] inline KahlerSurface cp2_fubini_study() {
  constexpr double c = kFubiniStudyCurvature;
  constexpr double pi = std::numbers::pi;
  KahlerSurface s;
  s.name = "cp2";
  s.curvature = complex_space_form(c);
  // vol(CP^2) = (pi^2/2)(4/c)^2; a projective line is totally geodesic with curvature c.
  s.volume = 0.5 * pi * pi * (4.0 / c) * (4.0 / c);
  s.params = {{"c", c}, {"line_area", 4.0 * pi / c}};
  s.signature = 1;
  s.r_inf = c;
  return s;
}

/// CP1 x CP1 with Kahler class a*w1 + b*w2, realised by the metric a*g1 + b*g2 on a
/// product of unit round spheres.
[[nodiscard]] inline KahlerSurface product_cp1(int a, int b) {
  if (a <= 0 || b <= 0) throw DomainError("product_cp1: a and b must be positive integers");
  constexpr double pi = std::numbers::pi;
  const double k1 = 1.0 / a;
  const double k2 = 1.0 / b;
  KahlerSurface s;
  s.name = "cp1xcp1";
  s.params = {{"a", static_cast<double>(a)}, {"b", static_cast<double>(b)}, {"k1", k1}, {"k2", k2}};
  s.curvature = product_of_surfaces(k1, k2);
  s.volume = (4.0 * pi * a) * (4.0 * pi * b);
  s.signature = 0;
  s.r_inf = std::max(k1, k2);
  return s;
}

/// Bounds-only surface: only the scalars consumed by the sufficient inequality.
[[nodiscard]] inline KahlerSurface generic_bounds(int sigma, double volume, double r_inf) {
  if (!(volume > 0.0) || !std::isfinite(volume)) throw DomainError("generic_bounds: volume must be positive");
  if (!(r_inf >= 0.0) || !std::isfinite(r_inf)) throw DomainError("generic_bounds: r_inf must be nonnegative");
  KahlerSurface s;
  s.name = "generic";
  s.params = {{"sigma", static_cast<double>(sigma)}, {"vol", volume}, {"r_inf", r_inf}};
  s.volume = volume;
  s.signature = sigma;
  s.r_inf = r_inf;
  s.curvature_known = false;
  return s;
}

/// sigma(M) = (1/3) integral p1; exact for frame-constant curvature.
[[nodiscard]] inline double signature_from_curvature(const KahlerSurface& s) {
  if (!s.curvature_known) {
    throw UnsupportedOperation("signature_from_curvature: surface '" + s.name + "' is bounds-only");
  }
  return pontrjagin_density(s.curvature) * s.volume / 3.0;
}

}  // namespace wcslab
