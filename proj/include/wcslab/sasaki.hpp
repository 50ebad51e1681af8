#pragma once

// Curvature of the circle-bundle total space over a Kahler surface at level k.
// Frame: index 0 is the unit vertical vector xi, indices 1..4 are the horizontal lifts
// of the adapted base frame (e2, Je2, e3, Je3).

#include <numbers>
#include <string>
#include <vector>

#include "wcslab/errors.hpp"
#include "wcslab/kahler.hpp"
#include "wcslab/tensor.hpp"

namespace wcslab {

inline constexpr int kVertical = 0;

/// Length of a fiber orbit, parametrised by theta in [0, 2pi] with unit-speed tangent xi.
inline constexpr double kFiberLength = 2.0 * std::numbers::pi;

struct SasakiLift {
  KahlerSurface base;
  int k = 0;
  RiemannTensor curvature5{5};
  double fiber_length = kFiberLength;
  double total_volume = 0.0;
};

/// fiber_length * vol(base).
[[nodiscard]] inline double total_volume(const SasakiLift& lift) { return lift.fiber_length * lift.base.volume; }

/// Assembles the 5-dimensional curvature from the three lift identities
///   Rbar(X,Y,Z,W)   = R(X,Y,Z,W) + k^2[-<JY,Z><JX,W> + <JX,Z><JY,W> + 2<JX,Y><JZ,W>]
///   Rbar(X,Y,Z,xi)  = 0
///   Rbar(xi,X,Y,xi) = k^2 <X,Y>
/// plus the antisymmetries they imply. The symmetries of the result are checked, not
/// imposed: a violation is reported as a StructuralError.
[[nodiscard]] inline SasakiLift lift_curvature(const KahlerSurface& base, int k) {
  if (!base.curvature_known) {
    throw UnsupportedOperation("lift_curvature: surface '" + base.name + "' is bounds-only");
  }
  const double k2 = static_cast<double>(k) * static_cast<double>(k);
  const ComplexStructure& j = base.J;
  constexpr int n = 5;
  std::vector<double> comp(n * n * n * n, 0.0);
  auto at = [&](int a, int b, int c, int d) -> double& { return comp[((a * n + b) * n + c) * n + d]; };

  // Horizontal block.
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 4; ++y)
      for (int z = 0; z < 4; ++z)
        for (int w = 0; w < 4; ++w) {
          const double correction = -j.pairing(y, z) * j.pairing(x, w) + j.pairing(x, z) * j.pairing(y, w) +
                                    2.0 * j.pairing(x, y) * j.pairing(z, w);
          at(x + 1, y + 1, z + 1, w + 1) = base.curvature(x, y, z, w) + k2 * correction;
        }

  // Vertical block: the (xi, X, Y, xi) pattern and its images under the two antisymmetries.
  for (int x = 1; x < n; ++x) {
    at(kVertical, x, x, kVertical) = k2;
    at(x, kVertical, x, kVertical) = -k2;
    at(kVertical, x, kVertical, x) = -k2;
    at(x, kVertical, kVertical, x) = k2;
  }
  // Every pattern with one or three vertical slots, and (xi,xi,.,.) / (.,.,xi,xi), stays zero.

  SasakiLift lift;
  lift.base = base;
  lift.k = k;
  lift.curvature5 = RiemannTensor(n, std::move(comp));
  lift.total_volume = total_volume(lift);

  const SymmetryViolation v = symmetry_violation(lift.curvature5);
  if (v.max() > 1e-12) {
    throw StructuralError("lift_curvature: assembled tensor violates curvature identities (antisymmetry " +
                          std::to_string(v.antisymmetry) + ", pair " + std::to_string(v.pair_symmetry) +
                          ", Bianchi " + std::to_string(v.bianchi) + ")");
  }
  return lift;
}

}  // namespace wcslab
