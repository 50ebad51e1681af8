#pragma once

// Wodzicki-Chern-Simons densities of fiber-rotation loops on circle bundles over
// Kahler surfaces, by two independent routes:
//   * closed form: a polynomial in k with coefficients from the base curvature;
//   * permutation route: the signed sum over S_{2m-1} of tr[A_{s(1)} Omega(..)...Omega(..)]
//     built directly from the lifted 5-dimensional curvature.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "wcslab/errors.hpp"
#include "wcslab/kahler.hpp"
#include "wcslab/sasaki.hpp"
#include "wcslab/tensor.hpp"

namespace wcslab {

// ---------------------------------------------------------------------------
// Closed form
// ---------------------------------------------------------------------------

struct BracketTerm {
  int coefficient;
  std::array<int, 4> index;  // adapted-frame indices: 0 = e2, 1 = Je2, 2 = e3, 3 = Je3
};

/// The five curvature terms multiplying 32k^2 in the closed-form density:
/// 3R(e2,Je2,e3,Je3) - R(e2,e3,e2,e3) - R(e2,Je3,e2,Je3) + R(e2,Je2,e2,Je2) + R(e3,Je3,e3,Je3).
inline constexpr std::array<BracketTerm, 5> kBracketTerms = {{
    {3, {0, 1, 2, 3}},
    {-1, {0, 2, 0, 2}},
    {-1, {0, 3, 0, 3}},
    {1, {0, 1, 0, 1}},
    {1, {2, 3, 2, 3}},
}};

[[nodiscard]] inline double curvature_bracket(const RiemannTensor& base) {
  double s = 0.0;
  for (const auto& t : kBracketTerms) s += t.coefficient * base(t.index[0], t.index[1], t.index[2], t.index[3]);
  return s;
}

/// Sum of |coefficients| of the bracket: the bracket is bounded below by -7|R|_inf.
[[nodiscard]] constexpr int bracket_abs_coefficient_sum() {
  int s = 0;
  for (const auto& t : kBracketTerms) s += t.coefficient < 0 ? -t.coefficient : t.coefficient;
  return s;
}

/// f = (k^2/30){ 32pi^2 p1(R) + 32k^2 [bracket] + 192k^4 }, the density of the pulled-back
/// CS^W_5 against the volume form of the total space.
[[nodiscard]] inline double density_closed_form(const SasakiLift& lift) {
  if (!lift.base.curvature_known) {
    throw UnsupportedOperation("density_closed_form: surface '" + lift.base.name + "' is bounds-only");
  }
  constexpr double pi = std::numbers::pi;
  const double k2 = static_cast<double>(lift.k) * static_cast<double>(lift.k);
  const double p1 = pontrjagin_density(lift.base.curvature);
  const double bracket = curvature_bracket(lift.base.curvature);
  return k2 / 30.0 * (32.0 * pi * pi * p1 + 32.0 * k2 * bracket + 192.0 * k2 * k2);
}

[[nodiscard]] inline double integral_csw5(const SasakiLift& lift) {
  return density_closed_form(lift) * lift.total_volume;
}

/// The s-Sobolev connection scales the WCS form linearly in s.
[[nodiscard]] inline double s_scaled_density(const SasakiLift& lift, double s) { return s * density_closed_form(lift); }

// ---------------------------------------------------------------------------
// Sufficient inequality
// ---------------------------------------------------------------------------

inline constexpr double kBoundSignatureCoefficient = 96.0;   // times pi^2
inline constexpr double kBoundCurvatureCoefficient = 224.0;  // 32 * 7
inline constexpr double kBoundConstantCoefficient = 192.0;

struct SufficientBound {
  double lhs = 0.0;
  bool holds = false;
};

/// k^2 (96pi^2 sigma - 224k^2 |R|_inf vol + 192k^4 vol); positivity implies a positive integral.
[[nodiscard]] inline SufficientBound sufficient_bound(int sigma, double volume, double r_inf, int k) {
  if (!(volume > 0.0)) throw DomainError("sufficient_bound: volume must be positive");
  if (!(r_inf >= 0.0)) throw DomainError("sufficient_bound: r_inf must be nonnegative");
  constexpr double pi = std::numbers::pi;
  const double k2 = static_cast<double>(k) * static_cast<double>(k);
  const double lhs = k2 * (kBoundSignatureCoefficient * pi * pi * sigma - kBoundCurvatureCoefficient * k2 * r_inf * volume +
                           kBoundConstantCoefficient * k2 * k2 * volume);
  return {lhs, lhs > 0.0};
}

/// Smallest k in [1, k_max] from which the inequality holds for every k' in [k, k_max].
[[nodiscard]] inline std::optional<int> sufficient_bound_crossover(int sigma, double volume, double r_inf, int k_max) {
  std::optional<int> crossover;
  for (int k = k_max; k >= 1; --k) {
    if (!sufficient_bound(sigma, volume, r_inf, k).holds) break;
    crossover = k;
  }
  return crossover;
}

// ---------------------------------------------------------------------------
// Permutation route
// ---------------------------------------------------------------------------

/// Pointwise value of (4/(2m-1)!) sum_sigma sgn(sigma) tr[A_{s(1)} B_sigma], where
///   A_i      : Y -> R(X_i, Y) gamma_dot
///   B_sigma  = Omega(X_{s(2)},X_{s(3)}) o ... o Omega(X_{s(2m-2)},X_{s(2m-1)})
/// for a (2m-1)-dimensional curvature tensor and frame X_1..X_{2m-1}.
/// No normalisation of gamma_dot is required here; the sum is linear in it.
[[nodiscard]] inline double permutation_sum(const RiemannTensor& r, const OrthonormalFrame& frame,
                                            const Vector& loop_speed) {
  const int n = r.dim();
  if (n != 3 && n != 5) throw UnsupportedOperation("permutation route needs an odd dimension 3 or 5");
  detail::require_same_dim(n, frame.dim(), "permutation_sum(frame)");
  detail::require_same_dim(n, loop_speed.size(), "permutation_sum(loop_speed)");

  std::vector<Matrix> omega(static_cast<std::size_t>(n * n));
  std::vector<Matrix> speed_map(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    const Vector xa = frame.vector(a);
    for (int b = 0; b < n; ++b) omega[static_cast<std::size_t>(a * n + b)] = endomorphism_of_pair(r, xa, frame.vector(b));
    Matrix am(n, n);
    for (int y = 0; y < n; ++y) am.col(y) = endomorphism_of_pair(r, xa, Vector::Unit(n, y)) * loop_speed;
    speed_map[static_cast<std::size_t>(a)] = std::move(am);
  }

  double total = 0.0;
  detail::for_each_signed_permutation(n, [&](std::span<const int> p, int sign) {
    Matrix prod = speed_map[static_cast<std::size_t>(p[0])];
    for (int s = 1; s + 1 < n; s += 2) prod = prod * omega[static_cast<std::size_t>(p[s] * n + p[s + 1])];
    total += sign * prod.trace();
  });
  double factorial = 1.0;
  for (int i = 2; i <= n; ++i) factorial *= i;
  return 4.0 / factorial * total;
}

/// One positive scalar relating the permutation route to the closed form, fixed on the
/// flat torus at k = 1 and never refit.
[[nodiscard]] inline double calibration_constant() {
  static const double value = [] {
    const SasakiLift torus = lift_curvature(flat_torus(), 1);
    const double raw = permutation_sum(torus.curvature5, OrthonormalFrame::standard(5), Vector::Unit(5, kVertical));
    return density_closed_form(torus) / (raw * torus.fiber_length);
  }();
  return value;
}

/// C_cal * (pointwise permutation sum) * fiber_length, for a unit loop speed.
[[nodiscard]] inline double density_permutation(const RiemannTensor& r, const OrthonormalFrame& frame,
                                                const Vector& loop_speed, double fiber_length = kFiberLength) {
  if (std::abs(loop_speed.norm() - 1.0) > 1e-12) throw DomainError("density_permutation: loop speed must be a unit vector");
  return calibration_constant() * permutation_sum(r, frame, loop_speed) * fiber_length;
}

[[nodiscard]] inline double density_permutation(const SasakiLift& lift, const OrthonormalFrame& frame,
                                                const Vector& loop_speed) {
  return density_permutation(lift.curvature5, frame, loop_speed, lift.fiber_length);
}

/// Standard frame (xi, e2, Je2, e3, Je3), loop speed xi.
[[nodiscard]] inline double density_permutation(const SasakiLift& lift) {
  return density_permutation(lift, OrthonormalFrame::standard(5), Vector::Unit(5, kVertical));
}

/// Permutation route on the n-th iterate theta -> gamma(n theta): the loop speed becomes
/// n xi and the loop integral runs over the same parameter interval.
[[nodiscard]] inline double iterate_value(const SasakiLift& lift, int n) {
  if (n <= 0) throw DomainError("iterate_value: n must be >= 1");
  const Vector speed = static_cast<double>(n) * Vector::Unit(5, kVertical);
  return calibration_constant() * permutation_sum(lift.curvature5, OrthonormalFrame::standard(5), speed) *
         lift.fiber_length;
}

struct WcsDensity {
  std::string surface;
  int k = 0;
  double value_closed = 0.0;
  double value_permutation = 0.0;
  double calibration_constant = 0.0;
  double route_agreement = 0.0;  // |perm - closed| / max(1, |closed|)
};

[[nodiscard]] inline double route_agreement(double closed, double permutation) {
  return std::abs(permutation - closed) / std::max(1.0, std::abs(closed));
}

[[nodiscard]] inline WcsDensity evaluate_density(const SasakiLift& lift) {
  WcsDensity d;
  d.surface = lift.base.name;
  d.k = lift.k;
  d.value_closed = density_closed_form(lift);
  d.value_permutation = density_permutation(lift);
  d.calibration_constant = calibration_constant();
  d.route_agreement = route_agreement(d.value_closed, d.value_permutation);
  return d;
}

// ---------------------------------------------------------------------------
// Verdicts
// ---------------------------------------------------------------------------

enum class Verdict { InfiniteOrder, Inconclusive };

[[nodiscard]] inline std::string to_string(Verdict v) {
  return v == Verdict::InfiniteOrder ? "INFINITE_ORDER" : "INCONCLUSIVE";
}

/// Relative threshold (times total volume) below which an exact integral counts as zero.
inline constexpr double kZeroIntegralThreshold = 1e-9;

struct Pi1Verdict {
  std::string surface;
  int k = 0;
  std::optional<double> integral;  // only for curvature-known surfaces
  double bound_lhs = 0.0;
  bool bound_holds = false;
  Verdict verdict = Verdict::Inconclusive;
  std::string rationale;
};

/// Decides whether the fiber-rotation loop of the level-k circle bundle has infinite
/// order in pi_1(Diff). A nonzero exact integral (curvature-known surfaces) or the
/// sufficient inequality (bounds-only surfaces) gives INFINITE_ORDER; k = 0 is always
/// INCONCLUSIVE.
[[nodiscard]] inline Pi1Verdict decide_pi1(const KahlerSurface& surface, int k) {
  Pi1Verdict v;
  v.surface = surface.name;
  v.k = k;
  const SufficientBound bound = sufficient_bound(surface.signature, surface.volume, surface.r_inf, k);
  v.bound_lhs = bound.lhs;
  v.bound_holds = bound.holds;

  std::ostringstream why;
  why.precision(17);
  if (surface.curvature_known) {
    const SasakiLift lift = lift_curvature(surface, k);
    const double integral = integral_csw5(lift);
    v.integral = integral;
    const double atol = kZeroIntegralThreshold * lift.total_volume;
    if (k != 0 && std::abs(integral) > atol) {
      v.verdict = Verdict::InfiniteOrder;
      why << "exact integral " << integral << " is nonzero (|I| > " << atol << "); iterates give distinct classes";
    } else {
      why << "exact integral " << integral << " vanishes within " << atol << "; no conclusion";
    }
  } else if (k != 0 && bound.holds) {
    v.verdict = Verdict::InfiniteOrder;
    why << "sufficient inequality holds: lhs " << bound.lhs << " > 0";
  } else {
    why << "sufficient inequality fails: lhs " << bound.lhs << " <= 0; no conclusion";
  }
  if (k == 0) {
    v.verdict = Verdict::Inconclusive;
    why.str("");
    why << "k = 0 (trivial bundle M x S^1): method gives no information";
  }
  v.rationale = why.str();
  return v;
}

}  // namespace wcslab
