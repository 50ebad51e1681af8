#pragma once

// Classical pseudodifferential symbols on the circle with values in d x d matrices.
//
// A homogeneous component of degree m is stored by its values at xi = +1 and xi = -1 on a
// uniform periodic x-grid of G points (x_g = 2 pi g / G); positive homogeneity determines
// it elsewhere. The operator convention is sigma(d/dx) = i xi, so that
//   sigma(P o Q) ~ sum_m ((-i)^m / m!) d_xi^m sigma_P * d_x^m sigma_Q.

#include <Eigen/Dense>
#include <boost/rational.hpp>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "wcslab/errors.hpp"
#include "wcslab/sasaki.hpp"
#include "wcslab/tensor.hpp"

namespace wcslab::psdo {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using Degree = boost::rational<long>;
using Field = std::vector<CMatrix>;  // one matrix per grid point

inline constexpr int kDefaultGrid = 64;

[[nodiscard]] inline bool is_integer(const Degree& d) { return d.denominator() == 1; }

[[nodiscard]] inline std::string to_string(const Degree& d) {
  return is_integer(d) ? std::to_string(d.numerator())
                       : std::to_string(d.numerator()) + "/" + std::to_string(d.denominator());
}

[[nodiscard]] inline bool valid_grid(int grid) { return grid >= 16 && (grid & (grid - 1)) == 0; }

[[nodiscard]] inline Field constant_field(const CMatrix& m, int grid) {
  return Field(static_cast<std::size_t>(grid), m);
}

[[nodiscard]] inline Field zero_field(int d, int grid) { return constant_field(CMatrix::Zero(d, d), grid); }

[[nodiscard]] inline double sup_norm(const Field& f) {
  double m = 0.0;
  for (const auto& a : f) m = std::max(m, a.cwiseAbs().maxCoeff());
  return m;
}

/// d^m/dx^m of a periodic field by FFT; the Nyquist mode is dropped for odd orders.
[[nodiscard]] inline Field spectral_derivative(const Field& f, int order) {
  if (order == 0 || f.empty()) return f;
  const int g = static_cast<int>(f.size());
  const auto rows = f.front().rows();
  const auto cols = f.front().cols();
  Field out(f.size(), CMatrix::Zero(rows, cols));
  Eigen::FFT<double> fft;
  std::vector<Complex> samples(static_cast<std::size_t>(g));
  std::vector<Complex> spectrum;
  std::vector<Complex> back;
  for (Eigen::Index a = 0; a < rows; ++a)
    for (Eigen::Index b = 0; b < cols; ++b) {
      for (int x = 0; x < g; ++x) samples[static_cast<std::size_t>(x)] = f[static_cast<std::size_t>(x)](a, b);
      fft.fwd(spectrum, samples);
      for (int n = 0; n < g; ++n) {
        const int freq = n <= g / 2 ? n : n - g;
        Complex factor = std::pow(Complex(0.0, static_cast<double>(freq)), order);
        if (n == g / 2 && order % 2 == 1) factor = 0.0;
        spectrum[static_cast<std::size_t>(n)] *= factor;
      }
      fft.inv(back, spectrum);
      for (int x = 0; x < g; ++x) out[static_cast<std::size_t>(x)](a, b) = back[static_cast<std::size_t>(x)];
    }
  return out;
}

struct HomogeneousComponent {
  Degree degree;
  Field plus;   // xi = +1
  Field minus;  // xi = -1

  [[nodiscard]] double sup_norm() const { return std::max(psdo::sup_norm(plus), psdo::sup_norm(minus)); }
};

/// Truncated expansion sigma ~ sum_{j < depth} sigma_{order - j}.
///
/// When `finite` is set the expansion is complete: every component below the stored ones
/// is exactly zero (differential operators, multiplication operators). Otherwise components
/// below order - depth + 1 are unknown and any result depending on them is refused.
class ClassicalSymbol {
 public:
  ClassicalSymbol(Degree order, int fiber_dim, int grid, std::vector<HomogeneousComponent> components, bool finite)
      : order_(order), fiber_dim_(fiber_dim), grid_(grid), components_(std::move(components)), finite_(finite) {
    if (fiber_dim_ < 1) throw StructuralError("ClassicalSymbol: fiber dimension must be positive");
    if (!valid_grid(grid_)) throw StructuralError("ClassicalSymbol: grid size must be a power of two >= 16");
    if (components_.empty()) throw StructuralError("ClassicalSymbol: need at least one component");
    for (std::size_t j = 0; j < components_.size(); ++j) {
      const auto& c = components_[j];
      if (c.degree != order_ - static_cast<long>(j)) {
        throw StructuralError("ClassicalSymbol: component degrees must decrease by 1 from the order");
      }
      for (const Field* f : {&c.plus, &c.minus}) {
        if (f->size() != static_cast<std::size_t>(grid_)) throw StructuralError("ClassicalSymbol: field/grid size mismatch");
        for (const auto& m : *f) {
          if (m.rows() != fiber_dim_ || m.cols() != fiber_dim_) {
            throw StructuralError("ClassicalSymbol: component matrix has wrong fiber dimension");
          }
        }
      }
    }
  }

  [[nodiscard]] static ClassicalSymbol identity(int d, int grid = kDefaultGrid) {
    return multiplication(constant_field(CMatrix::Identity(d, d), grid));
  }

  /// Multiplication by a matrix-valued function: a single, exact degree-0 component.
  [[nodiscard]] static ClassicalSymbol multiplication(const Field& a) {
    if (a.empty()) throw StructuralError("multiplication: empty field");
    const auto d = static_cast<int>(a.front().rows());
    return ClassicalSymbol(Degree(0), d, static_cast<int>(a.size()), {{Degree(0), a, a}}, true);
  }

  /// A single x-independent homogeneous component.
  [[nodiscard]] static ClassicalSymbol homogeneous(Degree degree, const CMatrix& plus, const CMatrix& minus,
                                                   int grid = kDefaultGrid, bool finite = true) {
    return ClassicalSymbol(degree, static_cast<int>(plus.rows()), grid,
                           {{degree, constant_field(plus, grid), constant_field(minus, grid)}}, finite);
  }

  [[nodiscard]] Degree order() const noexcept { return order_; }
  [[nodiscard]] int depth() const noexcept { return static_cast<int>(components_.size()); }
  [[nodiscard]] int fiber_dim() const noexcept { return fiber_dim_; }
  [[nodiscard]] int grid() const noexcept { return grid_; }
  [[nodiscard]] bool finite() const noexcept { return finite_; }
  [[nodiscard]] const std::vector<HomogeneousComponent>& components() const noexcept { return components_; }

  /// Lowest degree whose value is known: order - depth + 1, or unbounded when finite.
  [[nodiscard]] std::optional<Degree> known_floor() const {
    if (finite_) return std::nullopt;
    return order_ - static_cast<long>(depth() - 1);
  }

  /// Component j (degree order - j). Past the stored range this is zero for finite
  /// expansions and a TruncationError otherwise.
  [[nodiscard]] HomogeneousComponent component(int j) const {
    if (j < depth()) return components_[static_cast<std::size_t>(j)];
    if (!finite_) {
      throw TruncationError("component of degree " + to_string(order_ - static_cast<long>(j)) + " is below the truncation floor",
                            j - depth() + 1);
    }
    const Field z = zero_field(fiber_dim_, grid_);
    return {order_ - static_cast<long>(j), z, z};
  }

  /// Highest degree whose component exceeds `tol` in sup-norm, if any stored one does.
  [[nodiscard]] std::optional<Degree> highest_nonvanishing_degree(double tol = 1e-10) const {
    for (const auto& c : components_) {
      if (c.sup_norm() > tol) return c.degree;
    }
    return std::nullopt;
  }

  /// Same symbol with a zero leading part prepended so that its nominal order is `order`.
  [[nodiscard]] ClassicalSymbol raised_to(Degree order) const {
    const Degree gap = order - order_;
    if (!is_integer(gap) || gap < 0) throw DomainError("raised_to: order gap must be a nonnegative integer");
    std::vector<HomogeneousComponent> comps;
    const Field z = zero_field(fiber_dim_, grid_);
    for (long j = 0; j < gap.numerator(); ++j) comps.push_back({order - j, z, z});
    comps.insert(comps.end(), components_.begin(), components_.end());
    return ClassicalSymbol(order, fiber_dim_, grid_, std::move(comps), finite_);
  }

  [[nodiscard]] ClassicalSymbol truncated(int depth) const {
    if (depth < 1) throw DomainError("truncated: depth must be >= 1");
    std::vector<HomogeneousComponent> comps;
    for (int j = 0; j < depth; ++j) comps.push_back(component(j));
    const bool still_finite = finite_ && depth >= this->depth();
    return ClassicalSymbol(order_, fiber_dim_, grid_, std::move(comps), still_finite);
  }

  [[nodiscard]] ClassicalSymbol scaled(Complex s) const {
    auto comps = components_;
    for (auto& c : comps) {
      for (auto& m : c.plus) m *= s;
      for (auto& m : c.minus) m *= s;
    }
    return ClassicalSymbol(order_, fiber_dim_, grid_, std::move(comps), finite_);
  }

  /// a*P + b*Q. Orders must differ by an integer; the result is known down to the higher
  /// of the two truncation floors.
  [[nodiscard]] static ClassicalSymbol linear_combination(Complex a, const ClassicalSymbol& p, Complex b,
                                                          const ClassicalSymbol& q) {
    if (p.fiber_dim_ != q.fiber_dim_ || p.grid_ != q.grid_) throw StructuralError("linear_combination: shape mismatch");
    if (!is_integer(p.order_ - q.order_)) throw DomainError("linear_combination: orders differ by a non-integer");
    const Degree top = std::max(p.order_, q.order_);
    const Degree floor_p = p.order_ - static_cast<long>(p.depth() - 1);
    const Degree floor_q = q.order_ - static_cast<long>(q.depth() - 1);
    // Below a non-finite operand's floor the sum is unknown; finite operands are zero there.
    Degree bottom = std::min(floor_p, floor_q);
    if (!p.finite_ && !q.finite_) bottom = std::max(floor_p, floor_q);
    else if (!p.finite_) bottom = floor_p;
    else if (!q.finite_) bottom = floor_q;
    const long count = (top - bottom).numerator() + 1;
    if (count < 1) throw TruncationError("linear_combination: no overlapping known components", 1);
    std::vector<HomogeneousComponent> comps;
    for (long j = 0; j < count; ++j) {
      const Degree deg = top - j;
      HomogeneousComponent c{deg, zero_field(p.fiber_dim_, p.grid_), zero_field(p.fiber_dim_, p.grid_)};
      const auto add = [&](Complex w, const ClassicalSymbol& s) {
        const Degree offset = s.order_ - deg;
        if (offset < 0) return;
        const auto idx = static_cast<int>(offset.numerator());
        if (idx >= s.depth()) return;  // finite tail is zero
        const auto& sc = s.components_[static_cast<std::size_t>(idx)];
        for (int x = 0; x < p.grid_; ++x) {
          c.plus[static_cast<std::size_t>(x)] += w * sc.plus[static_cast<std::size_t>(x)];
          c.minus[static_cast<std::size_t>(x)] += w * sc.minus[static_cast<std::size_t>(x)];
        }
      };
      add(a, p);
      add(b, q);
      comps.push_back(std::move(c));
    }
    return ClassicalSymbol(top, p.fiber_dim_, p.grid_, std::move(comps), p.finite_ && q.finite_);
  }

  friend ClassicalSymbol operator+(const ClassicalSymbol& p, const ClassicalSymbol& q) {
    return linear_combination(1.0, p, 1.0, q);
  }
  friend ClassicalSymbol operator-(const ClassicalSymbol& p, const ClassicalSymbol& q) {
    return linear_combination(1.0, p, -1.0, q);
  }

 private:
  Degree order_;
  int fiber_dim_;
  int grid_;
  std::vector<HomogeneousComponent> components_;
  bool finite_;
};

namespace detail {

/// d_xi^m of a degree-`deg` homogeneous component, evaluated at xi = +-1:
/// value * (+-1)^m * deg (deg - 1) ... (deg - m + 1).
[[nodiscard]] inline double falling_factorial(const Degree& deg, int m) {
  double f = 1.0;
  for (int i = 0; i < m; ++i) f *= boost::rational_cast<double>(deg - static_cast<long>(i));
  return f;
}

/// Caches d_x^m of each component of a symbol.
class XDerivativeCache {
 public:
  explicit XDerivativeCache(const ClassicalSymbol& s) : s_(s) {}

  const HomogeneousComponent& get(int j, int m) {
    if (cache_.size() <= static_cast<std::size_t>(j)) cache_.resize(static_cast<std::size_t>(j) + 1);
    auto& row = cache_[static_cast<std::size_t>(j)];
    if (row.empty()) row.push_back(s_.component(j));
    while (row.size() <= static_cast<std::size_t>(m)) {
      const auto& prev = row.back();
      row.push_back({prev.degree, spectral_derivative(prev.plus, 1), spectral_derivative(prev.minus, 1)});
    }
    return row[static_cast<std::size_t>(m)];
  }

 private:
  const ClassicalSymbol& s_;
  std::vector<std::vector<HomogeneousComponent>> cache_;
};

/// Component n (degree ord(P)+ord(Q)-n) of the composed symbol, from P-components j < n
/// plus, when `include_leading` is set, the j = n term.
inline HomogeneousComponent composition_component(const ClassicalSymbol& p, XDerivativeCache& q, const Degree& degree,
                                                  int n, int grid, int d, bool include_leading = true) {
  HomogeneousComponent out{degree, zero_field(d, grid), zero_field(d, grid)};
  double inv_factorial = 1.0;
  for (int m = 0; m <= n; ++m) {
    if (m > 0) inv_factorial /= m;
    const Complex cm = std::pow(Complex(0.0, -1.0), m) * inv_factorial;
    for (int i = 0; i + m <= n; ++i) {
      if (!include_leading && i == n) continue;
      const int j = n - i - m;
      const HomogeneousComponent pi = p.component(i);
      const double dxi = falling_factorial(pi.degree, m);
      if (dxi == 0.0) continue;
      const double sign_minus = (m % 2 == 0) ? 1.0 : -1.0;
      const HomogeneousComponent& qj = q.get(j, m);
      for (int x = 0; x < grid; ++x) {
        const auto ux = static_cast<std::size_t>(x);
        out.plus[ux] += (cm * dxi) * (pi.plus[ux] * qj.plus[ux]);
        out.minus[ux] += (cm * dxi * sign_minus) * (pi.minus[ux] * qj.minus[ux]);
      }
    }
  }
  return out;
}

}  // namespace detail

/// Asymptotic product P o Q truncated to `depth` components.
[[nodiscard]] inline ClassicalSymbol compose(const ClassicalSymbol& p, const ClassicalSymbol& q, int depth) {
  if (p.fiber_dim() != q.fiber_dim()) throw StructuralError("compose: fiber dimension mismatch");
  if (p.grid() != q.grid()) throw StructuralError("compose: grid size mismatch");
  if (depth < 1) throw DomainError("compose: depth must be >= 1");
  int available = depth;
  if (!p.finite()) available = std::min(available, p.depth());
  if (!q.finite()) available = std::min(available, q.depth());
  if (available < depth) {
    throw TruncationError("compose: requested depth " + std::to_string(depth) + " exceeds the operands' known expansion",
                          depth - available);
  }

  const Degree order = p.order() + q.order();
  detail::XDerivativeCache qcache(q);
  std::vector<HomogeneousComponent> comps;
  comps.reserve(static_cast<std::size_t>(depth));
  for (int n = 0; n < depth; ++n) {
    comps.push_back(detail::composition_component(p, qcache, order - static_cast<long>(n), n, p.grid(), p.fiber_dim()));
  }

  // The product of two finite expansions is finite when every P-component has a nonnegative
  // integer degree (its xi-derivatives terminate) and all nonzero terms fit in `depth`.
  bool finite = p.finite() && q.finite();
  if (finite) {
    int reach = 0;
    for (int i = 0; i < p.depth(); ++i) {
      const Degree deg = p.order() - static_cast<long>(i);
      if (!is_integer(deg) || deg < 0) {
        finite = false;
        break;
      }
      reach = std::max(reach, i + static_cast<int>(deg.numerator()) + q.depth() - 1);
    }
    finite = finite && reach < depth;
  }
  return ClassicalSymbol(order, p.fiber_dim(), p.grid(), std::move(comps), finite);
}

/// [P, Q] = PQ - QP.
[[nodiscard]] inline ClassicalSymbol commutator(const ClassicalSymbol& p, const ClassicalSymbol& q, int depth) {
  return compose(p, q, depth) - compose(q, p, depth);
}

/// res(P) = (1/2pi) int_{S^1} [tr sigma_{-1}(x,+1) + tr sigma_{-1}(x,-1)] dx.
/// The trapezoid rule is spectrally exact on the periodic grid.
[[nodiscard]] inline Complex wodzicki_residue(const ClassicalSymbol& p) {
  if (!is_integer(p.order()) || p.order() < -1) return 0.0;
  const long index = (p.order() + 1L).numerator();
  if (index >= p.depth()) {
    if (p.finite()) return 0.0;
    throw TruncationError("wodzicki_residue: degree -1 is below the truncation floor",
                          static_cast<int>(index) - p.depth() + 1);
  }
  const auto& c = p.components()[static_cast<std::size_t>(index)];
  Complex sum = 0.0;
  for (int x = 0; x < p.grid(); ++x) sum += c.plus[static_cast<std::size_t>(x)].trace() + c.minus[static_cast<std::size_t>(x)].trace();
  return sum / static_cast<double>(p.grid());
}

/// (1/k!) res(Omega^k): the residue Chern form of a curvature with symbol Omega.
[[nodiscard]] inline Complex residue_chern_form(const ClassicalSymbol& omega, int k, int depth) {
  if (k < 1) throw DomainError("residue_chern_form: k must be >= 1");
  ClassicalSymbol power = omega.truncated(std::min(depth, omega.finite() ? std::max(depth, omega.depth()) : omega.depth()));
  double factorial = 1.0;
  for (int i = 2; i <= k; ++i) {
    power = compose(power, omega, depth);
    factorial *= i;
  }
  return wodzicki_residue(power) / factorial;
}

// ---------------------------------------------------------------------------
// Covariant derivative along a loop and the resolvent (1 + Delta)^{-1}
// ---------------------------------------------------------------------------

/// D = d/dx + Gamma(x).
[[nodiscard]] inline ClassicalSymbol covariant_derivative_symbol(const Field& gamma) {
  const auto d = static_cast<int>(gamma.front().rows());
  const int grid = static_cast<int>(gamma.size());
  const CMatrix id = CMatrix::Identity(d, d);
  return ClassicalSymbol(Degree(1), d, grid,
                         {{Degree(1), constant_field(Complex(0, 1) * id, grid), constant_field(Complex(0, -1) * id, grid)},
                          {Degree(0), gamma, gamma}},
                         true);
}

/// 1 + D*D with D = d/dx + Gamma, D* = -d/dx + Gamma^*:
///   1 + Delta = -d^2 + (Gamma^* - Gamma) d + (1 + Gamma^* Gamma - Gamma').
[[nodiscard]] inline ClassicalSymbol laplacian_symbol(const Field& gamma) {
  const auto d = static_cast<int>(gamma.front().rows());
  const int grid = static_cast<int>(gamma.size());
  const CMatrix id = CMatrix::Identity(d, d);
  const Field dgamma = spectral_derivative(gamma, 1);
  Field first_plus(gamma.size());
  Field first_minus(gamma.size());
  Field zeroth(gamma.size());
  for (std::size_t x = 0; x < gamma.size(); ++x) {
    const CMatrix skew = gamma[x].adjoint() - gamma[x];
    first_plus[x] = Complex(0, 1) * skew;
    first_minus[x] = Complex(0, -1) * skew;
    zeroth[x] = id + gamma[x].adjoint() * gamma[x] - dgamma[x];
  }
  return ClassicalSymbol(Degree(2), d, grid,
                         {{Degree(2), constant_field(id, grid), constant_field(id, grid)},
                          {Degree(1), std::move(first_plus), std::move(first_minus)},
                          {Degree(0), zeroth, zeroth}},
                         true);
}

/// Left parametrix B of 1 + Delta: B o (1 + Delta) = Id + O(order -depth).
/// Solved degree by degree: b_0 = a_2^{-1}, b_n = -(terms of degree -n with b_j, j < n) a_2^{-1}.
[[nodiscard]] inline ClassicalSymbol resolvent_parametrix(const Field& gamma, int depth) {
  if (depth < 2) throw DomainError("resolvent_parametrix: depth must be >= 2");
  if (gamma.empty()) throw StructuralError("resolvent_parametrix: empty connection field");
  const ClassicalSymbol a = laplacian_symbol(gamma);
  const int d = a.fiber_dim();
  const int grid = a.grid();
  const auto& principal = a.components().front();

  std::vector<HomogeneousComponent> b;
  for (int n = 0; n < depth; ++n) {
    // Partial symbol holding b_0..b_{n-1} and a zero b_n so the recursion sees only known terms.
    std::vector<HomogeneousComponent> partial = b;
    partial.push_back({Degree(-2) - static_cast<long>(n), zero_field(d, grid), zero_field(d, grid)});
    const ClassicalSymbol pb(Degree(-2), d, grid, std::move(partial), true);
    detail::XDerivativeCache acache(a);
    const HomogeneousComponent residual =
        detail::composition_component(pb, acache, Degree(-static_cast<long>(n)), n, grid, d, false);
    HomogeneousComponent bn{Degree(-2) - static_cast<long>(n), zero_field(d, grid), zero_field(d, grid)};
    const CMatrix id = CMatrix::Identity(d, d);
    for (int x = 0; x < grid; ++x) {
      const auto ux = static_cast<std::size_t>(x);
      const CMatrix target = n == 0 ? id : CMatrix::Zero(d, d);
      bn.plus[ux] = (target - residual.plus[ux]) * principal.plus[ux].inverse();
      bn.minus[ux] = (target - residual.minus[ux]) * principal.minus[ux].inverse();
    }
    b.push_back(std::move(bn));
  }
  return ClassicalSymbol(Degree(-2), d, grid, std::move(b), false);
}

/// Sup-norm of each stored component of B o (1 + Delta) - Id.
[[nodiscard]] inline std::vector<double> parametrix_defect(const ClassicalSymbol& parametrix, const Field& gamma) {
  const ClassicalSymbol product = compose(parametrix, laplacian_symbol(gamma), parametrix.depth());
  const ClassicalSymbol defect = product - ClassicalSymbol::identity(parametrix.fiber_dim(), parametrix.grid());
  std::vector<double> norms;
  for (const auto& c : defect.components()) norms.push_back(c.sup_norm());
  return norms;
}

// ---------------------------------------------------------------------------
// Random symbols and the trace property
// ---------------------------------------------------------------------------

/// Seeded symbol with low-frequency trigonometric x-dependence (|frequency| <= max_freq).
[[nodiscard]] inline ClassicalSymbol random_symbol(std::mt19937_64& rng, Degree order, int depth, int fiber_dim,
                                                   int grid = kDefaultGrid, int max_freq = 3) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto random_field = [&] {
    Field f = zero_field(fiber_dim, grid);
    for (int freq = -max_freq; freq <= max_freq; ++freq) {
      CMatrix coeff(fiber_dim, fiber_dim);
      for (int i = 0; i < fiber_dim; ++i)
        for (int j = 0; j < fiber_dim; ++j) coeff(i, j) = Complex(normal(rng), normal(rng)) / (1.0 + std::abs(freq));
      for (int x = 0; x < grid; ++x) {
        const double angle = 2.0 * std::numbers::pi * x * freq / grid;
        f[static_cast<std::size_t>(x)] += coeff * std::polar(1.0, angle);
      }
    }
    return f;
  };
  std::vector<HomogeneousComponent> comps;
  for (int j = 0; j < depth; ++j) {
    Field plus = random_field();
    Field minus = random_field();
    comps.push_back({order - static_cast<long>(j), std::move(plus), std::move(minus)});
  }
  return ClassicalSymbol(order, fiber_dim, grid, std::move(comps), false);
}

/// max over trials of |res(PQ - QP)| for seeded random symbols of orders in {-2,...,1}.
[[nodiscard]] inline double commutator_trace_test(std::uint64_t seed, int trials, int depth, int fiber_dim = 2,
                                                  int grid = kDefaultGrid) {
  if (trials < 1) throw DomainError("commutator_trace_test: trials must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> order_dist(-2, 1);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Degree op(order_dist(rng));
    const Degree oq(order_dist(rng));
    const ClassicalSymbol p = random_symbol(rng, op, depth, fiber_dim, grid);
    const ClassicalSymbol q = random_symbol(rng, oq, depth, fiber_dim, grid);
    worst = std::max(worst, std::abs(wodzicki_residue(commutator(p, q, depth))));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Order audit of the s = 1 connection difference along a fiber orbit
// ---------------------------------------------------------------------------

struct AuditTerm {
  std::string name;
  std::optional<Degree> order;  // nullopt: identically zero
  double leading_norm = 0.0;
};

struct OrderAudit {
  std::vector<AuditTerm> terms;
  std::optional<Degree> difference_order;  // of the full connection difference
  double order0_norm = 0.0;                // its degree-0 part, written at nominal order 0
  bool passes = false;
};

/// Connection coefficient of the fiber derivative in the invariant frame (xi, e2, Je2, e3, Je3):
/// Gamma = k * J on the horizontal block, so |nabla_X xi|^2 = k^2 matches the vertical
/// sectional curvature of the lift.
[[nodiscard]] inline Matrix fiber_connection(const SasakiLift& lift) {
  Matrix g = Matrix::Zero(5, 5);
  g.block(1, 1, 4, 4) = static_cast<double>(lift.k) * lift.base.J.matrix();
  return g;
}

namespace detail {

inline CMatrix to_complex(const Matrix& m) { return m.cast<Complex>(); }

/// Matrix of Y -> f(Y) given the images of the basis vectors.
template <class F>
Matrix matrix_of(int n, F&& image) {
  Matrix m(n, n);
  for (int y = 0; y < n; ++y) m.col(y) = image(Vector::Unit(n, y));
  return m;
}

}  // namespace detail

/// Assembles the six bracketed terms of the s = 1 Levi-Civita connection difference along
/// the fiber orbit (loop speed xi), each composed with (1 + Delta)^{-1}, and reports the
/// highest nonvanishing homogeneity degree of each (maximised over X in the frame).
/// Passes iff every term has order <= -1 and the full difference has no degree-0 part.
[[nodiscard]] inline OrderAudit connection_difference_order_audit(const SasakiLift& lift, int depth,
                                                                  int grid = kDefaultGrid) {
  if (depth < 2) throw TruncationError("order audit: depth must resolve degrees -1 and -2", 2 - depth);
  const RiemannTensor& r = lift.curvature5;
  constexpr int n = 5;
  const Vector xi = Vector::Unit(n, kVertical);
  const Matrix gamma = fiber_connection(lift);
  const Field gamma_field = constant_field(detail::to_complex(gamma), grid);
  const ClassicalSymbol parametrix = resolvent_parametrix(gamma_field, depth);
  const ClassicalSymbol d_op = covariant_derivative_symbol(gamma_field);
  const auto mult = [&](const Matrix& m) { return ClassicalSymbol::multiplication(constant_field(detail::to_complex(m), grid)); };

  static const char* const kNames[6] = {
      "grad(Omega(X,g')Y)", "Omega(X,g')grad(Y)", "grad(Omega(Y,g')X)",
      "Omega(Y,g')grad(X)", "Omega(X,grad(Y))g'", "Omega(grad(X),Y)g'",
  };
  OrderAudit audit;
  for (const char* name : kNames) audit.terms.push_back({name, std::nullopt, 0.0});

  std::optional<ClassicalSymbol> total;
  for (int a = 0; a < n; ++a) {
    const Vector x = Vector::Unit(n, a);
    const Vector grad_x = gamma * x;  // X has constant frame coordinates
    const Matrix omega_x_g = endomorphism_of_pair(r, x, xi);
    const Matrix c_x = detail::matrix_of(n, [&](const Vector& y) { return Vector(endomorphism_of_pair(r, y, xi) * x); });
    const Matrix c_grad_x =
        detail::matrix_of(n, [&](const Vector& y) { return Vector(endomorphism_of_pair(r, y, xi) * grad_x); });
    const Matrix a_x = detail::matrix_of(n, [&](const Vector& y) { return Vector(endomorphism_of_pair(r, x, y) * xi); });
    const Matrix a_grad_x =
        detail::matrix_of(n, [&](const Vector& y) { return Vector(endomorphism_of_pair(r, grad_x, y) * xi); });

    const ClassicalSymbol bracket[6] = {
        compose(d_op, mult(omega_x_g), 2).scaled(-1.0),
        compose(mult(omega_x_g), d_op, 2).scaled(-1.0),
        compose(d_op, mult(c_x), 2).scaled(-1.0),
        mult(c_grad_x).scaled(-1.0),
        compose(mult(a_x), d_op, 2),
        mult(a_grad_x).scaled(-1.0),
    };
    for (int t = 0; t < 6; ++t) {
      const ClassicalSymbol term = compose(parametrix, bracket[t], depth).scaled(0.5);
      auto& entry = audit.terms[static_cast<std::size_t>(t)];
      if (const auto deg = term.highest_nonvanishing_degree()) {
        if (!entry.order || *deg > *entry.order) entry.order = deg;
        entry.leading_norm = std::max(entry.leading_norm, term.components().front().sup_norm());
      }
      // The bracket terms are differential operators of order <= 1; written at the order of
      // 1 + Delta their degree-2 part must vanish, which makes the difference order <= -1.
      const ClassicalSymbol nominal = compose(parametrix, bracket[t].raised_to(Degree(2)), depth).scaled(0.5);
      total = total ? *total + nominal : nominal;
    }
  }

  audit.difference_order = total->highest_nonvanishing_degree();
  audit.order0_norm = total->components().front().sup_norm();
  audit.passes = audit.order0_norm == 0.0;
  for (const auto& t : audit.terms) {
    if (t.order && (*t.order > Degree(-1) || *t.order < Degree(-2))) audit.passes = false;
  }
  return audit;
}

}  // namespace wcslab::psdo
