#pragma once

// Dense curvature tensors in orthonormal frames.
//
// Index convention (used by every module): R(i,j,k,l) = g(R(e_i,e_j)e_k, e_l),
// so the sectional curvature of the plane (e_i, e_j) is R(i,j,j,i).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wcslab/errors.hpp"

namespace wcslab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kDefaultTolerance = 1e-10;

namespace detail {

inline int permutation_sign(std::span<const int> p) {
  int sign = 1;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      if (p[i] > p[j]) sign = -sign;
    }
  }
  return sign;
}

/// Calls f(perm, sign) for every permutation of {0, ..., n-1} in lexicographic order.
template <class F>
void for_each_signed_permutation(int n, F&& f) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  do {
    f(std::span<const int>(perm), permutation_sign(perm));
  } while (std::next_permutation(perm.begin(), perm.end()));
}

inline void require_same_dim(int expected, Eigen::Index got, const char* what) {
  if (got != expected) {
    throw StructuralError(std::string(what) + ": expected dimension " + std::to_string(expected) + ", got " +
                          std::to_string(got));
  }
}

}  // namespace detail

class RiemannTensor {
 public:
  RiemannTensor() : RiemannTensor(4) {}

  /// Zero tensor.
  explicit RiemannTensor(int dim) : dim_(checked_dim(dim)), comp_(size_for(dim), 0.0) {}

  RiemannTensor(int dim, std::vector<double> comp) : dim_(checked_dim(dim)), comp_(std::move(comp)) {
    if (comp_.size() != size_for(dim_)) {
      throw StructuralError("RiemannTensor: component array has " + std::to_string(comp_.size()) +
                            " entries, expected dim^4 = " + std::to_string(size_for(dim_)));
    }
  }

  /// Builds a tensor from a callable f(i, j, k, l) -> double.
  template <class F>
  static RiemannTensor generate(int dim, F&& f) {
    checked_dim(dim);
    std::vector<double> comp(size_for(dim));
    std::size_t n = 0;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        for (int k = 0; k < dim; ++k)
          for (int l = 0; l < dim; ++l) comp[n++] = f(i, j, k, l);
    return RiemannTensor(dim, std::move(comp));
  }

  [[nodiscard]] int dim() const noexcept { return dim_; }

  [[nodiscard]] double operator()(int i, int j, int k, int l) const { return comp_[index(i, j, k, l)]; }

  [[nodiscard]] std::span<const double> components() const noexcept { return comp_; }

  /// Components in a new orthonormal basis whose vectors are the columns of `frame`
  /// (expressed in the current basis).
  [[nodiscard]] RiemannTensor in_frame(const Matrix& frame) const {
    detail::require_same_dim(dim_, frame.rows(), "RiemannTensor::in_frame");
    detail::require_same_dim(dim_, frame.cols(), "RiemannTensor::in_frame");
    const auto n = static_cast<std::size_t>(dim_);
    std::vector<double> cur = comp_;
    std::vector<double> next(cur.size());
    // Contract one slot at a time; the contracted slot is rotated to the back so that
    // after four passes the original index order is restored.
    for (int pass = 0; pass < 4; ++pass) {
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t rest = 0; rest < n * n * n; ++rest) {
          double s = 0.0;
          for (std::size_t i = 0; i < n; ++i) {
            s += frame(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a)) * cur[i * n * n * n + rest];
          }
          next[rest * n + a] = s;
        }
      std::swap(cur, next);
    }
    return RiemannTensor(dim_, std::move(cur));
  }

  [[nodiscard]] double max_abs() const {
    double m = 0.0;
    for (double v : comp_) m = std::max(m, std::abs(v));
    return m;
  }

  friend RiemannTensor operator+(const RiemannTensor& a, const RiemannTensor& b) {
    if (a.dim_ != b.dim_) throw StructuralError("RiemannTensor: dimension mismatch in sum");
    std::vector<double> c(a.comp_.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.comp_[i] + b.comp_[i];
    return RiemannTensor(a.dim_, std::move(c));
  }

  friend RiemannTensor operator*(double s, const RiemannTensor& a) {
    std::vector<double> c(a.comp_);
    for (double& v : c) v *= s;
    return RiemannTensor(a.dim_, std::move(c));
  }

  friend bool operator==(const RiemannTensor&, const RiemannTensor&) = default;

 private:
  static int checked_dim(int dim) {
    if (dim < 3 || dim > 5) throw StructuralError("RiemannTensor: dimension must be 3, 4 or 5");
    return dim;
  }
  static std::size_t size_for(int dim) {
    const auto n = static_cast<std::size_t>(dim);
    return n * n * n * n;
  }
  [[nodiscard]] std::size_t index(int i, int j, int k, int l) const {
    const auto n = static_cast<std::size_t>(dim_);
    return ((static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j)) * n + static_cast<std::size_t>(k)) * n +
           static_cast<std::size_t>(l);
  }

  int dim_;
  std::vector<double> comp_;
};

/// Largest violation of each family of curvature identities.
struct SymmetryViolation {
  double antisymmetry = 0.0;
  double pair_symmetry = 0.0;
  double bianchi = 0.0;

  [[nodiscard]] double max() const { return std::max({antisymmetry, pair_symmetry, bianchi}); }
};

[[nodiscard]] inline SymmetryViolation symmetry_violation(const RiemannTensor& r) {
  SymmetryViolation v;
  const int n = r.dim();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double x = r(i, j, k, l);
          v.antisymmetry = std::max({v.antisymmetry, std::abs(x + r(j, i, k, l)), std::abs(x + r(i, j, l, k))});
          v.pair_symmetry = std::max(v.pair_symmetry, std::abs(x - r(k, l, i, j)));
          v.bianchi = std::max(v.bianchi, std::abs(x + r(j, k, i, l) + r(k, i, j, l)));
        }
  return v;
}

[[nodiscard]] inline bool validate_symmetries(const RiemannTensor& r, double tol = kDefaultTolerance) {
  return symmetry_violation(r).max() <= tol;
}

/// Raw-array variant; a component count other than dim^4 is a structural error.
[[nodiscard]] inline bool validate_symmetries(std::span<const double> comp, int dim, double tol = kDefaultTolerance) {
  return validate_symmetries(RiemannTensor(dim, std::vector<double>(comp.begin(), comp.end())), tol);
}

/// Complex structure J on a 4-dimensional frame, as a matrix acting on column vectors.
class ComplexStructure {
 public:
  ComplexStructure() : ComplexStructure(standard_matrix()) {}

  explicit ComplexStructure(Matrix j) : j_(std::move(j)) {
    detail::require_same_dim(4, j_.rows(), "ComplexStructure");
    detail::require_same_dim(4, j_.cols(), "ComplexStructure");
    const Matrix id = Matrix::Identity(4, 4);
    if ((j_ * j_ + id).cwiseAbs().maxCoeff() > 1e-12) throw StructuralError("ComplexStructure: J^2 != -Id");
    if ((j_.transpose() * j_ - id).cwiseAbs().maxCoeff() > 1e-12) {
      throw StructuralError("ComplexStructure: J is not orthogonal");
    }
  }

  /// J e_0 = e_1, J e_2 = e_3: the adapted frame (e2, Je2, e3, Je3).
  static ComplexStructure standard() { return ComplexStructure(); }

  [[nodiscard]] const Matrix& matrix() const noexcept { return j_; }
  [[nodiscard]] Vector apply(const Vector& v) const { return j_ * v; }

  /// <J e_a, e_b> for frame indices a, b.
  [[nodiscard]] double pairing(int a, int b) const { return j_(b, a); }

 private:
  static Matrix standard_matrix() {
    Matrix j = Matrix::Zero(4, 4);
    j(1, 0) = 1.0;
    j(0, 1) = -1.0;
    j(3, 2) = 1.0;
    j(2, 3) = -1.0;
    return j;
  }

  Matrix j_;
};

class OrthonormalFrame {
 public:
  /// Columns of `vectors` are the frame vectors.
  explicit OrthonormalFrame(Matrix vectors) : v_(std::move(vectors)) {
    if (v_.rows() != v_.cols() || v_.rows() < 1) throw StructuralError("OrthonormalFrame: need a square matrix");
    const Matrix gram = v_.transpose() * v_;
    if ((gram - Matrix::Identity(v_.rows(), v_.cols())).cwiseAbs().maxCoeff() > 1e-12) {
      throw StructuralError("OrthonormalFrame: Gram matrix is not the identity");
    }
  }

  static OrthonormalFrame standard(int dim) { return OrthonormalFrame(Matrix::Identity(dim, dim)); }

  [[nodiscard]] int dim() const noexcept { return static_cast<int>(v_.cols()); }
  [[nodiscard]] Vector vector(int i) const { return v_.col(i); }
  [[nodiscard]] const Matrix& matrix() const noexcept { return v_; }
  [[nodiscard]] bool positively_oriented() const { return v_.determinant() > 0.0; }

 private:
  Matrix v_;
};

/// The endomorphism Z -> R(X,Y)Z as a matrix: M(l,k) = sum_ij X_i Y_j R(i,j,k,l).
[[nodiscard]] inline Matrix endomorphism_of_pair(const RiemannTensor& r, const Vector& x, const Vector& y) {
  const int n = r.dim();
  detail::require_same_dim(n, x.size(), "endomorphism_of_pair(X)");
  detail::require_same_dim(n, y.size(), "endomorphism_of_pair(Y)");
  Matrix m = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double w = x(i) * y(j);
      if (w == 0.0) continue;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) m(l, k) += w * r(i, j, k, l);
    }
  return m;
}

/// First Pontrjagin form p1 = -(1/8pi^2) tr(Omega ^ Omega) evaluated on a positively
/// oriented orthonormal 4-frame.
[[nodiscard]] inline double pontrjagin_density(const RiemannTensor& r, const OrthonormalFrame& frame) {
  if (r.dim() != 4) throw DomainError("pontrjagin_density: curvature must be 4-dimensional");
  if (frame.dim() != 4) throw DomainError("pontrjagin_density: frame must be 4-dimensional");
  if (!frame.positively_oriented()) throw DomainError("pontrjagin_density: frame is not positively oriented");

  Matrix omega[4][4];
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) omega[a][b] = endomorphism_of_pair(r, frame.vector(a), frame.vector(b));

  // (Omega ^ Omega)(e1..e4) = (1/4) sum_sigma sgn(sigma) Omega_{s1 s2} Omega_{s3 s4}
  double wedge = 0.0;
  detail::for_each_signed_permutation(4, [&](std::span<const int> p, int sign) {
    wedge += sign * (omega[p[0]][p[1]] * omega[p[2]][p[3]]).trace();
  });
  wedge /= 4.0;
  return -wedge / (8.0 * std::numbers::pi * std::numbers::pi);
}

[[nodiscard]] inline double pontrjagin_density(const RiemannTensor& r) {
  return pontrjagin_density(r, OrthonormalFrame::standard(4));
}

namespace detail {

inline Matrix givens(int dim, int p, int q, double angle) {
  Matrix g = Matrix::Identity(dim, dim);
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  g(p, p) = c;
  g(q, q) = c;
  g(p, q) = -s;
  g(q, p) = s;
  return g;
}

/// Haar-distributed orthogonal matrix from the QR factorisation of a Gaussian matrix.
inline Matrix random_orthogonal(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix rr = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    if (rr(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

inline constexpr int kRefinementSteps = 200;
inline constexpr double kInitialStep = 0.5;
inline constexpr double kStepDecay = 0.5;

/// Coordinate ascent over Givens angles of max |R(e_i,e_j,e_k,e_l)|.
inline double refine_frame_maximum(const RiemannTensor& r, Matrix frame) {
  const int n = r.dim();
  double best = r.in_frame(frame).max_abs();
  double step = kInitialStep;
  for (int it = 0; it < kRefinementSteps; ++it) {
    bool improved = false;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q)
        for (double dir : {1.0, -1.0}) {
          Matrix trial = frame * givens(n, p, q, dir * step);
          const double value = r.in_frame(trial).max_abs();
          if (value > best) {
            best = value;
            frame = std::move(trial);
            improved = true;
          }
        }
    if (!improved) step *= kStepDecay;
  }
  return best;
}

}  // namespace detail

/// Lower-bound estimate of |R|_inf = max over orthonormal frames of |R(e_i,e_j,e_k,e_l)|.
///
/// Candidate 0 is the tensor's own frame; candidates 1..samples-1 are seeded Haar-random
/// frames. Each candidate is refined by coordinate ascent. The candidate sequence for a
/// given seed is a fixed stream, so the result is nondecreasing in `samples`.
[[nodiscard]] inline double max_abs_component(const RiemannTensor& r, std::uint64_t seed, int samples) {
  if (samples < 1) throw DomainError("max_abs_component: samples must be >= 1");
  const int n = r.dim();
  if (r.max_abs() == 0.0) return 0.0;
  std::mt19937_64 rng(seed);
  double best = detail::refine_frame_maximum(r, Matrix::Identity(n, n));
  for (int s = 1; s < samples; ++s) {
    best = std::max(best, detail::refine_frame_maximum(r, detail::random_orthogonal(n, rng)));
  }
  return best;
}

}  // namespace wcslab
