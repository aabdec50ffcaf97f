#pragma once

// Dense Hermitian linear algebra: cyclic Jacobi eigensolver, spectral
// functional calculus and Loewner-order comparison.
//
// Everything here is templated on the real scalar type; the rest of the
// library works with the double instantiation `HermitianOperator`.

#include <Eigen/Dense>
#include <Eigen/Jacobi>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <span>
#include <sstream>
#include <vector>

#include "opineq/errors.hpp"

namespace opineq {

using Index = Eigen::Index;

template <typename Real>
using ComplexMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

/// Absolute tolerance on |a_ij - conj(a_ji)| accepted at construction.
template <typename Real>
constexpr Real hermitian_tolerance() {
  return std::max(Real(1e-12), Real(16) * std::numeric_limits<Real>::epsilon());
}

/// Largest entry modulus.
template <typename Derived>
typename Derived::RealScalar max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? typename Derived::RealScalar(0) : m.cwiseAbs().maxCoeff();
}

/// Dense self-adjoint matrix. The stored matrix is always exactly Hermitian:
/// construction symmetrizes with (A + A*)/2 after checking the input.
template <typename Real>
class Hermitian {
 public:
  using RealScalar = Real;
  using Scalar = std::complex<Real>;
  using Matrix = ComplexMatrix<Real>;

  Hermitian() = default;

  /// Checked construction; throws SymmetryError beyond hermitian_tolerance().
  template <typename Derived>
  explicit Hermitian(const Eigen::MatrixBase<Derived>& m) {
    if (m.rows() != m.cols() || m.rows() < 1) {
      throw DimensionError("Hermitian operator must be square with dim >= 1");
    }
    Matrix tmp = m.template cast<Scalar>();
    const Real asym = max_abs(Matrix(tmp - tmp.adjoint()));
    if (!(asym <= hermitian_tolerance<Real>())) {
      std::ostringstream os;
      os << "matrix is not Hermitian: max |A - A*| = " << asym;
      throw SymmetryError(os.str());
    }
    m_ = symmetrized(tmp);
  }

  /// Projects onto the Hermitian part without checking. For results of
  /// computations that are Hermitian in exact arithmetic.
  static Hermitian project(const Matrix& m) {
    Hermitian h;
    h.m_ = symmetrized(m);
    return h;
  }

  static Hermitian identity(Index dim) { return project(Matrix::Identity(dim, dim)); }
  static Hermitian zero(Index dim) { return project(Matrix::Zero(dim, dim)); }

  static Hermitian diagonal(std::span<const Real> values) {
    Matrix m = Matrix::Zero(Index(values.size()), Index(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) m(Index(i), Index(i)) = values[i];
    return project(m);
  }
  static Hermitian diagonal(std::initializer_list<Real> values) {
    const std::vector<Real> v(values);
    return diagonal(std::span<const Real>(v));
  }

  Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  Scalar operator()(Index i, Index j) const { return m_(i, j); }

  Hermitian& operator+=(const Hermitian& o) {
    check_same_dim(o);
    m_ += o.m_;
    return *this;
  }
  Hermitian& operator-=(const Hermitian& o) {
    check_same_dim(o);
    m_ -= o.m_;
    return *this;
  }
  Hermitian& operator*=(Real s) {
    m_ *= s;
    return *this;
  }

  friend Hermitian operator+(Hermitian a, const Hermitian& b) { return a += b; }
  friend Hermitian operator-(Hermitian a, const Hermitian& b) { return a -= b; }
  friend Hermitian operator*(Real s, Hermitian a) { return a *= s; }
  friend Hermitian operator*(Hermitian a, Real s) { return a *= s; }
  friend Hermitian operator-(Hermitian a) { return a *= Real(-1); }

  /// a + s*I
  Hermitian shifted(Real s) const {
    Hermitian h = *this;
    h.m_.diagonal().array() += Scalar(s);
    return h;
  }

  bool operator==(const Hermitian& o) const { return m_ == o.m_; }

 private:
  static Matrix symmetrized(const Matrix& m) {
    Matrix s = (m + m.adjoint()) * Real(0.5);
    for (Index i = 0; i < s.rows(); ++i) s(i, i) = Scalar(std::real(s(i, i)), Real(0));
    return s;
  }

  void check_same_dim(const Hermitian& o) const {
    if (o.dim() != dim()) throw DimensionError("Hermitian operands differ in dimension");
  }

  Matrix m_;
};

using HermitianOperator = Hermitian<double>;

/// Eigenvalues in ascending order and a unitary whose columns are the
/// matching orthonormal eigenvectors.
template <typename Real>
struct SpectralDecomposition {
  RealVector<Real> eigenvalues;
  ComplexMatrix<Real> eigenvectors;

  Real min() const { return eigenvalues(0); }
  Real max() const { return eigenvalues(eigenvalues.size() - 1); }
};

namespace detail {

template <typename Real>
Real off_diagonal_norm(const ComplexMatrix<Real>& m) {
  Real sum = 0;
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      if (i != j) sum += std::norm(m(i, j));
  return std::sqrt(sum);
}

template <typename Real>
constexpr Real jacobi_tolerance() {
  return std::max(Real(1e-13), Real(8) * std::numeric_limits<Real>::epsilon());
}

}  // namespace detail

/// Cyclic Jacobi eigendecomposition. Sweeps over every (p, q) pair until the
/// off-diagonal Frobenius mass drops below 1e-13 * ||A||_F.
template <typename Real>
SpectralDecomposition<Real> eig_hermitian(const Hermitian<Real>& a) {
  using Matrix = ComplexMatrix<Real>;
  using Scalar = std::complex<Real>;
  constexpr int kMaxSweeps = 100;

  const Index n = a.dim();
  Matrix work = a.matrix();
  Matrix vecs = Matrix::Identity(n, n);
  const Real threshold = detail::jacobi_tolerance<Real>() * work.norm();

  for (int sweep = 0;; ++sweep) {
    if (detail::off_diagonal_norm(work) <= threshold) break;
    if (sweep == kMaxSweeps) throw ConvergenceError("Jacobi eigensolver did not converge");
    for (Index p = 0; p < n - 1; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        if (work(p, q) == Scalar(0)) continue;
        Eigen::JacobiRotation<Scalar> rot;
        rot.makeJacobi(work, p, q);
        work.applyOnTheLeft(p, q, rot.adjoint());
        work.applyOnTheRight(p, q, rot);
        vecs.applyOnTheRight(p, q, rot);
      }
    }
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index(0));
  std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) {
    return std::real(work(i, i)) < std::real(work(j, j));
  });

  SpectralDecomposition<Real> out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    const Index src = order[static_cast<std::size_t>(k)];
    out.eigenvalues(k) = std::real(work(src, src));
    out.eigenvectors.col(k) = vecs.col(src);
  }
  return out;
}

/// Overload for raw matrices; throws SymmetryError if `m` is not Hermitian.
template <typename Derived>
auto eig_hermitian(const Eigen::MatrixBase<Derived>& m) {
  using Real = typename Derived::RealScalar;
  return eig_hermitian(Hermitian<Real>(m));
}

/// U diag(u(lambda)) U* for an arbitrary real callable `u`.
template <typename Real, typename Fn>
Hermitian<Real> apply_spectral(const SpectralDecomposition<Real>& sd, Fn&& u) {
  using Scalar = std::complex<Real>;
  const Index n = sd.eigenvalues.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> mapped(n);
  for (Index k = 0; k < n; ++k) mapped(k) = Scalar(u(sd.eigenvalues(k)), Real(0));
  return Hermitian<Real>::project(sd.eigenvectors * mapped.asDiagonal() *
                                  sd.eigenvectors.adjoint());
}

template <typename Real, typename Fn>
Hermitian<Real> apply_spectral(const Hermitian<Real>& a, Fn&& u) {
  return apply_spectral(eig_hermitian(a), std::forward<Fn>(u));
}

template <typename Real>
Real min_eigenvalue(const Hermitian<Real>& a) {
  return eig_hermitian(a).min();
}

template <typename Real>
Real max_eigenvalue(const Hermitian<Real>& a) {
  return eig_hermitian(a).max();
}

/// Outcome of an A <= B test in the Loewner order.
struct LoewnerVerdict {
  bool holds = false;
  double margin = 0.0;     ///< min eigenvalue of B - A
  double tolerance = 0.0;
};

/// Default Loewner tolerance: 1e-8 * (1 + ||B - A||_max).
template <typename Real>
Real default_loewner_tolerance(const Hermitian<Real>& a, const Hermitian<Real>& b) {
  return Real(1e-8) * (Real(1) + max_abs((b.matrix() - a.matrix()).eval()));
}

/// A <= B iff min eig(B - A) >= -tol.
template <typename Real>
LoewnerVerdict loewner_leq(const Hermitian<Real>& a, const Hermitian<Real>& b, Real tol) {
  if (a.dim() != b.dim()) throw DimensionError("loewner_leq: operands differ in dimension");
  const Real margin = min_eigenvalue(Hermitian<Real>(b - a));
  return {margin >= -tol, double(margin), double(tol)};
}

template <typename Real>
LoewnerVerdict loewner_leq(const Hermitian<Real>& a, const Hermitian<Real>& b) {
  if (a.dim() != b.dim()) throw DimensionError("loewner_leq: operands differ in dimension");
  return loewner_leq(a, b, default_loewner_tolerance(a, b));
}

/// Eigenvalues of magnitude at or below this are treated as zero.
template <typename Real>
Real singular_threshold(const SpectralDecomposition<Real>& sd) {
  const Real scale = std::max(std::abs(sd.min()), std::abs(sd.max()));
  return Real(64) * std::numeric_limits<Real>::epsilon() * std::max(Real(1), scale);
}

/// |A|^p through the spectral calculus, |A| = U diag(|lambda|) U*.
/// p == 0 returns the identity regardless of singularity.
template <typename Real>
Hermitian<Real> operator_abs_power(const Hermitian<Real>& a, Real p) {
  if (p == Real(0)) return Hermitian<Real>::identity(a.dim());
  const auto sd = eig_hermitian(a);
  if (p < 0) {
    const Real thr = singular_threshold(sd);
    for (Index k = 0; k < sd.eigenvalues.size(); ++k) {
      if (std::abs(sd.eigenvalues(k)) <= thr) {
        std::ostringstream os;
        os << "operator_abs_power: negative power " << p << " of singular operator (eigenvalue "
           << sd.eigenvalues(k) << ")";
        throw DomainError(os.str());
      }
    }
  }
  return apply_spectral(sd, [p](Real x) { return std::pow(std::abs(x), p); });
}

/// A^p for positive semidefinite A. Eigenvalues in [-tol, 0) are clamped to
/// zero; anything more negative raises PositivityError.
template <typename Real>
Hermitian<Real> psd_power(const Hermitian<Real>& a, Real p) {
  const auto sd = eig_hermitian(a);
  const Real tol = Real(1e-10) * (Real(1) + std::abs(sd.max()));
  if (sd.min() < -tol) {
    std::ostringstream os;
    os << "psd_power: operator is not positive semidefinite (min eigenvalue " << sd.min() << ")";
    throw PositivityError(os.str());
  }
  if (p <= 0 && sd.min() <= singular_threshold(sd)) {
    throw PositivityError("psd_power: non-positive power of a singular operator");
  }
  return apply_spectral(sd, [p](Real x) { return std::pow(std::max(x, Real(0)), p); });
}

/// A^{-1/2} for positive definite A.
template <typename Real>
Hermitian<Real> psd_inv_sqrt(const Hermitian<Real>& a) {
  const auto sd = eig_hermitian(a);
  if (!(sd.min() > 0) || sd.min() <= singular_threshold(sd)) {
    std::ostringstream os;
    os << "psd_inv_sqrt: operator is not positive definite (min eigenvalue " << sd.min() << ")";
    throw PositivityError(os.str());
  }
  return apply_spectral(sd, [](Real x) { return Real(1) / std::sqrt(x); });
}

/// X A X for Hermitian X, A (congruence), symmetrized.
template <typename Real>
Hermitian<Real> congruence(const Hermitian<Real>& x, const Hermitian<Real>& a) {
  if (x.dim() != a.dim()) throw DimensionError("congruence: operands differ in dimension");
  return Hermitian<Real>::project(x.matrix() * a.matrix() * x.matrix());
}

/// A^2 = A A.
template <typename Real>
Hermitian<Real> square(const Hermitian<Real>& a) {
  return Hermitian<Real>::project(a.matrix() * a.matrix());
}

}  // namespace opineq
