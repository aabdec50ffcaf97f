#pragma once

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "opineq/linalg.hpp"
#include "opineq/random.hpp"

namespace opineq::testing {

inline ComplexMatrix<double> gaussian_matrix(Index rows, Index cols, Rng& rng) {
  ComplexMatrix<double> m(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) {
      const double re = rng.gaussian();
      m(r, c) = {re, rng.gaussian()};
    }
  return m;
}

inline HermitianOperator random_hermitian(Index dim, Rng& rng) {
  const auto g = gaussian_matrix(dim, dim, rng);
  return HermitianOperator::project(g + g.adjoint());
}

inline HermitianOperator random_psd(Index dim, Rng& rng) {
  const auto g = gaussian_matrix(dim, dim, rng);
  return HermitianOperator::project(g * g.adjoint());
}

/// Eigenvalues from Eigen's solver, used as an independent oracle.
inline Eigen::VectorXd oracle_eigenvalues(const HermitianOperator& a) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix<double>> es(a.matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

inline double max_diff(const HermitianOperator& a, const HermitianOperator& b) {
  return max_abs((a.matrix() - b.matrix()).eval());
}

}  // namespace opineq::testing
