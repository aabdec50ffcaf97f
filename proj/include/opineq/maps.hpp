#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "opineq/linalg.hpp"

namespace opineq {

/// Phi(X) = sum_k V_k* X V_k with V_k of size dim_in x dim_out.
/// Normalized (unital) when sum_k V_k* V_k = I.
class PositiveLinearMap {
 public:
  using Matrix = ComplexMatrix<double>;

  PositiveLinearMap() = default;
  /// Unchecked: only shapes are validated. Use validated() to also require
  /// the normalization identity.
  explicit PositiveLinearMap(std::vector<Matrix> kraus);

  /// Throws InputError unless ||sum V_k* V_k - I||_max <= tol.
  static PositiveLinearMap validated(std::vector<Matrix> kraus, double tol = 1e-10);

  static PositiveLinearMap identity(Index dim);
  /// Kraus terms e_i e_i^T: keeps the diagonal, zeroes the rest.
  static PositiveLinearMap pinching(Index dim);
  /// X -> V* X V for an isometry V (dim_in x dim_out, V* V = I).
  static PositiveLinearMap compression(const Matrix& isometry);

  Index dim_in() const { return kraus_.empty() ? 0 : kraus_[0].rows(); }
  Index dim_out() const { return kraus_.empty() ? 0 : kraus_[0].cols(); }
  const std::vector<Matrix>& kraus() const { return kraus_; }

 private:
  std::vector<Matrix> kraus_;
};

/// Phi(X). Throws DimensionError when X.dim() != dim_in.
HermitianOperator kraus_apply(const PositiveLinearMap& phi, const HermitianOperator& x);

/// Gaussian Kraus family renormalized by S^{-1/2}, S = sum V_k* V_k.
/// Redraws when S is ill conditioned; ConvergenceError after 8 retries.
PositiveLinearMap random_map(Index dim_in, Index dim_out, int n_kraus, std::uint64_t seed);

struct MapValidation {
  double normalization_residual = 0.0;  ///< ||sum V_k* V_k - I||_max
  double min_positivity = 0.0;          ///< smallest min eig(Phi(X)) over PSD samples
  int samples = 0;
  bool normalized = false;
  bool positive = false;
  bool ok() const { return normalized && positive; }
};

/// Reports normalization and positivity spot checks; never throws on a bad map.
MapValidation validate_map(const PositiveLinearMap& phi, double tol = 1e-10, int samples = 16,
                           std::uint64_t seed = 1);

/// n probability vectors w_1..w_n.
class WeightFamily {
 public:
  WeightFamily() = default;
  /// Throws InputError unless every vector is nonnegative and sums to 1 within 1e-12.
  explicit WeightFamily(std::vector<std::vector<double>> vectors);

  static WeightFamily uniform(const std::vector<std::size_t>& shape);

  std::size_t arity() const { return vectors_.size(); }
  const std::vector<double>& operator[](std::size_t i) const { return vectors_[i]; }
  const std::vector<std::vector<double>>& vectors() const { return vectors_; }
  std::vector<std::size_t> shape() const;

 private:
  std::vector<std::vector<double>> vectors_;
};

/// Multi-indices (j_1..j_n) enumerated row-major (last index fastest).
class MultiIndexRange {
 public:
  explicit MultiIndexRange(std::vector<std::size_t> shape);

  std::size_t size() const { return size_; }
  const std::vector<std::size_t>& shape() const { return shape_; }
  /// Flat position -> multi-index.
  std::vector<std::size_t> unflatten(std::size_t flat) const;
  /// Visits every multi-index in flat order.
  void for_each(const std::function<void(std::size_t, const std::vector<std::size_t>&)>& fn) const;

 private:
  std::vector<std::size_t> shape_;
  std::size_t size_ = 1;
};

/// One map per multi-index, stored in row-major flat order.
class MapGrid {
 public:
  MapGrid() = default;
  /// Throws DimensionError on a wrong count or on non-uniform dimensions.
  MapGrid(std::vector<std::size_t> shape, std::vector<PositiveLinearMap> maps);

  const std::vector<std::size_t>& shape() const { return shape_; }
  const std::vector<PositiveLinearMap>& maps() const { return maps_; }
  const PositiveLinearMap& at(std::size_t flat) const { return maps_[flat]; }
  Index dim_in() const { return maps_.front().dim_in(); }
  Index dim_out() const { return maps_.front().dim_out(); }

 private:
  std::vector<std::size_t> shape_;
  std::vector<PositiveLinearMap> maps_;
};

/// sum_J w_{1,j_1} ... w_{n,j_n} Phi_J(field[J]) with `field` in flat order.
HermitianOperator aggregate(const MapGrid& grid, const WeightFamily& weights,
                            const std::vector<HermitianOperator>& field);

}  // namespace opineq
