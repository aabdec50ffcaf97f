#include "opineq/maps.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "opineq/random.hpp"

namespace opineq {

namespace {

using Matrix = PositiveLinearMap::Matrix;

Matrix kraus_sum(const std::vector<Matrix>& kraus) {
  Matrix s = Matrix::Zero(kraus[0].cols(), kraus[0].cols());
  for (const auto& v : kraus) s += v.adjoint() * v;
  return s;
}

double normalization_residual(const std::vector<Matrix>& kraus) {
  const Matrix s = kraus_sum(kraus);
  return max_abs(Matrix(s - Matrix::Identity(s.rows(), s.cols())));
}

Matrix gaussian_matrix(Rng& rng, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const double re = rng.gaussian();
      m(i, j) = {re, rng.gaussian()};
    }
  return m;
}

}  // namespace

PositiveLinearMap::PositiveLinearMap(std::vector<Matrix> kraus) : kraus_(std::move(kraus)) {
  if (kraus_.empty()) throw InputError("positive linear map needs at least one Kraus operator");
  const Index r = kraus_[0].rows(), c = kraus_[0].cols();
  if (r < 1 || c < 1) throw DimensionError("Kraus operators must be nonempty");
  for (const auto& v : kraus_)
    if (v.rows() != r || v.cols() != c) throw DimensionError("Kraus operators differ in shape");
}

PositiveLinearMap PositiveLinearMap::validated(std::vector<Matrix> kraus, double tol) {
  PositiveLinearMap phi(std::move(kraus));
  const double res = normalization_residual(phi.kraus_);
  if (!(res <= tol)) {
    std::ostringstream os;
    os << "Kraus family is not normalized: ||sum V*V - I||_max = " << res;
    throw InputError(os.str());
  }
  return phi;
}

PositiveLinearMap PositiveLinearMap::identity(Index dim) {
  return PositiveLinearMap({Matrix::Identity(dim, dim)});
}

PositiveLinearMap PositiveLinearMap::pinching(Index dim) {
  std::vector<Matrix> kraus;
  for (Index i = 0; i < dim; ++i) {
    Matrix p = Matrix::Zero(dim, dim);
    p(i, i) = 1.0;
    kraus.push_back(std::move(p));
  }
  return PositiveLinearMap(std::move(kraus));
}

PositiveLinearMap PositiveLinearMap::compression(const Matrix& isometry) {
  return validated({isometry});
}

HermitianOperator kraus_apply(const PositiveLinearMap& phi, const HermitianOperator& x) {
  if (x.dim() != phi.dim_in()) {
    std::ostringstream os;
    os << "kraus_apply: operator of dim " << x.dim() << " given to a map with dim_in "
       << phi.dim_in();
    throw DimensionError(os.str());
  }
  Matrix acc = Matrix::Zero(phi.dim_out(), phi.dim_out());
  for (const auto& v : phi.kraus()) acc.noalias() += v.adjoint() * x.matrix() * v;
  return HermitianOperator::project(acc);
}

PositiveLinearMap random_map(Index dim_in, Index dim_out, int n_kraus, std::uint64_t seed) {
  if (n_kraus < 1) throw InputError("random_map: n_kraus must be >= 1");
  if (dim_in < 1 || dim_out < 1) throw DimensionError("random_map: dimensions must be >= 1");
  // sum V*V has rank at most n_kraus * dim_in, so it cannot reach the identity below that
  if (Index(n_kraus) * dim_in < dim_out) {
    throw DimensionError("random_map: n_kraus * dim_in must be >= dim_out for a unital map");
  }
  constexpr int kRetries = 8;
  Rng rng(seed);
  for (int attempt = 0; attempt <= kRetries; ++attempt) {
    std::vector<Matrix> kraus;
    for (int k = 0; k < n_kraus; ++k) kraus.push_back(gaussian_matrix(rng, dim_in, dim_out));
    const auto s = HermitianOperator::project(kraus_sum(kraus));
    const auto sd = eig_hermitian(s);
    if (!(sd.min() > 1e-10 * sd.max())) continue;
    const Matrix inv_sqrt =
        apply_spectral(sd, [](double x) { return 1.0 / std::sqrt(x); }).matrix();
    for (auto& v : kraus) v = (v * inv_sqrt).eval();
    return PositiveLinearMap(std::move(kraus));
  }
  throw ConvergenceError("random_map: Kraus sum stayed singular after 8 redraws");
}

MapValidation validate_map(const PositiveLinearMap& phi, double tol, int samples,
                           std::uint64_t seed) {
  MapValidation out;
  if (phi.kraus().empty()) return out;
  out.normalization_residual = normalization_residual(phi.kraus());
  out.normalized = out.normalization_residual <= tol;

  Rng rng(seed);
  out.min_positivity = std::numeric_limits<double>::infinity();
  out.positive = true;
  for (int s = 0; s < samples; ++s) {
    const Matrix g = gaussian_matrix(rng, phi.dim_in(), phi.dim_in());
    const auto x = HermitianOperator::project(g * g.adjoint());
    const double scale = 1.0 + max_abs(x.matrix());
    const double lo = min_eigenvalue(kraus_apply(phi, x));
    out.min_positivity = std::min(out.min_positivity, lo / scale);
    if (lo < -tol * scale) out.positive = false;
  }
  out.samples = samples;
  if (samples == 0) out.min_positivity = 0.0;
  return out;
}

WeightFamily::WeightFamily(std::vector<std::vector<double>> vectors)
    : vectors_(std::move(vectors)) {
  for (std::size_t i = 0; i < vectors_.size(); ++i) {
    const auto& w = vectors_[i];
    if (w.empty()) throw InputError("weight vector " + std::to_string(i) + " is empty");
    double sum = 0.0;
    for (double x : w) {
      if (!(x >= 0.0) || !std::isfinite(x)) {
        throw InputError("weight vector " + std::to_string(i) + " has a negative entry");
      }
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      std::ostringstream os;
      os << "weight vector " << i << " sums to " << sum << ", not 1";
      throw InputError(os.str());
    }
  }
}

WeightFamily WeightFamily::uniform(const std::vector<std::size_t>& shape) {
  std::vector<std::vector<double>> v;
  for (std::size_t k : shape) v.emplace_back(k, 1.0 / double(k));
  return WeightFamily(std::move(v));
}

std::vector<std::size_t> WeightFamily::shape() const {
  std::vector<std::size_t> s;
  for (const auto& w : vectors_) s.push_back(w.size());
  return s;
}

MultiIndexRange::MultiIndexRange(std::vector<std::size_t> shape) : shape_(std::move(shape)) {
  for (std::size_t k : shape_) {
    if (k == 0) throw DimensionError("multi-index shape has a zero extent");
    size_ *= k;
  }
}

std::vector<std::size_t> MultiIndexRange::unflatten(std::size_t flat) const {
  std::vector<std::size_t> j(shape_.size());
  for (std::size_t i = shape_.size(); i-- > 0;) {
    j[i] = flat % shape_[i];
    flat /= shape_[i];
  }
  return j;
}

void MultiIndexRange::for_each(
    const std::function<void(std::size_t, const std::vector<std::size_t>&)>& fn) const {
  std::vector<std::size_t> j(shape_.size(), 0);
  for (std::size_t flat = 0; flat < size_; ++flat) {
    fn(flat, j);
    for (std::size_t i = shape_.size(); i-- > 0;) {
      if (++j[i] < shape_[i]) break;
      j[i] = 0;
    }
  }
}

MapGrid::MapGrid(std::vector<std::size_t> shape, std::vector<PositiveLinearMap> maps)
    : shape_(std::move(shape)), maps_(std::move(maps)) {
  const MultiIndexRange range(shape_);
  if (maps_.size() != range.size()) {
    std::ostringstream os;
    os << "map grid expects " << range.size() << " maps, got " << maps_.size();
    throw DimensionError(os.str());
  }
  for (const auto& m : maps_) {
    if (m.dim_in() != maps_[0].dim_in() || m.dim_out() != maps_[0].dim_out()) {
      throw DimensionError("map grid entries differ in dimension");
    }
  }
}

HermitianOperator aggregate(const MapGrid& grid, const WeightFamily& weights,
                            const std::vector<HermitianOperator>& field) {
  if (weights.shape() != grid.shape()) throw DimensionError("aggregate: weight shape mismatch");
  const MultiIndexRange range(grid.shape());
  if (field.size() != range.size()) throw DimensionError("aggregate: field shape mismatch");

  Matrix acc = Matrix::Zero(grid.dim_out(), grid.dim_out());
  range.for_each([&](std::size_t flat, const std::vector<std::size_t>& j) {
    double w = 1.0;
    for (std::size_t i = 0; i < j.size(); ++i) w *= weights[i][j[i]];
    acc += w * kraus_apply(grid.at(flat), field[flat]).matrix();
  });
  return HermitianOperator::project(acc);
}

}  // namespace opineq
