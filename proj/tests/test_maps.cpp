#include <doctest.h>

#include "opineq/maps.hpp"
#include "support.hpp"

using namespace opineq;
using namespace opineq::testing;

TEST_SUITE("maps") {
  TEST_CASE("identity and pinching") {
    Rng rng(2);
    const auto x = random_hermitian(4, rng);
    CHECK(max_diff(kraus_apply(PositiveLinearMap::identity(4), x), x) <= 1e-14);

    // direct summation over the basis projectors
    ComplexMatrix<double> diag = ComplexMatrix<double>::Zero(4, 4);
    for (Index i = 0; i < 4; ++i) diag(i, i) = x(i, i);
    CHECK(max_diff(kraus_apply(PositiveLinearMap::pinching(4), x), HermitianOperator::project(diag)) <= 1e-14);
  }

  TEST_CASE("validation reports normalization and positivity") {
    const auto id = validate_map(PositiveLinearMap::identity(3));
    CHECK(id.ok());
    CHECK(id.normalization_residual == 0.0);

    auto kraus = PositiveLinearMap::pinching(3).kraus();
    for (auto& v : kraus) v *= 2.0;
    const auto scaled = validate_map(PositiveLinearMap(kraus));
    CHECK(scaled.normalization_residual == doctest::Approx(3.0));
    CHECK_FALSE(scaled.normalized);
    CHECK(scaled.positive);
    CHECK_THROWS_AS(PositiveLinearMap::validated(kraus), InputError);
  }

  TEST_CASE("random maps are normalized, positive and reproducible") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const Index din = 1 + Index(seed % 6), dout = 1 + Index(seed % 4);
      if (Index(1 + seed % 3) * din < dout) {
        CHECK_THROWS_AS(random_map(din, dout, 1 + int(seed % 3), seed), DimensionError);
        continue;
      }
      const auto phi = random_map(din, dout, 1 + int(seed % 3), seed);
      CHECK(phi.dim_in() == din);
      CHECK(phi.dim_out() == dout);
      const auto v = validate_map(phi, 1e-10, 16, seed);
      CHECK(v.ok());
      CHECK(v.normalization_residual <= 1e-10);
      CHECK(max_diff(kraus_apply(phi, HermitianOperator::identity(din)), HermitianOperator::identity(dout)) <= 1e-10);

      const auto again = random_map(din, dout, 1 + int(seed % 3), seed);
      for (std::size_t k = 0; k < phi.kraus().size(); ++k) CHECK(phi.kraus()[k] == again.kraus()[k]);
    }
    const auto one = random_map(3, 3, 1, 9);
    const auto& v = one.kraus()[0];
    CHECK(max_abs((v.adjoint() * v - ComplexMatrix<double>::Identity(3, 3)).eval()) <= 1e-12);
  }

  TEST_CASE("positivity preservation on PSD samples") {
    Rng rng(31);
    const auto phi = random_map(5, 4, 3, 77);
    for (int i = 0; i < 100; ++i) {
      const auto x = random_psd(5, rng);
      const double scale = 1.0 + max_abs(x.matrix());
      CHECK(min_eigenvalue(kraus_apply(phi, x)) >= -1e-10 * scale);
    }
  }

  TEST_CASE("weights") {
    CHECK_THROWS_AS(WeightFamily({{0.5, 0.6}}), InputError);
    CHECK_THROWS_AS(WeightFamily({{1.5, -0.5}}), InputError);
    const auto u = WeightFamily::uniform({2, 3});
    CHECK(u[1][2] == doctest::Approx(1.0 / 3.0));
  }

  TEST_CASE("multi-index enumeration is row-major") {
    const MultiIndexRange r({2, 3});
    CHECK(r.size() == 6);
    CHECK(r.unflatten(1) == std::vector<std::size_t>{0, 1});
    CHECK(r.unflatten(3) == std::vector<std::size_t>{1, 0});
  }

  TEST_CASE("aggregation") {
    Rng rng(4);
    const auto a = random_hermitian(3, rng);
    const MapGrid single({1}, {PositiveLinearMap::identity(3)});
    CHECK(max_diff(aggregate(single, WeightFamily(std::vector<std::vector<double>>{{1.0}}), {a}), a) <= 1e-14);

    const MapGrid grid({2, 2}, {random_map(3, 2, 2, 1), random_map(3, 2, 2, 2), random_map(3, 2, 1, 3),
                                random_map(3, 2, 3, 4)});
    const WeightFamily w({{0.3, 0.7}, {0.6, 0.4}});
    const std::vector<HermitianOperator> ids(4, HermitianOperator::identity(3));
    CHECK(max_diff(aggregate(grid, w, ids), HermitianOperator::identity(2)) <= 1e-10);

    const MapGrid pair({2}, {PositiveLinearMap::identity(2), PositiveLinearMap::identity(2)});
    const auto mix = aggregate(pair, WeightFamily({{0.5, 0.5}}),
                               {HermitianOperator::diagonal({0.0, 2.0}), HermitianOperator::diagonal({2.0, 0.0})});
    CHECK(max_diff(mix, HermitianOperator::identity(2)) <= 1e-15);

    CHECK_THROWS_AS(MapGrid({2}, {PositiveLinearMap::identity(2)}), DimensionError);
  }
}
