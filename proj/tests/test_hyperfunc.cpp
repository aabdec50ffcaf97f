#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "opineq/multifunc.hpp"
#include "support.hpp"

using namespace opineq;
using namespace opineq::testing;

namespace {

HermitianOperator sigma_x() { return HermitianOperator::project(ComplexMatrix<double>{{0, 1}, {1, 0}}); }

double at(const MultiFunc& f, std::vector<double> x) { return eval_scalar(f, x); }

std::vector<ScalarFunc1D> pool() {
  return {ScalarFunc1D::power(2.0),     ScalarFunc1D::power(0.5, 1.5), ScalarFunc1D::power(-1.0),
          ScalarFunc1D::power(-0.5, -2.0), ScalarFunc1D::log(0.7),   ScalarFunc1D::exp(-1.3),
          ScalarFunc1D::reciprocal(2.0), ScalarFunc1D::affine(-1.5, 0.25),
          ScalarFunc1D::polynomial({0.5, -1.0, 0.25, 0.75})};
}

}  // namespace

TEST_SUITE("hyperfunc") {
  TEST_CASE("scalar evaluation") {
    CHECK(at(Separable{{ScalarFunc1D::identity(), ScalarFunc1D::identity()}}, {1, 2}) == 3.0);
    CHECK(at(CompositeAffine{{1, 1}, ScalarFunc1D::power(2.0)}, {1, 2}) == doctest::Approx(9.0));
    CHECK(at(Separable{{ScalarFunc1D::reciprocal()}}, {0.5}) == doctest::Approx(2.0));
    CHECK_THROWS_AS(at(Separable{{ScalarFunc1D::log()}}, {-1.0}), DomainError);
  }

  TEST_CASE("operator evaluation") {
    const std::vector<HermitianOperator> ab{HermitianOperator::diagonal({1.0, 2.0}),
                                            HermitianOperator::diagonal({3.0, 4.0})};
    CHECK(max_diff(eval_operator(MultiFunc::sum(2), ab), ab[0] + ab[1]) <= 1e-14);
    CHECK(max_diff(eval_operator(CompositeAffine{{1, 1}, ScalarFunc1D::power(1.0)}, ab),
                   HermitianOperator::diagonal({4.0, 6.0})) <= 1e-13);

    const std::vector<HermitianOperator> sx{sigma_x(), HermitianOperator::identity(2)};
    const MultiFunc f = Separable{{ScalarFunc1D::power(2.0), ScalarFunc1D::identity()}};
    CHECK(max_diff(eval_operator(f, sx), 2.0 * HermitianOperator::identity(2)) <= 1e-13);
  }

  TEST_CASE("commuting arguments reduce to entrywise evaluation") {
    Rng rng(5);
    const MultiFunc f = CompositeAffine{{0.7, 1.2}, ScalarFunc1D::log()};
    const MultiFunc g = Separable{{ScalarFunc1D::exp(), ScalarFunc1D::power(0.5)}};
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> x(4), y(4);
      for (auto& v : x) v = rng.uniform(0.5, 2.0);
      for (auto& v : y) v = rng.uniform(0.5, 2.0);
      const std::vector<HermitianOperator> ops{HermitianOperator::diagonal(std::span<const double>(x)),
                                               HermitianOperator::diagonal(std::span<const double>(y))};
      for (const auto& h : {f, g}) {
        const auto op = eval_operator(h, ops);
        for (Index k = 0; k < 4; ++k) {
          CHECK(std::abs(std::real(op(k, k)) - at(h, {x[std::size_t(k)], y[std::size_t(k)]})) <= 1e-10);
        }
      }
    }
  }

  TEST_CASE("partial derivatives") {
    const MultiFunc f = Separable{{ScalarFunc1D::power(2.0), ScalarFunc1D::identity()}};
    CHECK(at(partial(f, 0), {1.5, 7.0}) == doctest::Approx(3.0));
    CHECK(at(partial(f, 1), {1.5, 7.0}) == doctest::Approx(1.0));
    CHECK(at(partial(f, 1), {-4.0, 2.0}) == doctest::Approx(1.0));

    const MultiFunc e = CompositeAffine{{2, 3}, ScalarFunc1D::exp()};
    CHECK(at(partial(e, 1), {0.1, 0.2}) == doctest::Approx(3.0 * std::exp(0.8)));
  }

  TEST_CASE("gradients match central differences") {
    Rng rng(17);
    const auto fs = pool();
    int checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const auto& u = fs[std::size_t(trial) % fs.size()];
      const auto& v = fs[std::size_t(trial / 3) % fs.size()];
      const MultiFunc f = trial % 2 ? MultiFunc(Separable{{u, v}})
                                    : MultiFunc(CompositeAffine{{0.6, 0.9}, u});
      const std::vector<double> x{rng.uniform(0.5, 2.5), rng.uniform(0.5, 2.5)};
      const auto grad = gradient(f);
      for (std::size_t i = 0; i < 2; ++i) {
        const double h = 1e-5 * std::max(1.0, std::abs(x[i]));
        auto xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        const double fd = (eval_scalar(f, xp) - eval_scalar(f, xm)) / (2 * h);
        const double exact = eval_scalar(grad[i], x);
        CHECK(std::abs(fd - exact) <= 1e-6 * std::max(1.0, std::abs(exact)));
        ++checked;
      }
    }
    CHECK(checked == 200);
  }

  TEST_CASE("gradient magnitude operators") {
    const MultiFunc id = Separable{{ScalarFunc1D::identity()}};
    const std::vector<HermitianOperator> one{HermitianOperator::diagonal({-1.0, 5.0})};
    CHECK(max_diff(grad_magnitude_operator(id, one), HermitianOperator::identity(2)) <= 1e-14);

    // sqrt(4 diag(1, 4)) = diag(2, 4)
    const MultiFunc f = Separable{{ScalarFunc1D::power(2.0), ScalarFunc1D::constant(0.0)}};
    const std::vector<HermitianOperator> two{HermitianOperator::diagonal({1.0, 2.0}), sigma_x()};
    CHECK(max_diff(grad_magnitude_operator(f, two), HermitianOperator::diagonal({2.0, 4.0})) <= 1e-12);

    const MultiFunc flat = CompositeAffine{{0, 0}, ScalarFunc1D::exp()};
    CHECK(max_diff(grad_magnitude_operator(flat, two), HermitianOperator::zero(2)) <= 1e-14);
  }

  TEST_CASE("absolute powers of f") {
    const MultiFunc id = Separable{{ScalarFunc1D::identity()}};
    const std::vector<HermitianOperator> d{HermitianOperator::diagonal({-1.0, 2.0})};
    CHECK(max_diff(abs_power_of_f(id, d, 1.0), HermitianOperator::diagonal({1.0, 2.0})) <= 1e-14);
    CHECK(max_diff(abs_power_of_f(id, d, 0.0), HermitianOperator::identity(2)) <= 1e-14);
    const std::vector<HermitianOperator> s{sigma_x()};
    CHECK(max_diff(abs_power_of_f(id, s, 2.0), HermitianOperator::identity(2)) <= 1e-13);

    const MultiFunc fp = abs_power_func(CompositeAffine{{1, 2}, ScalarFunc1D::log()}, 3.0);
    CHECK(at(fp, {0.1, 0.1}) == doctest::Approx(std::pow(std::abs(std::log(0.3)), 3.0)));
    CHECK_THROWS_AS(abs_power_func(Separable{{ScalarFunc1D::exp(), ScalarFunc1D::exp()}}, 2.0), InputError);
  }

  TEST_CASE("spectrum mapping on random operators") {
    Rng rng(23);
    const auto fs = pool();
    for (int trial = 0; trial < 100; ++trial) {
      const Index dim = 1 + trial % 8;
      // spectrum in [0.3, 3] keeps every pool member defined
      ComplexMatrix<double> d = ComplexMatrix<double>::Zero(dim, dim);
      for (Index k = 0; k < dim; ++k) d(k, k) = rng.uniform(0.3, 3.0);
      Eigen::HouseholderQR<ComplexMatrix<double>> qr(gaussian_matrix(dim, dim, rng));
      const ComplexMatrix<double> q = qr.householderQ() * ComplexMatrix<double>::Identity(dim, dim);
      const auto a = HermitianOperator::project(q * d * q.adjoint());

      const auto& u = fs[std::size_t(trial) % fs.size()];
      const auto lam = oracle_eigenvalues(a);
      std::vector<double> expect;
      for (Index k = 0; k < dim; ++k) expect.push_back(u(lam(k)));
      std::sort(expect.begin(), expect.end());
      const auto got = eig_hermitian(apply_scalar_func(a, u)).eigenvalues;
      for (Index k = 0; k < dim; ++k) {
        CHECK(std::abs(got(k) - expect[std::size_t(k)]) <= 1e-10 * std::max(1.0, std::abs(expect[std::size_t(k)])));
      }
    }
  }

  TEST_CASE("forms and domains") {
    const MultiFunc sep = Separable{{ScalarFunc1D::log(), ScalarFunc1D::constant(2.0)}};
    CHECK(sep.active_axes() == std::vector<std::size_t>{0});
    CHECK(reduces_to_single_operator(sep));
    CHECK_FALSE(reduces_to_single_operator(Separable{{ScalarFunc1D::exp(), ScalarFunc1D::exp()}}));
    CHECK(sep.defined_on(BoxDomain({{0.5, 1.0}, {-3.0, 3.0}})));
    CHECK_FALSE(sep.defined_on(BoxDomain({{-0.5, 1.0}, {-3.0, 3.0}})));
    CHECK_FALSE(MultiFunc(Separable{{ScalarFunc1D::reciprocal()}}).defined_on(BoxDomain({{-1.0, 1.0}})));
  }
}
